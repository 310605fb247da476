#include <doctest.h>

#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <numbers>

#include "dunklpot/dyson.hpp"
#include "dunklpot/errors.hpp"
#include "test_support.hpp"

using namespace dunklpot;

namespace {

double min_simple(const RootSystem& rs, const Vec& x) {
    double m = 1e300;
    for (int i = 0; i < rs.rank(); ++i) m = std::min(m, rs.pairing(i, x));
    return m;
}

const Vec kA2Start{0.35, 0.05, -0.25};

}  // namespace

TEST_CASE("drift formula, homogeneity and gradient of log pi") {
    RootSystem a1 = parse_system("a1");
    Vec b = drift(a1, Vec{1, 0});
    CHECK(b[0] == doctest::Approx(1));
    CHECK(b[1] == doctest::Approx(-1));

    for (const char* sel : {"a2", "b2", "g2", "a3"}) {
        RootSystem rs = parse_system(sel);
        std::mt19937_64 g(5);
        for (int i = 0; i < 10; ++i) {
            Vec x = testsupport::random_ball_chamber(rs, g);
            Vec bx = drift(rs, x), bl = drift(rs, scale(x, 3.0));
            for (std::size_t j = 0; j < x.size(); ++j) CHECK(bl[j] == doctest::Approx(bx[j] / 3).epsilon(1e-12));

            const double h = 1e-6 * norm(x);
            for (std::size_t j = 0; j < x.size(); ++j) {
                Vec p = x, m = x;
                p[j] += h;
                m[j] -= h;
                double fd = (std::log(pi_value(rs, p)) - std::log(pi_value(rs, m))) / (2 * h);
                CHECK(fd == doctest::Approx(bx[j]).epsilon(1e-6).scale(norm(bx)));
            }
        }
    }
    CHECK_THROWS_AS(drift(a1, Vec{1, 1}), OnWall);
}

TEST_CASE("config validation") {
    SdeConfig c;
    CHECK_NOTHROW(c.validate());
    c.delta_exit = 2e-3;
    CHECK_THROWS_AS(c.validate(), InvalidArgument);
    c = {};
    c.c_w = 0.6;
    CHECK_THROWS_AS(c.validate(), InvalidArgument);
    c = {};
    c.h0 = 0;
    CHECK_THROWS_AS(c.validate(), InvalidArgument);

    RootSystem rs = parse_system("a2");
    CHECK_THROWS_AS(simulate_exit(rs, Vec{1, 0, -1}, {}), InvalidArgument);
    CHECK_THROWS_AS(simulate_exit(rs, Vec{-0.1, 0, 0.1}, {}), NotInChamber);
    CHECK_THROWS_AS(exit_law_test(rs, kA2Start, 100, 32, {}), InvalidArgument);
}

TEST_CASE("paths stay in the chamber and exit on the sphere") {
    for (const char* sel : {"a2", "b2", "g2", "b2:3"}) {
        RootSystem rs = parse_system(sel);
        std::mt19937_64 g(11);
        for (int i = 0; i < 100; ++i) {
            Vec x0 = testsupport::random_ball_chamber(rs, g, 0.9);
            ExitResult r = simulate_exit(rs, x0, {}, i);
            REQUIRE_FALSE(r.rejected);
            CHECK(norm(r.y) == doctest::Approx(1).epsilon(1e-12));
            for (std::size_t a = 0; a < rs.num_positive_roots(); ++a) CHECK(rs.pairing(a, r.y) >= 0);
            ExitResult again = simulate_exit(rs, x0, {}, i);
            CHECK(again.y == r.y);
            CHECK(again.steps == r.steps);
        }
    }
}

TEST_CASE("bins tile the chamber part of the sphere") {
    RootSystem a2 = parse_system("a2");
    ExitBins b = make_exit_bins(a2, 32);
    CHECK(b.count() == 32);
    CHECK(b.angle == doctest::Approx(std::numbers::pi / 3));
    for (const Vec& v : {b.u1, b.u2}) CHECK(dot(v, b.axis) == doctest::Approx(0).scale(1));
    for (std::size_t a = 0; a < a2.num_positive_roots(); ++a)
        CHECK(dot(a2.positive_roots_f()[a], b.axis) == doctest::Approx(0).scale(1));
    // the two edges of the wedge are walls
    CHECK(min_simple(a2, b.point(0.3, 0)) == doctest::Approx(0).scale(1));
    CHECK(min_simple(a2, b.point(0.3, b.angle)) == doctest::Approx(0).scale(1));
    CHECK(min_simple(a2, b.point(0.3, b.angle / 2)) > 0);
    CHECK(b.bin_of(b.point(0.99, b.angle * 0.99)) == b.count() - 1);
    CHECK(b.bin_of(b.point(-0.99, 0.01)) == 0);

    CHECK(make_exit_bins(parse_system("g2"), 12).angle == doctest::Approx(std::numbers::pi / 6));
    CHECK(make_exit_bins(parse_system("b2"), 12).angle == doctest::Approx(std::numbers::pi / 4));
    CHECK(make_exit_bins(parse_system("trivial:2"), 12).angle == doctest::Approx(2 * std::numbers::pi));

    CHECK_THROWS_AS(make_exit_bins(parse_system("a3"), 32), UnsupportedGeometry);
    CHECK_THROWS_AS(make_exit_bins(parse_system("b3"), 32), UnsupportedGeometry);
    CHECK_THROWS_AS(make_exit_bins(parse_system("a2:span"), 32), UnsupportedGeometry);
}

TEST_CASE("predicted masses: chamber share of the total and quadrature convergence") {
    for (const char* sel : {"a2", "b2", "g2", "a1", "b2:3"}) {
        RootSystem rs = parse_system(sel);
        std::mt19937_64 g(3);
        Vec x0 = testsupport::random_ball_chamber(rs, g, 0.8);
        ExitBins b = make_exit_bins(rs, 32);
        auto m8 = predicted_bin_masses(rs, x0, b, 8), m16 = predicted_bin_masses(rs, x0, b, 16);
        double s = 0;
        for (std::size_t k = 0; k < m8.size(); ++k) {
            s += m16[k];
            CHECK(m8[k] == doctest::Approx(m16[k]).epsilon(1e-6));
        }
        CHECK(s * rs.weyl_order() == doctest::Approx(1).epsilon(1e-6));
    }
}

TEST_CASE("A1 near the origin: exit law proportional to pi squared") {
    RootSystem rs = parse_system("a1");
    const double eps = 1e-3;
    Vec x0 = scale(Vec{1, -1}, eps / std::sqrt(2.0));
    ExitBins b = make_exit_bins(rs, 16);
    auto m = predicted_bin_masses(rs, x0, b);
    double total = 0;
    for (double v : m) total += v;
    // pi(y)^2 = 2 sin^2 t on the arc, normalized over [0, pi]
    auto F = [](double t) { return (t - std::sin(t) * std::cos(t)) / std::numbers::pi; };
    for (int k = 0; k < 16; ++k) {
        double t0 = std::numbers::pi * k / 16, t1 = std::numbers::pi * (k + 1) / 16;
        CHECK(m[k] / total == doctest::Approx(F(t1) - F(t0)).epsilon(0.01));
    }

    ExitHistogram h = exit_law_test(rs, x0, 20'000, 16, {});
    CHECK(h.tv_distance < 0.03);
    CHECK(h.rejected == 0);
}

TEST_CASE("no roots: uniform exit law passes chi-square at 5%") {
    for (int d : {2, 3}) {
        RootSystem rs = parse_system("trivial:" + std::to_string(d));
        Vec x0(d, 0.0);
        SdeConfig cfg;
        cfg.seed = 7;
        ExitHistogram h = exit_law_test(rs, x0, 100'000, 32, cfg);
        for (double p : h.predicted) CHECK(p == doctest::Approx(1.0 / 32).epsilon(1e-9));
        boost::math::chi_squared dist(h.degrees_of_freedom);
        CHECK(h.chi_square < boost::math::quantile(dist, 0.95));
    }
}

TEST_CASE("A2 exit histogram matches the Poisson density") {
    RootSystem rs = parse_system("a2");
    ExitHistogram h = exit_law_test(rs, kA2Start, 20'000, 32, {});
    std::size_t counted = 0;
    for (auto c : h.counts) counted += c;
    CHECK(counted + h.rejected == h.total_paths);
    double e = 0, p = 0;
    for (int k = 0; k < h.bins; ++k) {
        e += h.empirical[k];
        p += h.predicted[k];
    }
    CHECK(e == doctest::Approx(1));
    CHECK(p == doctest::Approx(1));
    CHECK(h.tv_distance < 0.03);
    CHECK(h.rejected_fraction() < 0.01);
    CHECK(h.degrees_of_freedom == 31);

    json j = histogram_to_json(h);
    CHECK(j.at("tv_distance").get<double>() == h.tv_distance);
    CHECK(j.at("rejected").get<std::size_t>() == h.rejected);
    CHECK(j.at("empirical").size() == 32);
}

TEST_CASE("doubling the paths reduces the distance") {
    RootSystem rs = parse_system("b2");
    Vec x0{0.4, 0.15};
    double tv1 = 0, tv2 = 0;
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
        SdeConfig cfg;
        cfg.seed = seed;
        tv1 += exit_law_test(rs, x0, 10'000, 16, cfg).tv_distance;
        tv2 += exit_law_test(rs, x0, 20'000, 16, cfg).tv_distance;
    }
    CHECK(tv2 < tv1);
}

TEST_CASE("histogram does not depend on the worker count") {
    RootSystem rs = parse_system("g2");
    std::mt19937_64 g(1);
    Vec x0 = testsupport::random_ball_chamber(rs, g, 0.6);
    ExitHistogram a = exit_law_test(rs, x0, 10'000, 12, {}, 1);
    ExitHistogram b = exit_law_test(rs, x0, 10'000, 12, {}, 3);
    CHECK(a.counts == b.counts);
    CHECK(a.mean_steps == b.mean_steps);
}

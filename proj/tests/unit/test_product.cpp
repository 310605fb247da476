#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <numbers>

#include "dunklpot/errors.hpp"
#include "dunklpot/gauss_jacobi.hpp"
#include "dunklpot/kernels.hpp"
#include "dunklpot/product.hpp"
#include "test_support.hpp"

using namespace dunklpot;
using namespace testsupport;

namespace {

ProductSystem make(int J, std::vector<double> m, int d, ProductVariant v = ProductVariant::A1) {
    ProductSystem ps;
    ps.J = J;
    ps.m = std::move(m);
    ps.d = d;
    ps.variant = v;
    return ps;
}

// int_0^1 (u(1-u))^{m/2-1} (A + B u)^{-M} du; the complement argument keeps u and 1-u exact near the ends.
double t_oracle(double A, double B, double m, double M) {
    boost::math::quadrature::tanh_sinh<double> ts;
    auto f = [&](double u, double uc) {
        double left = uc < 0 ? -uc : u, right = uc > 0 ? uc : 1 - u;
        return std::pow(left * right, m / 2 - 1) * std::pow(A + B * u, -M);
    };
    return ts.integrate(f, 0.0, 1.0, 1e-13);
}

}  // namespace

TEST_CASE("Gauss-Jacobi rules integrate Jacobi-weighted monomials exactly") {
    for (double a : {-0.5, 0.0, 0.5, 1.5})
        for (double b : {-0.5, 0.0, 1.0}) {
            const QuadratureRule& r = gauss_jacobi(12, a, b);
            for (int k = 0; k < 24; ++k) {
                double s = 0;
                for (std::size_t i = 0; i < r.nodes.size(); ++i) s += r.weights[i] * std::pow(0.5 * (1 + r.nodes[i]), k);
                double exact = std::pow(2.0, a + b + 1) * boost::math::beta(a + 1, b + k + 1);
                CHECK(rel(s, exact) < 1e-12);
            }
        }
}

TEST_CASE("t_integral closed-form points") {
    CHECK(std::abs(t_integral(1, 1, 2, 2) - 0.5) < 1e-12);
    // B -> 0: the integrand is the Beta weight alone.
    for (double m : {1.0, 2.0, 3.0, 5.0})
        for (double M : {m / 2, m / 2 + 1, 7.0}) {
            double A = 0.37;
            CHECK(rel(t_integral(A, 0, m, M), boost::math::beta(m / 2, m / 2) * std::pow(A, -M)) < 1e-12);
        }
    // m = 2, M = 1: log(1 + B/A)/B.
    CHECK(rel(t_integral(1e-3, 5, 2, 1), std::log1p(5e3) / 5) < 1e-10);
    CHECK_THROWS_AS(t_integral(1, 1, 4, 1.5), UnsupportedRegime);
    CHECK_THROWS_AS(t_asymptotic(1, 1, 4, 1.5), UnsupportedRegime);
    CHECK_THROWS_AS(t_integral(0, 1, 2, 2), InvalidArgument);
}

TEST_CASE("t_integral agrees with double-exponential quadrature") {
    for (double m : {1.0, 2.0, 3.0, 5.0})
        for (double M : {m / 2, m / 2 + 1, m / 2 + 4})
            for (double A : {1e-2, 0.3, 1.0, 10.0})
                for (double B : {0.5, 1.0, 30.0}) {
                    double a = t_integral(A, B, m, M);
                    double o = t_oracle(A, B, m, M);
                    CHECK_MESSAGE(rel(a, o) < 1e-8, "A=" << A << " B=" << B << " m=" << m << " M=" << M);
                }
}

TEST_CASE("t_integral over t_asymptotic stays in a fixed bracket on the log grid") {
    // envelope per (m, M) on 10^{-4..4}, then on a wider, finer grid: it must not move
    auto envelope = [](double m, double M, int decades, int per_decade) {
        double lo = 1e300, hi = 0;
        for (int ea = -decades * per_decade; ea <= decades * per_decade; ++ea)
            for (int eb = -decades * per_decade; eb <= decades * per_decade; ++eb) {
                double A = std::pow(10.0, double(ea) / per_decade), B = std::pow(10.0, double(eb) / per_decade);
                double r = t_integral(A, B, m, M) / t_asymptotic(A, B, m, M);
                lo = std::min(lo, r);
                hi = std::max(hi, r);
            }
        return std::pair{lo, hi};
    };
    for (double m : {1.0, 2.0, 3.0, 5.0})
        for (double M : {m / 2, m / 2 + 1, m / 2 + 4}) {
            auto [lo, hi] = envelope(m, M, 4, 1);
            auto [lo2, hi2] = envelope(m, M, 6, 2);
            MESSAGE("m=" << m << " M=" << M << " [" << lo << ", " << hi << "] wide [" << lo2 << ", " << hi2 << "]");
            CHECK(lo > 0);
            CHECK(std::isfinite(hi));
            CHECK(lo2 >= 0.8 * lo);
            CHECK(hi2 <= 1.2 * hi);
        }
}

TEST_CASE("J=1, m=2 products match the complex A1 alternating sums") {
    RootSystem rs = build_root_system(Family::A, 1, 3);
    ProductSystem ps = make(1, {2}, 3);
    std::mt19937_64 g(11);
    int n = 0;
    for (int t = 0; t < 200; ++t) {
        Vec x = random_ball_chamber(rs, g), y = random_sphere_chamber(rs, g);
        if (rs.pairing(0, x) < 1e-2 || rs.pairing(0, y) < 1e-2) continue;
        KernelQuery q;
        q.system = &rs;
        q.x = x;
        q.y = y;
        double p = poisson_complex(q).value;
        CHECK(rel(product_poisson(ps, x, y).value, p) < 1e-8);
        Vec z = random_ball_chamber(rs, g);
        if (rs.pairing(0, z) < 1e-2) continue;
        q.y = z;
        double nw = std::abs(newton_complex(q).value);
        CHECK(rel(product_newton(ps, x, z).value, nw) < 1e-8);
        ++n;
    }
    CHECK(n > 100);
}

TEST_CASE("default Poisson constant gives unit boundary mass") {
    for (double m : {1.0, 2.0, 3.0, 4.5}) {
        ProductSystem ps = make(1, {m}, 2, ProductVariant::B1);
        Vec x{0.3, -0.45};
        boost::math::quadrature::gauss_kronrod<double, 61> gk;
        auto f = [&](double th) {
            Vec y{std::cos(th), std::sin(th)};
            return product_poisson(ps, ps.project_to_chamber(x), ps.project_to_chamber(y)).value *
                   std::pow(std::abs(y[0]), m);
        };
        double mass = 0;
        // the kernel peaks where y meets the direction of x or its mirror image
        const double pi = std::numbers::pi;
        double a = std::atan2(x[1], x[0]), b = std::atan2(x[1], -x[0]);
        std::vector<double> cuts{-pi, a, b, pi};
        std::sort(cuts.begin(), cuts.end());
        for (std::size_t k = 0; k + 1 < cuts.size(); ++k) mass += gk.integrate(f, cuts[k], cuts[k + 1], 15, 1e-12);
        CHECK(mass == doctest::Approx(1.0).epsilon(1e-8));
    }
}

TEST_CASE("degenerate factor integrates to the Beta function") {
    std::vector<double> m{1.0, 3.0, 2.5};
    double A = 0.2, P = 4.25;
    ProductIntegral full = product_cube_integral(A, {0.7, 0.0, 3.0}, m, P);
    ProductIntegral reduced = product_cube_integral(A, {0.7, 3.0}, {1.0, 2.5}, P);
    CHECK(rel(full.value, boost::math::beta(1.5, 1.5) * reduced.value) < 1e-12);

    ProductSystem ps = make(2, {1, 3}, 5);
    Vec x{0.2, 0.2, 0.4, -0.1, 0.3};  // on the first factor's wall
    Vec y{0.6, 0.1, 0.5, 0.2, 0.0};
    y = scale(y, 1 / norm(y));
    CHECK(ps.shift(0, x, y) == 0.0);
    double direct = product_integral(ps, KernelType::Poisson, x, y).value;
    double Aw = dist2(x, y);
    double P2 = 2.5 + 2.0;
    CHECK(rel(direct, boost::math::beta(0.5, 0.5) * t_integral(Aw, ps.shift(1, x, y), 3, P2)) < 1e-10);
}

TEST_CASE("integrating out one factor reproduces the one-factor integral") {
    boost::math::quadrature::tanh_sinh<double> ts;
    std::mt19937_64 g(5);
    std::uniform_real_distribution<double> U(0, 1);
    for (int t = 0; t < 12; ++t) {
        double m1 = 0.5 + 4 * U(g), m2 = 0.5 + 4 * U(g);
        double A = std::pow(10.0, -2 + 3 * U(g)), B1 = 5 * U(g), B2 = 5 * U(g);
        double P = (m1 + m2) / 2 + 1 + 2 * U(g);
        double two = product_cube_integral(A, {B1, B2}, {m1, m2}, P).value;
        auto outer = [&](double v) {
            return std::pow(v * (1 - v), m1 / 2 - 1) * t_integral(A + B1 * v, B2, m2, P);
        };
        double o = ts.integrate(outer, 0.0, 1.0, 1e-12);
        CHECK_MESSAGE(rel(two, o) < 1e-7, "m=(" << m1 << "," << m2 << ") A=" << A);
    }
}

TEST_CASE("product kernels are invariant under the factor-wise sign group") {
    for (auto v : {ProductVariant::A1, ProductVariant::B1}) {
        ProductSystem ps = make(2, {1, 3}, 5, v);
        std::mt19937_64 g(9);
        for (int t = 0; t < 20; ++t) {
            Vec x = scale(random_gaussian(g, 5), 0.2), y = random_gaussian(g, 5);
            y = scale(y, 1 / norm(y));
            double ref = product_poisson(ps, ps.project_to_chamber(x), ps.project_to_chamber(y)).value;
            for (int s = 1; s < 4; ++s) {
                Vec xs = x, ys = y;
                for (int i = 0; i < 2; ++i)
                    if (s >> i & 1) {
                        if (v == ProductVariant::A1) {
                            std::swap(xs[2 * i], xs[2 * i + 1]);
                            std::swap(ys[2 * i], ys[2 * i + 1]);
                        } else {
                            xs[i] = -xs[i];
                            ys[i] = -ys[i];
                        }
                    }
                double val = product_poisson(ps, ps.project_to_chamber(xs), ps.project_to_chamber(ys)).value;
                CHECK(rel(val, ref) < 1e-13);
            }
        }
    }
}

TEST_CASE("product estimates: reduction, reflection algebra, homogeneity") {
    std::mt19937_64 g(3);
    ProductSystem ps = make(2, {2, 2}, 4);
    RootSystem rs = product_root_system(ps);
    CHECK(rs.num_positive_roots() == 2);
    for (int t = 0; t < 50; ++t) {
        Vec x = random_ball_chamber(rs, g), y = random_sphere_chamber(rs, g);
        CHECK(rel(product_estimate_poisson(ps, x, y), omega_poisson(rs, x, y)) < 1e-12);
        Vec z = random_ball_chamber(rs, g);
        CHECK(rel(product_estimate_newton(ps, x, z), omega_newton(rs, x, z)) < 1e-12);
    }

    ProductSystem pb = make(3, {1, 2, 3}, 4, ProductVariant::B1);
    for (int t = 0; t < 50; ++t) {
        Vec x = pb.project_to_chamber(random_gaussian(g, 4)), y = pb.project_to_chamber(random_gaussian(g, 4));
        for (int i = 0; i < 3; ++i) {
            Vec ys = y;
            ys[i] = -ys[i];
            CHECK(rel(dist2(x, ys), dist2(x, y) + 4 * x[i] * y[i]) < 1e-12);
            CHECK(rel(dist2(x, ys) - dist2(x, y), pb.shift(i, x, y)) < 1e-12);
        }
    }

    ProductSystem p = make(2, {1, 3}, 5);
    for (int t = 0; t < 20; ++t) {
        Vec x = p.project_to_chamber(scale(random_gaussian(g, 5), 0.1));
        Vec y = p.project_to_chamber(scale(random_gaussian(g, 5), 0.1));
        double lam = 0.5 + 2 * std::uniform_real_distribution<double>(0, 1)(g);
        double e0 = product_estimate_poisson(p, x, y) / (1 - norm2(x));
        Vec lx = scale(x, lam), ly = scale(y, lam);
        double e1 = product_estimate_poisson(p, lx, ly) / (1 - norm2(lx));
        CHECK(rel(e1, std::pow(lam, -5 - 4) * e0) < 1e-12);
        double n0 = product_estimate_newton(p, x, y), n1 = product_estimate_newton(p, lx, ly);
        CHECK(rel(n1, std::pow(lam, -3 - 4) * n0) < 1e-12);
    }
}

TEST_CASE("d=2 Newton brackets for one and two factors") {
    for (int J : {1, 2}) {
        ProductSystem ps = make(J, J == 1 ? std::vector<double>{1.5} : std::vector<double>{1, 3}, 2, ProductVariant::B1);
        auto samples = product_sample_pairs(ps, KernelType::Newton, ProductStrategy::Mixed, 600, 17);
        ProductSweep sw = product_sweep(ps, KernelType::Newton, samples);
        MESSAGE("J=" << J << " bracket [" << sw.min_ratio << ", " << sw.max_ratio << "]");
        CHECK(sw.failures == 0);
        CHECK(sw.min_ratio > 0);
        CHECK(sw.max_ratio / sw.min_ratio < 50);
    }
}

TEST_CASE("product sweep envelope is positive and insensitive to node doubling") {
    ProductSystem ps = make(2, {1, 3}, 5);
    auto samples = product_sample_pairs(ps, KernelType::Poisson, ProductStrategy::Mixed, 600, 21);
    ProductSweep sw = product_sweep(ps, KernelType::Poisson, samples);
    CHECK(sw.failures == 0);
    CHECK(sw.min_ratio > 0);
    CHECK(rel(sw.min_ratio_coarse, sw.min_ratio) < 1e-6);
    CHECK(rel(sw.max_ratio_coarse, sw.max_ratio) < 1e-6);
    auto again = product_sample_pairs(ps, KernelType::Poisson, ProductStrategy::Mixed, 600, 21);
    for (std::size_t i = 0; i < samples.size(); ++i) CHECK(samples[i].x == again[i].x);
}

TEST_CASE("product system validation") {
    CHECK_THROWS_AS(make(3, {1, 1, 1}, 5).validate(), InvalidArgument);
    CHECK_THROWS_AS(make(1, {0}, 3).validate(), InvalidArgument);
    CHECK_THROWS_AS(make(2, {1}, 5).validate(), InvalidArgument);
    CHECK_NOTHROW(make(3, {1, 1, 1}, 3, ProductVariant::B1).validate());
    CHECK_THROWS_AS(product_cube_integral(1, {1}, {1}, 2, QuadratureSpec{4}), InvalidArgument);
}

#include <doctest.h>

#include "dunklpot/errors.hpp"
#include "dunklpot/root_system.hpp"
#include "dunklpot/serialization.hpp"
#include "test_support.hpp"

using namespace dunklpot;
using namespace testsupport;

namespace {

RVec rv(std::initializer_list<int> v) {
    RVec r;
    for (int c : v) r.emplace_back(c);
    return r;
}

bool contains_root(const RootSystem& rs, const RVec& v) {
    for (const auto& a : rs.positive_roots()) {
        if (a == v) return true;
        RVec n = a;
        for (auto& c : n) c = -c;
        if (n == v) return true;
    }
    return false;
}

}  // namespace

TEST_CASE("catalog sizes match independent matrix-group closure") {
    struct Case {
        const char* sel;
        std::size_t npos, order;
    };
    for (auto c : {Case{"a1:2", 1, 2}, Case{"a2", 3, 6}, Case{"a3", 6, 24}, Case{"b2", 4, 8}, Case{"b3", 9, 48},
                   Case{"c3", 9, 48}, Case{"d4", 12, 192}, Case{"g2", 6, 12}, Case{"a4", 10, 120}}) {
        CAPTURE(c.sel);
        RootSystem rs = parse_system(c.sel);
        CHECK(rs.num_positive_roots() == c.npos);
        CHECK(rs.weyl_order() == c.order);
        std::vector<RVec> gens;
        for (const auto& s : rs.simple_roots()) gens.push_back(reflection_matrix(s));
        auto group = matrix_group_closure(gens, rs.ambient_dim());
        CHECK(group.size() == rs.weyl_order());
        for (const auto& w : rs.weyl()) CHECK(group.count(w.matrix) == 1);
    }
}

TEST_CASE("A2 positive roots and S3 signs") {
    RootSystem rs = build_root_system(Family::A, 2, 3);
    CHECK(rs.positive_roots()[0] == rv({1, -1, 0}));
    CHECK(rs.positive_roots()[1] == rv({0, 1, -1}));
    CHECK(rs.positive_roots()[2] == rv({1, 0, -1}));
    int sum = 0;
    for (const auto& w : rs.weyl()) sum += w.sign;
    CHECK(sum == 0);
    // every permutation matrix of S3 is present, sign = permutation parity
    std::vector<int> p{0, 1, 2};
    do {
        RVec m(9, Rational(0));
        for (int k = 0; k < 3; ++k) m[k * 3 + p[k]] = 1;
        std::size_t idx = rs.find(m);
        REQUIRE(idx != RootSystem::npos);
        int inv = 0;
        for (int i = 0; i < 3; ++i)
            for (int j = i + 1; j < 3; ++j) inv += p[i] > p[j];
        CHECK(rs.weyl()[idx].sign == (inv % 2 ? -1 : 1));
    } while (std::next_permutation(p.begin(), p.end()));
}

TEST_CASE("B2 roots agree with brute-force orbit of e1-e2 and e2") {
    RootSystem rs = build_root_system(Family::B, 2, 2);
    std::set<RVec> brute;
    for (int a = -1; a <= 1; ++a)
        for (int b = -1; b <= 1; ++b)
            if (a != 0 || b != 0) brute.insert(rv({a, b}));
    for (const auto& v : brute) CHECK(contains_root(rs, v));
    CHECK(2 * rs.num_positive_roots() == brute.size());
}

TEST_CASE("Weyl enumeration invariants") {
    for (const char* sel : {"a2", "b3", "g2", "d4"}) {
        RootSystem rs = parse_system(sel);
        const auto& W = enumerate_weyl(rs);
        CHECK(W[0].word.empty());
        CHECK(W[0].sign == 1);
        std::set<RVec> mats;
        for (const auto& w : W) {
            mats.insert(w.matrix);
            CHECK(w.sign == (w.length() % 2 ? -1 : 1));
            // root permutation
            for (const auto& a : rs.positive_roots()) CHECK(contains_root(rs, w.apply(a)));
            // closure under simple reflections
            for (int i = 0; i < rs.rank(); ++i) CHECK(rs.left_simple(i, w.index) < W.size());
            // orthogonality: M^T M = I
            int d = rs.ambient_dim();
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) {
                    Rational s = 0;
                    for (int k = 0; k < d; ++k) s += w.matrix[k * d + i] * w.matrix[k * d + j];
                    CHECK(s == Rational(i == j ? 1 : 0));
                }
        }
        CHECK(mats.size() == W.size());
        // word length is minimal: length equals number of positive roots sent negative
        for (const auto& w : W) {
            int inversions = 0;
            for (std::size_t a = 0; a < rs.num_positive_roots(); ++a) {
                RVec img = w.apply(rs.positive_roots()[a]);
                bool positive = false;
                for (const auto& b : rs.positive_roots()) positive = positive || b == img;
                inversions += !positive;
            }
            CHECK(inversions == w.length());
        }
    }
}

TEST_CASE("composition and inverse") {
    RootSystem rs = parse_system("b3");
    std::mt19937_64 g(3);
    std::uniform_int_distribution<std::size_t> pick(0, rs.weyl_order() - 1);
    for (int t = 0; t < 50; ++t) {
        std::size_t a = pick(g), b = pick(g);
        RVec y = random_rvec(g, 3);
        CHECK(rs.weyl()[rs.compose(a, b)].apply(y) == rs.weyl()[a].apply(rs.weyl()[b].apply(y)));
        CHECK(rs.compose(a, rs.inverse(a)) == 0);
    }
}

TEST_CASE("build errors") {
    CHECK_THROWS_AS(build_root_system(Family::G2, 3, 3), UnsupportedFamily);
    CHECK_THROWS_AS(build_root_system(Family::A, 2, 2), UnsupportedFamily);
    CHECK_THROWS_AS(build_root_system(Family::A, 0, 2), UnsupportedFamily);
    CHECK_THROWS_AS(parse_system("x3"), UnsupportedFamily);
    BuildOptions small;
    small.weyl_cap = 10;
    CHECK_THROWS_AS(build_root_system(Family::B, 3, 3, small), EnumerationCapExceeded);
    std::vector<RVec> bad{{Rational(1), Rational(0)}, {Rational(-1, 2), Rational(1)}};
    CHECK_THROWS_AS(root_system_from_simple_roots(bad), NonCrystallographic);
}

TEST_CASE("explicit input is rescaled to unit minimum length") {
    std::vector<RVec> s{{Rational(1, 2), Rational(-1, 2)}};
    RootSystem rs = root_system_from_simple_roots(s);
    CHECK(rs.norms2()[0] >= 1);
    CHECK(rs.weyl_order() == 2);
}

TEST_CASE("derived constants") {
    RootSystem a3 = parse_system("a3");
    CHECK(a3.height_bound() == 3);
    CHECK(a3.kappa() == 6);
    CHECK(a3.K0() == Rational(1, 2));
    CHECK(a3.C1() == doctest::Approx(std::sqrt(2.0)));
    CHECK(a3.rho() == RVec{Rational(3, 2), Rational(1, 2), Rational(-1, 2), Rational(-3, 2)});
    RootSystem g2 = parse_system("g2");
    CHECK(g2.height_bound() == 5);
    CHECK(g2.C1() == doctest::Approx(std::sqrt(6.0)));
    RootSystem b2 = parse_system("b2");
    CHECK(b2.K0() == 1);
    for (const char* sel : {"a3", "b3", "g2"}) {
        RootSystem rs = parse_system(sel);
        for (std::size_t i = 0; i < rs.fundamental_coweights().size(); ++i)
            for (int j = 0; j < rs.rank(); ++j)
                CHECK(dot(rs.simple_roots()[j], rs.fundamental_coweights()[i]) == Rational(i == std::size_t(j) ? 1 : 0));
    }
}

TEST_CASE("chamber projection") {
    RootSystem a1 = build_root_system(Family::A, 1, 2);
    auto p = project_to_chamber(a1, Vec{0, 1});
    CHECK(p.x_plus == Vec{1, 0});
    CHECK(p.w == a1.reflection_element(0));
    auto q = project_to_chamber(a1, Vec{2, 1});
    CHECK(q.w == 0);
    CHECK(q.x_plus == Vec{2, 1});

    std::mt19937_64 g(11);
    for (const char* sel : {"a3", "b3", "g2"}) {
        RootSystem rs = parse_system(sel);
        std::uniform_int_distribution<std::size_t> pick(0, rs.weyl_order() - 1);
        for (int t = 0; t < 100; ++t) {
            RVec x = random_rvec(g, rs.ambient_dim());
            auto px = project_to_chamber(rs, x);
            for (int i = 0; i < rs.rank(); ++i) CHECK(rs.pairing(i, px.x_plus) >= 0);
            CHECK(rs.weyl()[px.w].apply(x) == px.x_plus);
            RVec wx = rs.weyl()[pick(g)].apply(x);
            CHECK(project_to_chamber(rs, wx).x_plus == px.x_plus);
            // 1-Lipschitz
            RVec y = random_rvec(g, rs.ambient_dim());
            auto py = project_to_chamber(rs, y);
            CHECK(norm2(sub(px.x_plus, py.x_plus)) <= norm2(sub(x, y)));
        }
    }
}

TEST_CASE("orbit difference decomposition: examples") {
    RootSystem a2 = build_root_system(Family::A, 2, 3);
    auto id = decompose_orbit_difference(a2, 0);
    for (const auto& a : id) CHECK(a.is_zero());
    for (int i = 0; i < 2; ++i) {
        auto f = decompose_orbit_difference(a2, a2.left_simple(i, 0));
        for (int j = 0; j < 2; ++j) {
            RVec expect(2, Rational(0));
            if (i == j) expect[i] = 1;
            CHECK(f[j].coeffs == expect);
        }
    }
    std::size_t w = a2.left_simple(1, a2.left_simple(0, 0));  // s2 s1
    auto f = decompose_orbit_difference(a2, w);
    CHECK(f[0].coeffs == RVec{Rational(1), Rational(0)});
    CHECK(f[1].coeffs == RVec{Rational(1), Rational(1)});
    CHECK(max_orbit_coeff(a2) == 1);
}

TEST_CASE("orbit difference decomposition reproduces y - w y exactly") {
    std::mt19937_64 g(5);
    for (const char* sel : {"a3", "b3", "g2", "c3"}) {
        RootSystem rs = parse_system(sel);
        std::vector<RVec> ys;
        for (int t = 0; t < 100; ++t) ys.push_back(random_rvec(g, rs.ambient_dim()));
        for (std::size_t w = 0; w < rs.weyl_order(); ++w) {
            auto forms = decompose_orbit_difference(rs, w);
            for (int i = 0; i < rs.rank(); ++i) {
                for (const auto& c : forms[i].coeffs) CHECK((c >= 0 && c.get_den() == 1));
                if (!forms[i].is_zero()) CHECK(forms[i].coeffs[i] > 0);
            }
            for (const auto& y : ys) {
                RVec lhs = sub(y, rs.weyl()[w].apply(y));
                RVec rhs(rs.ambient_dim(), Rational(0));
                for (int i = 0; i < rs.rank(); ++i) {
                    Rational c = 2 * evaluate(rs, forms[i], y) / rs.norms2()[i];
                    for (int k = 0; k < rs.ambient_dim(); ++k) rhs[k] += c * rs.simple_roots()[i][k];
                }
                CHECK(lhs == rhs);
            }
        }
    }
}

TEST_CASE("orbit-difference recursion matches the linear-algebra route") {
    // y - s_k w0 y = (y - s_k y) + s_k (y - w0 y)
    RootSystem rs = parse_system("b3");
    std::mt19937_64 g(9);
    for (std::size_t w0 = 0; w0 < rs.weyl_order(); ++w0)
        for (int k = 0; k < rs.rank(); ++k) {
            RVec y = random_rvec(g, 3);
            std::size_t w = rs.left_simple(k, w0);
            RVec direct = sub(y, rs.weyl()[w].apply(y));
            RVec split = sub(y, rs.reflect(k, y));
            RVec inner = rs.reflect(k, sub(y, rs.weyl()[w0].apply(y)));
            for (int c = 0; c < 3; ++c) split[c] += inner[c];
            CHECK(direct == split);
        }
}

TEST_CASE("pi polynomial") {
    RootSystem a1 = build_root_system(Family::A, 1, 2);
    Polynomial p1 = pi_polynomial(a1);
    CHECK(p1 == Polynomial::linear(RVec{Rational(1), Rational(-1)}));
    RootSystem a2 = build_root_system(Family::A, 2, 3);
    CHECK(pi_value(a2, RVec{Rational(3), Rational(2), Rational(1)}) == 2);
    CHECK(pi_polynomial(a2).degree() == 3);
    std::mt19937_64 g(17);
    for (const char* sel : {"a3", "b3", "g2"}) {
        RootSystem rs = parse_system(sel);
        Polynomial p = pi_polynomial(rs);
        CHECK(p.degree() == static_cast<int>(rs.num_positive_roots()));
        CHECK(p.laplacian().is_zero());
        for (int t = 0; t < 10; ++t) {
            RVec x = random_rvec(g, rs.ambient_dim());
            CHECK(p(x) == pi_value(rs, x));
            for (const auto& w : rs.weyl()) CHECK(pi_value(rs, w.apply(x)) == w.sign * pi_value(rs, x));
        }
    }
}

TEST_CASE("pi derivative constant") {
    RootSystem a1 = build_root_system(Family::A, 1, 2);
    CHECK(pi_derivative_constant(a1, basic_subsystem(a1, {0})) == 2);
    for (const char* sel : {"a2", "a3", "b3"}) {
        RootSystem rs = parse_system(sel);
        for (const auto& sub : all_basic_subsystems(rs)) {
            if (sub.empty()) continue;
            CHECK(pi_derivative_constant(rs, sub) != 0);
        }
    }
    CHECK_THROWS_AS(pi_derivative_constant(a1, basic_subsystem(a1, {})), InvalidArgument);
}

TEST_CASE("derivatives of pi' of lower order vanish on the wall intersection") {
    std::mt19937_64 g(23);
    for (const char* sel : {"a3", "b3"}) {
        RootSystem rs = parse_system(sel);
        const int d = rs.ambient_dim();
        for (const auto& sub : all_basic_subsystems(rs)) {
            if (sub.empty()) continue;
            Polynomial p = Polynomial::constant(d, 1);
            for (auto a : sub.positive) p = p * Polynomial::linear(rs.positive_roots()[a]);
            // point on every wall of the subsystem: combination of coweights outside S
            RVec x(d, Rational(0));
            for (int j = 0; j < rs.rank(); ++j)
                if (std::find(sub.simple.begin(), sub.simple.end(), j) == sub.simple.end()) {
                    Rational c = random_rational(g);
                    for (int k = 0; k < d; ++k) x[k] += c * rs.fundamental_coweights()[j][k];
                }
            for (auto a : sub.positive) CHECK(rs.pairing(a, x) == 0);
            Polynomial q = p;
            for (std::size_t order = 0; order < sub.positive.size(); ++order) {
                CHECK(q(x) == 0);
                q = q.derivative(random_rvec(g, d));
            }
        }
    }
}

TEST_CASE("basic subsystems") {
    RootSystem a3 = parse_system("a3");
    auto subs = all_basic_subsystems(a3);
    CHECK(subs.size() == 8);
    for (const auto& s : subs) {
        CHECK(s.positive.size() + s.complement.size() == a3.num_positive_roots());
        CHECK(s.subgroup.size() + s.cosubgroup.size() == a3.weyl_order());
        // W' fixes the orthogonal complement of span{alpha_i : i in S}
        for (std::size_t w : s.subgroup)
            for (int j = 0; j < a3.rank(); ++j) {
                if (std::find(s.simple.begin(), s.simple.end(), j) != s.simple.end()) continue;
                const RVec& om = a3.fundamental_coweights()[j];
                CHECK(a3.weyl()[w].apply(om) == om);
            }
    }
    auto s02 = basic_subsystem(a3, {0, 2});
    CHECK(s02.positive.size() == 2);
    CHECK(s02.subgroup.size() == 4);
    auto s01 = basic_subsystem(a3, {0, 1});
    CHECK(s01.positive.size() == 3);
    CHECK(s01.subgroup.size() == 6);
}

TEST_CASE("exact reflection identity") {
    std::mt19937_64 g(31);
    for (const char* sel : {"a2", "b2", "g2", "a3", "b3", "c3", "d4"}) {
        RootSystem rs = parse_system(sel);
        for (int t = 0; t < 50; ++t) {
            RVec x = random_rvec(g, rs.ambient_dim()), y = random_rvec(g, rs.ambient_dim());
            for (std::size_t a = 0; a < rs.num_positive_roots(); ++a) {
                Rational lhs = norm2(sub(x, rs.reflect(a, y)));
                Rational rhs = norm2(sub(x, y)) + 4 * rs.pairing(a, x) * rs.pairing(a, y) / rs.norms2()[a];
                CHECK(lhs == rhs);
            }
        }
    }
}

TEST_CASE("dominance and reflected distances") {
    std::mt19937_64 g(37);
    for (const char* sel : {"a2", "b3", "g2"}) {
        RootSystem rs = parse_system(sel);
        for (int t = 0; t < 50; ++t) {
            RVec x = project_to_chamber(rs, random_rvec(g, rs.ambient_dim())).x_plus;
            RVec y = project_to_chamber(rs, random_rvec(g, rs.ambient_dim())).x_plus;
            Rational base = norm2(sub(x, y));
            Rational mind = -1;
            for (std::size_t a = 0; a < rs.num_positive_roots(); ++a) {
                for (const RVec* p : {&x, &y}) {
                    Rational v = rs.pairing(a, *p);
                    Rational d2 = v * v / rs.norms2()[a];
                    if (mind < 0 || d2 < mind) mind = d2;
                }
            }
            for (const auto& w : rs.weyl()) {
                RVec wy = w.apply(y);
                CHECK(dot(x, y) >= dot(x, wy));
                Rational dd = norm2(sub(x, wy));
                CHECK(dd >= base);
                if (w.index != 0 && pi_value(rs, x) != 0 && pi_value(rs, y) != 0) CHECK(dd >= mind);
            }
        }
    }
}

TEST_CASE("strict dominance off the stabilizer") {
    // x on a subset of the walls of y; every w outside the stabilizer of y loses strictly.
    std::mt19937_64 g(41);
    for (const char* sel : {"a3", "b3"}) {
        RootSystem rs = parse_system(sel);
        const int d = rs.ambient_dim();
        for (unsigned mask = 0; mask < (1u << rs.rank()); ++mask) {
            RVec y(d, Rational(0)), x(d, Rational(0));
            std::vector<int> zero_y;
            for (int j = 0; j < rs.rank(); ++j) {
                bool on = mask & (1u << j);
                if (on) zero_y.push_back(j);
                Rational cy = on ? Rational(0) : Rational(1 + static_cast<int>(g() % 5));
                Rational cx = (on && (g() % 2)) ? Rational(0) : Rational(1 + static_cast<int>(g() % 5));
                for (int k = 0; k < d; ++k) {
                    y[k] += cy * rs.fundamental_coweights()[j][k];
                    x[k] += cx * rs.fundamental_coweights()[j][k];
                }
            }
            auto stab = basic_subsystem(rs, zero_y);
            for (std::size_t w : stab.subgroup) CHECK(rs.weyl()[w].apply(y) == y);
            for (std::size_t w : stab.cosubgroup) CHECK(dot(x, y) > dot(x, rs.weyl()[w].apply(y)));
        }
    }
}

TEST_CASE("distance to wall") {
    RootSystem a1 = build_root_system(Family::A, 1, 2);
    CHECK(dist_to_wall(a1, 0, Vec{1, 0}) == doctest::Approx(1 / std::sqrt(2.0)));
    CHECK(dist_to_wall(a1, 0, Vec{0.5, 0.5}) == 0);
    CHECK(dist_to_wall(a1, 0, Vec{3, 0}) == doctest::Approx(3 * dist_to_wall(a1, 0, Vec{1, 0})));
    CHECK_THROWS_AS(dist_to_wall(a1, 0, Vec{0, 1}), NotInChamber);
}

TEST_CASE("json round trip") {
    for (const char* sel : {"a2", "b3", "g2", "a2:span", "a1:3"}) {
        RootSystem rs = parse_system(sel);
        json j = root_system_to_json(rs);
        RootSystem back = root_system_from_json(j);
        CHECK(back.simple_roots() == rs.simple_roots());
        CHECK(back.weyl_order() == rs.weyl_order());
        CHECK(back.kernel_dim() == rs.kernel_dim());
        CHECK(root_system_to_json(back)["simple_roots"] == j["simple_roots"]);
    }
    json bad = {{"ambient_dim", 2}, {"simple_roots", {{{1, 0}, {0, 1}}}}};
    CHECK_THROWS(root_system_from_json(bad));
}

TEST_CASE("span-only and trivial systems") {
    RootSystem a2s = parse_system("a2:span");
    CHECK(a2s.kernel_dim() == 2);
    CHECK(a2s.ambient_dim() == 3);
    RootSystem t = trivial_root_system(3);
    CHECK(t.rank() == 0);
    CHECK(t.weyl_order() == 1);
    CHECK(t.num_positive_roots() == 0);
}

#include "dunklpot/product.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

#include "dunklpot/errors.hpp"
#include "dunklpot/gauss_jacobi.hpp"
#include "dunklpot/parallel.hpp"
#include "dunklpot/random.hpp"

namespace dunklpot {

void ProductSystem::validate() const {
    if (J < 1) throw InvalidArgument("J must be positive");
    if (static_cast<int>(m.size()) != J) throw InvalidArgument("one multiplicity per factor expected");
    for (double v : m)
        if (!(v > 0)) throw InvalidArgument("multiplicities must be positive");
    if (variant == ProductVariant::A1 ? 2 * J > d : J > d) throw InvalidArgument("factors do not fit in R^d");
    if (d < 2) throw InvalidArgument("dimension must be >= 2");
}

Vec ProductSystem::root(int i) const {
    Vec r(d, 0.0);
    if (variant == ProductVariant::A1) {
        r[2 * i] = 1;
        r[2 * i + 1] = -1;
    } else {
        r[i] = 1;
    }
    return r;
}

double ProductSystem::pairing(int i, const Vec& x) const {
    return variant == ProductVariant::A1 ? std::abs(x[2 * i] - x[2 * i + 1]) : std::abs(x[i]);
}

double ProductSystem::shift(int i, const Vec& x, const Vec& y) const {
    return 4.0 / root_norm2() * pairing(i, x) * pairing(i, y);
}

Vec ProductSystem::project_to_chamber(const Vec& x) const {
    Vec r = x;
    for (int i = 0; i < J; ++i) {
        if (variant == ProductVariant::A1) {
            if (r[2 * i] < r[2 * i + 1]) std::swap(r[2 * i], r[2 * i + 1]);
        } else {
            r[i] = std::abs(r[i]);
        }
    }
    return r;
}

std::string ProductSystem::id() const {
    std::ostringstream os;
    os << (variant == ProductVariant::A1 ? "a1" : "b1") << "^" << J << "(m=";
    for (int i = 0; i < J; ++i) os << (i ? "," : "") << m[i];
    os << ";d=" << d << ")";
    return os.str();
}

namespace {

struct Level {
    double B;
    double a;
    double beta;
    const QuadratureRule* sym;    // (a, a) on [0, 1]
    const QuadratureRule* left;   // (0, a): weight v^a at the left end
    const QuadratureRule* right;  // (a, 0): weight (1-v)^a at the right end
    const QuadratureRule* plain;
};

class Nested {
public:
    Nested(const std::vector<double>& B, const std::vector<double>& m, double P, int n, std::uint64_t cap)
        : P_(P), cap_(cap) {
        std::vector<std::size_t> order(B.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return B[i] > B[j]; });
        for (std::size_t i : order) {
            double a = m[i] / 2 - 1;
            levels_.push_back({B[i], a, std::beta(a + 1, a + 1), &gauss_jacobi(n, a, a), &gauss_jacobi(n, 0, a),
                               &gauss_jacobi(n, a, 0), &gauss_jacobi(n, 0, 0)});
        }
        vbuf_.resize(levels_.size());
        wbuf_.resize(levels_.size());
    }

    double run(double A) { return rec(0, A); }
    std::uint64_t evaluations() const { return evals_; }

private:
    // Composite rule for int_0^1 (v(1-v))^a g(v) dv where g is analytic except near v = -q.
    static void rule(const Level& L, double q, std::vector<double>& v, std::vector<double>& w) {
        v.clear();
        w.clear();
        const double a = L.a;
        if (q >= 2) {
            const double s = std::pow(2.0, -(2 * a + 1));
            for (std::size_t k = 0; k < L.sym->nodes.size(); ++k) {
                v.push_back(0.5 * (1 + L.sym->nodes[k]));
                w.push_back(s * L.sym->weights[k]);
            }
            return;
        }
        double e1 = std::min(q, 0.5);
        {
            const double s = std::pow(e1, a + 1) * std::pow(2.0, -(a + 1));
            for (std::size_t k = 0; k < L.left->nodes.size(); ++k) {
                double vk = e1 * 0.5 * (1 + L.left->nodes[k]);
                v.push_back(vk);
                w.push_back(s * L.left->weights[k] * std::pow(1 - vk, a));
            }
        }
        for (double lo = e1; lo < 0.5;) {
            double hi = std::min(2 * lo, 0.5);
            if (hi > 0.5 - 1e-15) hi = 0.5;
            const double h = 0.5 * (hi - lo);
            for (std::size_t k = 0; k < L.plain->nodes.size(); ++k) {
                double vk = lo + h * (1 + L.plain->nodes[k]);
                v.push_back(vk);
                w.push_back(h * L.plain->weights[k] * std::pow(vk * (1 - vk), a));
            }
            lo = hi;
        }
        {
            const double s = std::pow(2.0, -2 * (a + 1));
            for (std::size_t k = 0; k < L.right->nodes.size(); ++k) {
                double vk = 0.5 + 0.25 * (1 + L.right->nodes[k]);
                v.push_back(vk);
                w.push_back(s * L.right->weights[k] * std::pow(vk, a));
            }
        }
    }

    // int_0^1 (A + B v)^{-P} dv
    double flat(double A, double B) {
        ++evals_;
        const double t = B / A;
        if (P_ == 1) return std::log1p(t) / B;
        return std::pow(A, 1 - P_) * (-std::expm1((1 - P_) * std::log1p(t))) / ((P_ - 1) * B);
    }

    double rec(std::size_t level, double A) {
        if (evals_ > cap_) throw QuadratureNotConverged("evaluation cap exceeded");
        if (level == levels_.size()) {
            ++evals_;
            return std::pow(A, -P_);
        }
        const Level& L = levels_[level];
        if (L.B == 0) return L.beta * rec(level + 1, A);
        if (level > 0 && level + 1 == levels_.size() && L.a == 0) return flat(A, L.B);
        auto& v = vbuf_[level];
        auto& w = wbuf_[level];
        rule(L, A / L.B, v, w);
        double s = 0;
        for (std::size_t k = 0; k < v.size(); ++k) s += w[k] * rec(level + 1, A + L.B * v[k]);
        return s;
    }

    std::vector<Level> levels_;
    std::vector<std::vector<double>> vbuf_, wbuf_;
    double P_;
    std::uint64_t cap_;
    std::uint64_t evals_ = 0;
};

}  // namespace

ProductIntegral product_cube_integral(double A, const std::vector<double>& B, const std::vector<double>& m, double P,
                                      const QuadratureSpec& quad) {
    if (!(A > 0)) throw InvalidArgument("A must be positive");
    if (B.size() != m.size()) throw InvalidArgument("B and m differ in length");
    for (double b : B)
        if (!(b >= 0) || !std::isfinite(b)) throw InvalidArgument("B must be finite and non-negative");
    if (quad.nodes < 8) throw InvalidArgument("at least 8 nodes per panel");
    Nested coarse(B, m, P, quad.nodes, quad.max_evaluations);
    double c = coarse.run(A);
    Nested fine(B, m, P, 2 * quad.nodes, quad.max_evaluations - std::min(quad.max_evaluations, coarse.evaluations()));
    double f = fine.run(A);
    ProductIntegral out;
    out.value = f;
    out.coarse = c;
    out.rel_err = std::abs(f - c) / std::abs(f);
    out.evaluations = coarse.evaluations() + fine.evaluations();
    if (!(out.rel_err <= quad.target_rel_err))
        throw QuadratureNotConverged("node doubling changed the integral by " + std::to_string(out.rel_err));
    return out;
}

double default_product_constant(const ProductSystem& ps, KernelType k) {
    ps.validate();
    // 1 / (prod B(m_i/2, m_i/2) * int_S prod |alpha_i(y)|^{m_i} dy); the sphere integral
    // follows from the Gaussian integral of the same weight.
    double kappa = 0, log_beta = 0, log_sphere = std::log(2.0) + (ps.d - ps.J) / 2.0 * std::log(std::numbers::pi);
    for (double mi : ps.m) {
        kappa += mi / 2;
        log_beta += std::lgamma(mi / 2) * 2 - std::lgamma(mi);
        log_sphere += mi / 2 * std::log(ps.root_norm2()) + std::lgamma((mi + 1) / 2);
    }
    log_sphere -= std::lgamma((ps.d + 2 * kappa) / 2);
    double poisson = std::exp(-log_beta - log_sphere);
    if (k == KernelType::Poisson) return poisson;
    return poisson / (ps.d + 2 * kappa - 2);
}

ProductIntegral product_integral(const ProductSystem& ps, KernelType k, const Vec& x, const Vec& y,
                                 const QuadratureSpec& quad) {
    ps.validate();
    if (static_cast<int>(x.size()) != ps.d || static_cast<int>(y.size()) != ps.d)
        throw InvalidArgument("point dimension differs from d");
    double A = dist2(x, y);
    if (!(A > 0)) throw InvalidArgument("x must differ from y");
    std::vector<double> B(ps.J);
    double kappa = 0;
    for (int i = 0; i < ps.J; ++i) {
        B[i] = ps.shift(i, x, y);
        kappa += ps.m[i] / 2;
    }
    double P = (k == KernelType::Poisson ? ps.d / 2.0 : ps.d / 2.0 - 1) + kappa;
    return product_cube_integral(A, B, ps.m, P, quad);
}

KernelValue product_poisson(const ProductSystem& ps, const Vec& x, const Vec& y, const QuadratureSpec& quad,
                            const ProductConstants& c) {
    if (norm2(x) >= 1) throw InvalidArgument("|x| must be < 1");
    if (std::abs(norm(y) - 1) > 1e-12) throw InvalidArgument("|y| must be 1");
    ProductIntegral I = product_integral(ps, KernelType::Poisson, x, y, quad);
    double C = c.poisson > 0 ? c.poisson : default_product_constant(ps, KernelType::Poisson);
    KernelValue v;
    v.value = C * (1 - norm2(x)) * I.value;
    v.achieved_relative_error = I.rel_err;
    return v;
}

KernelValue product_newton(const ProductSystem& ps, const Vec& x, const Vec& y, const QuadratureSpec& quad,
                           const ProductConstants& c) {
    ProductIntegral I = product_integral(ps, KernelType::Newton, x, y, quad);
    double C = c.newton > 0 ? c.newton : default_product_constant(ps, KernelType::Newton);
    KernelValue v;
    v.value = C * I.value;
    v.achieved_relative_error = I.rel_err;
    return v;
}

double t_integral(double A, double B, double m, double M, const QuadratureSpec& quad) {
    if (!(A > 0) || !(B >= 0)) throw InvalidArgument("need A > 0 and B >= 0");
    if (!(m > 0)) throw InvalidArgument("need m > 0");
    if (M < m / 2) throw UnsupportedRegime("M < m/2");
    return product_cube_integral(A, {B}, {m}, M, quad).value;
}

double t_asymptotic(double A, double B, double m, double M) {
    if (!(A > 0) || !(B > 0)) throw InvalidArgument("need A, B > 0");
    if (M < m / 2) throw UnsupportedRegime("M < m/2");
    if (M == m / 2) return std::log(2 * (A + B) / A) * std::pow(A + B, -m / 2);
    return std::pow(A, -(M - m / 2)) * std::pow(A + B, -m / 2);
}

namespace {
double reflected_log_product(const ProductSystem& ps, const Vec& x, const Vec& y, double A) {
    double l = 0;
    for (int i = 0; i < ps.J; ++i) l += ps.m[i] / 2 * std::log(A + ps.shift(i, x, y));
    return l;
}
}  // namespace

double product_estimate_poisson(const ProductSystem& ps, const Vec& x, const Vec& y) {
    ps.validate();
    double A = dist2(x, y);
    if (!(A > 0)) throw InvalidArgument("x must differ from y");
    return (1 - norm2(x)) * std::exp(-ps.d / 2.0 * std::log(A) - reflected_log_product(ps, x, y, A));
}

double product_estimate_newton(const ProductSystem& ps, const Vec& x, const Vec& y) {
    ps.validate();
    double A = dist2(x, y);
    if (!(A > 0)) throw InvalidArgument("x must differ from y");
    double l = -reflected_log_product(ps, x, y, A);
    if (ps.d > 2) return std::exp(-(ps.d - 2) / 2.0 * std::log(A) + l);
    double bmin = std::numeric_limits<double>::infinity();
    for (int i = 0; i < ps.J; ++i) bmin = std::min(bmin, ps.shift(i, x, y));
    return std::log(2 * (A + bmin) / A) * std::exp(l);
}

RootSystem product_root_system(const ProductSystem& ps) {
    ps.validate();
    std::vector<RVec> simple;
    std::vector<Rational> k;
    for (int i = 0; i < ps.J; ++i) {
        simple.push_back(exact(ps.root(i)));
        k.push_back(exact(ps.m[i] / 2));
    }
    return root_system_from_simple_roots(simple, k);
}

std::vector<ProductSample> product_sample_pairs(const ProductSystem& ps, KernelType kind, ProductStrategy s,
                                                std::size_t n, std::uint64_t seed) {
    ps.validate();
    std::vector<ProductSample> out;
    out.reserve(n);
    for (std::size_t idx = 0; idx < n; ++idx) {
        auto g = stream_rng(seed, idx);
        std::normal_distribution<double> N;
        std::uniform_real_distribution<double> U(0, 1);
        auto gaussian = [&] {
            Vec v(ps.d);
            for (double& c : v) c = N(g);
            return v;
        };
        auto unit = [&] {
            Vec v = gaussian();
            return scale(v, 1 / norm(v));
        };
        auto ball = [&] { return scale(unit(), std::pow(U(g), 1.0 / ps.d)); };
        ProductStrategy st = s;
        if (s == ProductStrategy::Mixed) st = static_cast<ProductStrategy>(idx % 3);
        Vec x, y;
        if (st == ProductStrategy::NearDiagonal) {
            double r = std::pow(10.0, -1 - 4 * U(g));
            if (kind == KernelType::Poisson) {
                y = unit();
                x = axpy(scale(y, 1 - r), r / 2, unit());
            } else {
                x = ball();
                y = axpy(x, r, unit());
            }
        } else {
            x = ball();
            y = kind == KernelType::Poisson ? unit() : ball();
        }
        if (st == ProductStrategy::WallStratified) {
            int i = static_cast<int>(idx / 3 % ps.J);
            double e = std::pow(10.0, -1 - 4 * U(g));
            Vec& t = (idx / 3 / ps.J) % 2 ? y : x;
            if (ps.variant == ProductVariant::A1) {
                double c = 0.5 * (t[2 * i] + t[2 * i + 1]);
                t[2 * i] = c + e / 2;
                t[2 * i + 1] = c - e / 2;
            } else {
                t[i] = e;
            }
            if (kind == KernelType::Poisson) y = scale(y, 1 / norm(y));
            if (norm(x) >= 1) x = scale(x, 0.99 / norm(x));
        }
        out.push_back({ps.project_to_chamber(x), ps.project_to_chamber(y), st});
    }
    return out;
}

ProductSweep product_sweep(const ProductSystem& ps, KernelType k, const std::vector<ProductSample>& samples,
                           const QuadratureSpec& quad, int threads) {
    ProductSweep sw;
    sw.rows.resize(samples.size());
    const double C = default_product_constant(ps, k);
    parallel_for(samples.size(), threads, [&](std::size_t i) {
        ProductRow& row = sw.rows[i];
        row.x = samples[i].x;
        row.y = samples[i].y;
        try {
            ProductIntegral I = product_integral(ps, k, row.x, row.y, quad);
            double f = k == KernelType::Poisson ? (1 - norm2(row.x)) : 1.0;
            row.kernel = C * f * I.value;
            row.kernel_coarse = C * f * I.coarse;
            row.estimate = k == KernelType::Poisson ? product_estimate_poisson(ps, row.x, row.y)
                                                    : product_estimate_newton(ps, row.x, row.y);
            row.ratio = row.kernel / row.estimate;
        } catch (const Error& e) {
            row.ok = false;
            row.error = e.what();
        }
    });
    sw.min_ratio = sw.min_ratio_coarse = std::numeric_limits<double>::infinity();
    sw.max_ratio = sw.max_ratio_coarse = 0;
    for (const auto& row : sw.rows) {
        if (!row.ok) {
            ++sw.failures;
            continue;
        }
        double rc = row.kernel_coarse / row.estimate;
        sw.min_ratio = std::min(sw.min_ratio, row.ratio);
        sw.max_ratio = std::max(sw.max_ratio, row.ratio);
        sw.min_ratio_coarse = std::min(sw.min_ratio_coarse, rc);
        sw.max_ratio_coarse = std::max(sw.max_ratio_coarse, rc);
    }
    return sw;
}

}  // namespace dunklpot

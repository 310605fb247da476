#include "dunklpot/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "dunklpot/errors.hpp"
#include "dunklpot/multiprecision.hpp"

namespace dunklpot {

namespace {

using mp::Real;

inline double to_d(double v) { return v; }
inline double to_d(const Real& v) { return v.to_double(); }
template <class T> T from_rat(const Rational& q);
template <> double from_rat<double>(const Rational& q) { return q.get_d(); }
template <> Real from_rat<Real>(const Rational& q) { return Real(q); }
inline double sqrt_(double v) { return std::sqrt(v); }
inline Real sqrt_(const Real& v) { return mp::sqrt(v); }
inline double log_(double v) { return std::log(v); }
inline Real log_(const Real& v) { return mp::log(v); }

enum class Profile { Power, Log };

struct SumShape {
    Profile profile = Profile::Power;
    int exponent = 0;       // terms |x - w y|^{-exponent}
    int pi_y_power = -1;    // -1 divides by pi(y), +1 multiplies
    bool ball_factor = false;
};

struct Certified {
    double value = 0;
    double rel_err = std::numeric_limits<double>::infinity();
    double cancellation = 0;  // 0 when unknown
    bool ok = false;
};

template <class T>
T inv_power(const T& s, int p) {
    T r = 1.0;
    for (int k = 0; k < p / 2; ++k) r *= s;
    if (p % 2) r *= sqrt_(s);
    return T(1.0) / r;
}

template <class T>
Certified alternating(const RootSystem& rs, const Vec& x, const Vec& y, const SumShape& shape, double u) {
    const int d = rs.ambient_dim();
    const auto& W = rs.weyl();
    std::vector<T> xt(x.begin(), x.end()), yt(y.begin(), y.end()), z(d);
    std::vector<double> ez(d);
    T S = 0.0;
    double abs_sum = 0, err = 0;
    std::vector<T> mt;
    for (const auto& w : W) {
        if (w.signed_permutation) {
            for (int k = 0; k < d; ++k) {
                z[k] = yt[w.perm[k]];
                if (w.perm_sign[k] < 0) z[k] = -z[k];
                ez[k] = 0;
            }
        } else {
            for (int k = 0; k < d; ++k) {
                T acc = 0.0;
                double mag = 0;
                for (int j = 0; j < d; ++j) {
                    const Rational& m = w.matrix[k * d + j];
                    if (m == 0) continue;
                    acc += from_rat<T>(m) * yt[j];
                    mag += std::abs(w.matrix_f[k * d + j] * y[j]);
                }
                z[k] = acc;
                ez[k] = (d + 2) * u * mag;
            }
        }
        T s = 0.0;
        double es = 0;
        for (int k = 0; k < d; ++k) {
            T dk = xt[k] - z[k];
            double dd = std::abs(to_d(dk));
            double ed = ez[k] + u * (std::abs(x[k]) + std::abs(to_d(z[k])));
            s += dk * dk;
            es += 2 * dd * ed + ed * ed;
        }
        double sd = to_d(s);
        if (sd == 0) throw DegenerateWall("x coincides with a point of the orbit of y");
        es += (d + 1) * u * sd;
        double ds = es / sd;
        if (ds > 1e-3) return {};
        T t;
        double tmag;
        if (shape.profile == Profile::Power) {
            const int p = shape.exponent;
            t = inv_power(s, p);
            tmag = std::abs(to_d(t));
            err += tmag * (0.5 * p * ds * (1 + p * ds) + (p + 4) * u);
        } else {
            t = log_(s) * T(0.5);
            tmag = std::abs(to_d(t));
            err += 0.5 * ds * (1 + ds) + 2 * u * (tmag + 1);
        }
        if (w.sign > 0)
            S += t;
        else
            S -= t;
        abs_sum += tmag;
    }
    err += (W.size() + 1) * u * abs_sum;
    double Sd = to_d(S);
    if (!(std::abs(Sd) > 2 * err)) {
        Certified unresolved;
        unresolved.cancellation = abs_sum / std::abs(Sd);
        return unresolved;
    }
    double rel = err / (std::abs(Sd) - err);

    T ratio = S;
    auto pi_of = [&](const std::vector<T>& v, const Vec& vd, double& rel_out) {
        T p = 1.0;
        rel_out = 0;
        for (std::size_t a = 0; a < rs.num_positive_roots(); ++a) {
            const RVec& al = rs.positive_roots()[a];
            T s = 0.0;
            double mag = 0;
            for (int k = 0; k < d; ++k) {
                if (al[k] == 0) continue;
                s += from_rat<T>(al[k]) * v[k];
                mag += std::abs(rs.positive_roots_f()[a][k] * vd[k]);
            }
            double sd = std::abs(to_d(s));
            if (sd == 0) return p * T(0.0);
            rel_out += (d + 2) * u * mag / sd + u;
            p *= s;
        }
        return p;
    };
    double rx = 0, ry = 0;
    T px = pi_of(xt, x, rx);
    T py = pi_of(yt, y, ry);
    if (to_d(px) == 0 || (shape.pi_y_power < 0 && to_d(py) == 0)) return {};
    ratio /= px;
    if (shape.pi_y_power < 0)
        ratio /= py;
    else
        ratio *= py;
    rel += rx + ry + 3 * u;
    if (shape.ball_factor) {
        T n2 = 0.0;
        double m2 = 0;
        for (int k = 0; k < d; ++k) {
            n2 += xt[k] * xt[k];
            m2 += x[k] * x[k];
        }
        T f = T(1.0) - n2;
        double fd = to_d(f);
        if (fd <= 0) return {};
        rel += (d + 3) * u * (1 + m2) / fd;
        ratio *= f;
    }
    Certified c;
    c.value = to_d(ratio);
    c.rel_err = rel * 1.01 + 2 * std::numeric_limits<double>::epsilon();
    c.cancellation = abs_sum / std::abs(Sd);
    c.ok = std::isfinite(c.value);
    return c;
}

int next_tier(int bits, int need) {
    int t = bits < 128 ? 128 : bits * 2;
    while (t < need) t *= 2;
    return t;
}

KernelValue certify(const RootSystem& rs, const Vec& x, const Vec& y, const SumShape& shape, const PrecisionPolicy& pol,
                    double prefactor) {
    int bits = 53;
    double last_cancel = 0;
    for (;;) {
        Certified c;
        if (bits == 53) {
            c = alternating<double>(rs, x, y, shape, std::ldexp(1.0, -53));
        } else {
            mp::PrecisionScope scope(bits);
            c = alternating<Real>(rs, x, y, shape, std::ldexp(1.0, -bits));
        }
        // the double-valued prefactor contributes a few units of roundoff
        double rel = c.rel_err + 4 * std::numeric_limits<double>::epsilon();
        if (c.cancellation > 0) last_cancel = c.cancellation;
        if (c.ok && rel <= pol.target_rel_err) {
            KernelValue v;
            v.value = c.value * prefactor;
            v.achieved_relative_error = rel;
            v.precision_bits_used = bits;
            v.cancellation_ratio = c.cancellation;
            return v;
        }
        if (bits >= pol.max_bits)
            throw PrecisionExhausted("target " + std::to_string(pol.target_rel_err) + " not met at " +
                                     std::to_string(bits) + " bits (cancellation ratio " +
                                     std::to_string(last_cancel) + ")",
                                     last_cancel);
        int need = bits * 2;
        if (c.ok && std::isfinite(c.rel_err))
            need = bits + static_cast<int>(std::ceil(std::log2(c.rel_err / pol.target_rel_err))) + 16;
        bits = std::min(next_tier(bits, need), std::max(pol.max_bits, 53));
    }
}

void check_off_walls(const RootSystem& rs, const Vec& v, const char* which) {
    for (std::size_t a = 0; a < rs.num_positive_roots(); ++a) {
        double p = rs.pairing(a, v);
        double mag = 0;
        for (std::size_t k = 0; k < v.size(); ++k) mag += std::abs(rs.positive_roots_f()[a][k] * v[k]);
        if (std::abs(p) > 4 * v.size() * std::numeric_limits<double>::epsilon() * mag) continue;
        if (rs.pairing(a, exact(v)) == 0) throw DegenerateWall(std::string(which) + " lies on a wall");
    }
}

void check_query(const KernelQuery& q) {
    if (!q.system) throw InvalidArgument("query without root system");
    const auto d = static_cast<std::size_t>(q.system->ambient_dim());
    if (q.x.size() != d || q.y.size() != d) throw InvalidArgument("point dimension differs from ambient dimension");
    for (double v : q.x)
        if (!std::isfinite(v)) throw InvalidArgument("non-finite coordinate");
    for (double v : q.y)
        if (!std::isfinite(v)) throw InvalidArgument("non-finite coordinate");
    if (!q.system->complex_case()) throw InvalidArgument("alternating formulas need multiplicity 1");
    if (q.policy.target_rel_err <= 0) throw InvalidArgument("target relative error must be positive");
}

void check_poisson_points(const KernelQuery& q) {
    if (norm2(q.x) >= 1) throw InvalidArgument("|x| must be < 1");
    if (std::abs(norm(q.y) - 1) > 1e-12) throw InvalidArgument("|y| must be 1");
}

}  // namespace

double sphere_area(int d) { return 2 * std::pow(std::numbers::pi, d / 2.0) / std::tgamma(d / 2.0); }

double sphere_area(const RootSystem& rs, const Normalization& n) {
    return n.sphere_area > 0 ? n.sphere_area : sphere_area(rs.kernel_dim());
}

double pi_two_rho(const RootSystem& rs) {
    RVec two_rho = scale(rs.rho(), Rational(2));
    return pi_value(rs, two_rho).get_d();
}

KernelValue poisson_complex(const KernelQuery& q) {
    check_query(q);
    check_poisson_points(q);
    const RootSystem& rs = *q.system;
    check_off_walls(rs, q.x, "x");
    check_off_walls(rs, q.y, "y");
    SumShape shape{Profile::Power, rs.kernel_dim(), -1, true};
    double pre = 1.0 / (rs.weyl_order() * sphere_area(rs, q.normalization));
    KernelValue v = certify(rs, q.x, q.y, shape, q.policy, pre);
    if (!(v.value > 0)) throw PrecisionExhausted("non-positive Poisson value");
    return v;
}

KernelValue poisson_density(const KernelQuery& q) {
    check_query(q);
    check_poisson_points(q);
    const RootSystem& rs = *q.system;
    check_off_walls(rs, q.x, "x");
    SumShape shape{Profile::Power, rs.kernel_dim(), +1, true};
    double pre = 1.0 / (rs.weyl_order() * sphere_area(rs, q.normalization));
    return certify(rs, q.x, q.y, shape, q.policy, pre);
}

KernelValue newton_complex(const KernelQuery& q) {
    check_query(q);
    const RootSystem& rs = *q.system;
    const int d = rs.kernel_dim();
    if (d < 2) throw InvalidArgument("Newton kernel needs dimension >= 2");
    if (q.x == q.y) throw InvalidArgument("x must differ from y");
    check_off_walls(rs, q.x, "x");
    check_off_walls(rs, q.y, "y");
    const double W = static_cast<double>(rs.weyl_order());
    if (d == 2) {
        SumShape shape{Profile::Log, 0, -1, false};
        // sum of eps(w) ln|x - w y| over 2 pi pi(x) pi(y)
        return certify(rs, q.x, q.y, shape, q.policy, 1.0 / (2 * std::numbers::pi));
    }
    SumShape shape{Profile::Power, d - 2, -1, false};
    double pre = 1.0 / ((2.0 - d) * sphere_area(rs, q.normalization) * W);
    return certify(rs, q.x, q.y, shape, q.policy, pre);
}

double poisson_at_origin(const RootSystem& rs, const Normalization& n) {
    const int d = rs.kernel_dim();
    const double g = rs.kappa().get_d();
    double poch = std::exp(std::lgamma(d / 2.0 + g) - std::lgamma(d / 2.0));
    return std::pow(2.0, 2 * g) * poch / (rs.weyl_order() * sphere_area(rs, n) * pi_two_rho(rs));
}

double newton_at_origin(const RootSystem& rs, const Vec& x) {
    const int d = rs.kernel_dim();
    const double g = rs.kappa().get_d();
    if (!(d + 2 * g > 2)) throw InvalidArgument("need d + 2 gamma > 2");
    double r = norm(x);
    if (r == 0) throw InvalidArgument("x must be nonzero");
    double logc = (2 * g - 2) * std::log(2.0) + std::lgamma(d / 2.0 + g - 1) - (d / 2.0) * std::log(std::numbers::pi) -
                  (d - 2 + 2 * g) * std::log(r);
    return std::exp(logc) / (rs.weyl_order() * pi_two_rho(rs));
}

double heat_at_origin(const RootSystem& rs, double t, const Vec& x) {
    if (!(t > 0)) throw InvalidArgument("t must be positive");
    const int d = rs.kernel_dim();
    const double g = rs.kappa().get_d();
    double logc = -(d / 2.0 + g) * std::log(t) - norm2(x) / (4 * t) - d * std::log(2.0) -
                  (d / 2.0) * std::log(std::numbers::pi);
    return std::exp(logc) / (rs.weyl_order() * pi_two_rho(rs));
}

double psi(const RootSystem& rs, std::size_t g1, std::size_t g2, const Vec& x, const Vec& y) {
    return 2 * rs.pairing(g1, x) * rs.pairing(g2, y) / dist2(x, y);
}

double newton_plane_psi(const RootSystem& rs, const Vec& x, const Vec& y, int bits) {
    if (rs.kernel_dim() != 2) throw InvalidArgument("plane formulas need kernel dimension 2");
    for (const auto& n2 : rs.norms2())
        if (n2 != 2) throw InvalidArgument("plane formulas assume |alpha|^2 = 2");
    if (!(rs.rank() == 1 || (rs.rank() == 2 && rs.num_positive_roots() == 3)))
        throw InvalidArgument("plane formulas cover A1 and A2");
    mp::PrecisionScope scope(bits);
    const int d = rs.ambient_dim();
    Real r2 = 0.0;
    for (int k = 0; k < d; ++k) {
        Real t = Real(x[k]) - Real(y[k]);
        r2 += t * t;
    }
    auto pair = [&](std::size_t a, const Vec& v) {
        Real s = 0.0;
        for (int k = 0; k < d; ++k)
            if (rs.positive_roots()[a][k] != 0) s += Real(rs.positive_roots()[a][k]) * Real(v[k]);
        return s;
    };
    auto ps = [&](std::size_t a, std::size_t b) { return Real(2.0) * pair(a, x) * pair(b, y) / r2; };
    const Real pi = mp::pi();
    if (rs.rank() == 1) {
        Real p = ps(0, 0);
        return (-(mp::log1p(p) / p) / (Real(2.0) * pi * r2)).to_double();
    }
    Real paa = ps(0, 0), pbb = ps(1, 1), phh = ps(2, 2), pab = ps(0, 1), pba = ps(1, 0);
    Real L = mp::log1p(paa) + mp::log1p(pbb) + mp::log1p(phh) - mp::log1p(paa + pbb + pab) -
             mp::log1p(paa + pbb + pba);
    Real r6 = r2 * r2 * r2;
    return (-(Real(2.0) / pi) * L / (r6 * paa * pbb * phh)).to_double();
}

double reflected_distance(const RootSystem& rs, std::size_t pos, const Vec& x, const Vec& y) {
    double v = dist2(x, y) + 4 * rs.pairing(pos, x) * rs.pairing(pos, y) / rs.norms2()[pos].get_d();
    return std::sqrt(std::max(v, 0.0));
}

double phi_alpha(const RootSystem& rs, std::size_t pos, const Vec& x, const Vec& y) {
    return std::max(dist(x, y), rs.pairing(pos, y) / rs.norms()[pos]);
}

namespace {
double reflected_product(const RootSystem& rs, const Vec& x, const Vec& y, EstimatorVariant v) {
    double logp = 0;
    for (std::size_t a = 0; a < rs.num_positive_roots(); ++a) {
        double f = v == EstimatorVariant::Phi ? phi_alpha(rs, a, x, y) : reflected_distance(rs, a, x, y);
        logp += 2 * rs.multiplicities()[a].get_d() * std::log(f);
    }
    return logp;
}
}  // namespace

double omega_poisson(const RootSystem& rs, const Vec& x, const Vec& y, EstimatorVariant v) {
    const int d = rs.kernel_dim();
    double l = -d * std::log(dist(x, y)) - reflected_product(rs, x, y, v);
    return (1 - norm2(x)) * std::exp(l);
}

double omega_newton(const RootSystem& rs, const Vec& x, const Vec& y, EstimatorVariant v) {
    const int d = rs.kernel_dim();
    double l = -(d - 2) * std::log(dist(x, y)) - reflected_product(rs, x, y, v);
    return std::exp(l);
}

FramingBounds framing_bounds(const RootSystem& rs, const Vec& x, const Vec& y) {
    double lo = std::numeric_limits<double>::infinity(), hi = 0;
    for (const auto& w : rs.weyl()) {
        double s = dist(x, w.apply(y));
        lo = std::min(lo, s);
        hi = std::max(hi, s);
    }
    const double e = rs.kernel_dim() + 2 * rs.kappa().get_d();
    const double f = 1 - norm2(x);
    return {f * std::pow(hi, -e), f * std::pow(lo, -e)};
}

double rank1_ratio_oracle(int d, const Vec& x, const Vec& y, const Vec& alpha) {
    const double c = 4 / norm2(alpha);
    const double ax = dot(alpha, x), ay = dot(alpha, y);
    if (!(ax * ay > 0)) throw InvalidArgument("need alpha(x) alpha(y) > 0");
    const double a2 = dist2(x, y);
    const double b2 = a2 + c * ax * ay;
    // sum_{k<d} b^{2k} a^{2(d-1-k)} / (a^d b^d (a^d + b^d)), scaled by a^2 to stay in range
    const double t = b2 / a2;
    double sum = 0, pw = 1;
    for (int k = 0; k < d; ++k) {
        sum += pw;
        pw *= t;
    }
    const double ad = std::pow(a2, d / 2.0), bd = std::pow(b2, d / 2.0);
    return c * sum * std::pow(a2, d - 1) / (ad * bd * (ad + bd));
}

}  // namespace dunklpot

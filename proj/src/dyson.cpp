#include "dunklpot/dyson.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "dunklpot/errors.hpp"
#include "dunklpot/gauss_jacobi.hpp"
#include "dunklpot/parallel.hpp"
#include "dunklpot/random.hpp"

namespace dunklpot {

void SdeConfig::validate() const {
    if (!(h0 > 0)) throw InvalidArgument("h0 must be positive");
    if (!(delta_exit > 0 && delta_exit <= 1e-3)) throw InvalidArgument("delta_exit must lie in (0, 1e-3]");
    if (!(c_w > 0 && c_w <= 0.5)) throw InvalidArgument("c_w must lie in (0, 1/2]");
    if (!(c_b > 0)) throw InvalidArgument("c_b must be positive");
    if (max_halvings < 0) throw InvalidArgument("max_halvings must be non-negative");
}

Vec drift(const RootSystem& rs, const Vec& x) {
    Vec b(x.size(), 0.0);
    for (std::size_t a = 0; a < rs.num_positive_roots(); ++a) {
        double p = rs.pairing(a, x);
        if (p == 0) throw OnWall("x lies on the wall of root " + std::to_string(a));
        b = axpy(b, rs.multiplicities()[a].get_d() / p, rs.positive_roots_f()[a]);
    }
    return b;
}

namespace {

double min_simple(const RootSystem& rs, const Vec& x) {
    double m = std::numeric_limits<double>::infinity();
    for (int i = 0; i < rs.rank(); ++i) m = std::min(m, rs.pairing(i, x));
    return m;
}

void check_start(const RootSystem& rs, const Vec& x0) {
    if (static_cast<int>(x0.size()) != rs.ambient_dim()) throw InvalidArgument("x0 has the wrong dimension");
    if (!(norm2(x0) < 1)) throw InvalidArgument("|x0| must be < 1");
    if (!(min_simple(rs, x0) > 0)) throw NotInChamber("x0 must be an interior chamber point");
}

}  // namespace

ExitResult simulate_exit(const RootSystem& rs, const Vec& x0, const SdeConfig& cfg, std::uint64_t path) {
    cfg.validate();
    check_start(rs, x0);
    auto g = stream_rng(cfg.seed, path);
    std::normal_distribution<double> N;
    const std::size_t d = x0.size();
    ExitResult out;
    Vec X = x0, next(d);
    for (; out.steps < cfg.max_steps; ++out.steps) {
        const double r = norm(X);
        if (r >= 1 - cfg.delta_exit) {
            out.y = scale(X, 1 / r);
            return out;
        }
        const double m = min_simple(rs, X);
        double h = std::min({cfg.h0, cfg.c_w * m * m, cfg.c_b * (1 - r) * (1 - r)});
        const Vec b = drift(rs, X);
        bool moved = false;
        for (int k = 0; k <= cfg.max_halvings && !moved; ++k) {
            const double s = std::sqrt(h);
            for (std::size_t j = 0; j < d; ++j) next[j] = X[j] + b[j] * h + s * N(g);
            if (min_simple(rs, next) > 0) {
                moved = true;
            } else {
                h /= 2;
                ++out.retries;
            }
        }
        if (!moved) {
            out.rejected = true;
            out.reason = "left the chamber after " + std::to_string(cfg.max_halvings) + " halvings";
            return out;
        }
        X.swap(next);
    }
    out.rejected = true;
    out.reason = "max steps exceeded";
    return out;
}

int ExitBins::bin_of(const Vec& y) const {
    double t = std::atan2(dot(y, u2), dot(y, u1));
    if (t < 0) t += 2 * std::numbers::pi;
    if (t > angle) t = (t - angle < 2 * std::numbers::pi - t) ? angle : 0;
    int ti = std::min(n_angle - 1, static_cast<int>(t / angle * n_angle));
    if (dim == 2) return ti;
    double z = std::clamp(dot(y, axis), -1.0, 1.0);
    int zi = std::min(n_height - 1, static_cast<int>((z + 1) / 2 * n_height));
    return zi * n_angle + ti;
}

Vec ExitBins::point(double z, double t) const {
    Vec p = axpy(scale(u1, std::cos(t)), std::sin(t), u2);
    if (dim == 2) return p;
    return axpy(scale(p, std::sqrt(std::max(0.0, 1 - z * z))), z, axis);
}

ExitBins make_exit_bins(const RootSystem& rs, int bins) {
    const int d = rs.ambient_dim();
    if (rs.span_only() || (d != 2 && d != 3) || rs.rank() > 2)
        throw UnsupportedGeometry("exit bins need a chamber in R^2, or a wedge around an axis in R^3");
    if (bins < 1) throw InvalidArgument("bins must be positive");
    ExitBins b;
    b.dim = d;
    if (d == 2) {
        b.n_angle = bins;
    } else {
        int na = static_cast<int>(std::ceil(std::sqrt(bins / 2.0)));
        while (bins % na) ++na;
        b.n_angle = na;
        b.n_height = bins / na;
    }
    auto unit = [](Vec v) { return scale(v, 1 / norm(v)); };
    auto cross = [](const Vec& a, const Vec& c) {
        return Vec{a[1] * c[2] - a[2] * c[1], a[2] * c[0] - a[0] * c[2], a[0] * c[1] - a[1] * c[0]};
    };
    // a unit vector orthogonal to v in R^d
    auto perp = [&](const Vec& v) {
        if (d == 2) return unit(Vec{-v[1], v[0]});
        Vec t{1, 0, 0};
        if (std::abs(v[0]) > 0.9 * norm(v)) t = {0, 1, 0};
        return unit(cross(v, t));
    };
    std::vector<Vec> simple;
    for (int i = 0; i < rs.rank(); ++i) simple.push_back(rs.positive_roots_f()[i]);
    if (simple.empty()) {
        b.u1 = d == 2 ? Vec{1, 0} : Vec{1, 0, 0};
        if (d == 3) b.axis = {0, 0, 1};
        b.u2 = d == 2 ? Vec{0, 1} : Vec{0, 1, 0};
        b.angle = 2 * std::numbers::pi;
        return b;
    }
    const Vec a1 = unit(simple[0]);
    if (d == 3) b.axis = simple.size() == 2 ? unit(cross(simple[0], simple[1])) : perp(a1);
    b.u2 = a1;
    b.u1 = d == 2 ? perp(a1) : unit(cross(b.u2, b.axis));
    if (simple.size() == 1) {
        b.angle = std::numbers::pi;
        return b;
    }
    if (dot(simple[1], b.u1) < 0) {
        b.u1 = scale(b.u1, -1);
        if (d == 3) b.axis = scale(b.axis, -1);
    }
    b.angle = std::atan2(dot(simple[1], b.u1), -dot(simple[1], b.u2));
    return b;
}

std::vector<double> predicted_bin_masses(const RootSystem& rs, const Vec& x0, const ExitBins& b, int nodes) {
    check_start(rs, x0);
    const QuadratureRule& gl = gauss_jacobi(nodes, 0, 0);
    std::vector<double> out(b.count(), 0.0);
    KernelQuery q;
    q.system = &rs;
    q.x = x0;
    q.policy.target_rel_err = 1e-9;
    for (int zi = 0; zi < b.n_height; ++zi)
        for (int ti = 0; ti < b.n_angle; ++ti) {
            const double t0 = b.angle * ti / b.n_angle, t1 = b.angle * (ti + 1) / b.n_angle;
            const double z0 = -1 + 2.0 * zi / b.n_height, z1 = -1 + 2.0 * (zi + 1) / b.n_height;
            double s = 0;
            for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
                const double t = 0.5 * (t0 + t1) + 0.5 * (t1 - t0) * gl.nodes[i];
                if (b.dim == 2) {
                    q.y = b.point(0, t);
                    s += gl.weights[i] * poisson_density(q).value;
                    continue;
                }
                for (std::size_t j = 0; j < gl.nodes.size(); ++j) {
                    const double z = 0.5 * (z0 + z1) + 0.5 * (z1 - z0) * gl.nodes[j];
                    q.y = b.point(z, t);
                    s += gl.weights[i] * gl.weights[j] * 0.5 * (z1 - z0) * poisson_density(q).value;
                }
            }
            out[zi * b.n_angle + ti] = s * 0.5 * (t1 - t0);
        }
    return out;
}

ExitHistogram exit_law_test(const RootSystem& rs, const Vec& x0, std::size_t n_paths, int bins, const SdeConfig& cfg,
                            int threads) {
    if (n_paths < 10'000) throw InvalidArgument("n_paths must be >= 10^4");
    cfg.validate();
    ExitBins geo = make_exit_bins(rs, bins);
    ExitHistogram h;
    h.system_id = rs.id();
    h.x0 = x0;
    h.config = cfg;
    h.bins = geo.count();
    h.total_paths = n_paths;
    std::vector<int> bin(n_paths, -1);
    std::vector<std::uint64_t> steps(n_paths, 0);
    parallel_for(n_paths, threads, [&](std::size_t i) {
        ExitResult r = simulate_exit(rs, x0, cfg, i);
        steps[i] = r.steps;
        if (!r.rejected) bin[i] = geo.bin_of(r.y);
    });
    h.counts.assign(h.bins, 0);
    double step_sum = 0;
    for (std::size_t i = 0; i < n_paths; ++i) {
        step_sum += static_cast<double>(steps[i]);
        if (bin[i] < 0) ++h.rejected;
        else ++h.counts[bin[i]];
    }
    h.mean_steps = step_sum / n_paths;
    const std::vector<double> raw = predicted_bin_masses(rs, x0, geo);
    for (double m : raw) h.predicted_mass += m;
    const double accepted = static_cast<double>(n_paths - h.rejected);
    for (int k = 0; k < h.bins; ++k) {
        h.predicted.push_back(raw[k] / h.predicted_mass);
        h.empirical.push_back(accepted > 0 ? h.counts[k] / accepted : 0);
        h.tv_distance += 0.5 * std::abs(h.empirical[k] - h.predicted[k]);
        const double e = h.predicted[k] * accepted;
        if (e > 0) h.chi_square += (h.counts[k] - e) * (h.counts[k] - e) / e;
    }
    h.degrees_of_freedom = h.bins - 1;
    return h;
}

json histogram_to_json(const ExitHistogram& h) {
    return {{"schema_version", 1},
            {"version", library_version()},
            {"system", h.system_id},
            {"x0", h.x0},
            {"config",
             {{"h0", h.config.h0},
              {"c_w", h.config.c_w},
              {"c_b", h.config.c_b},
              {"max_steps", h.config.max_steps},
              {"max_halvings", h.config.max_halvings},
              {"delta_exit", h.config.delta_exit},
              {"seed", h.config.seed}}},
            {"bins", h.bins},
            {"total_paths", h.total_paths},
            {"rejected", h.rejected},
            {"counts", h.counts},
            {"empirical", h.empirical},
            {"predicted", h.predicted},
            {"predicted_mass", h.predicted_mass},
            {"tv_distance", h.tv_distance},
            {"chi_square", h.chi_square},
            {"degrees_of_freedom", h.degrees_of_freedom},
            {"mean_steps", h.mean_steps}};
}

}  // namespace dunklpot

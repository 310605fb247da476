#include "dunklpot/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>

#include "dunklpot/errors.hpp"
#include "dunklpot/parallel.hpp"
#include "dunklpot/random.hpp"

namespace dunklpot {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

std::string Subregion::label() const {
    std::string s = "{";
    for (std::size_t k = 0; k < sub.simple.size(); ++k) s += (k ? "," : "") + std::to_string(sub.simple[k] + 1);
    return s + "}";
}

double default_classification_c(const RootSystem& rs) {
    double k0 = rs.K0().get_d();
    double w = static_cast<double>(rs.weyl().size());
    double c = std::min(1.0, 1.0 / (4 * rs.C1()));
    return std::min(c, std::sqrt(k0 / 2) / std::pow(2 * w, 1.0 / rs.kernel_dim()));
}

Subregion classify_subregion(const RootSystem& rs, const Vec& x, const Vec& y, double c) {
    if (!(c > 0)) throw InvalidArgument("c must be positive");
    const double D = dist(x, y);
    if (!(D > 0)) throw InvalidArgument("x must differ from y");
    const int r = rs.rank();
    const double N = rs.height_bound();
    double ck = c / std::pow(N, r);
    for (int step = 0; step <= r; ++step, ck *= N) {
        std::vector<int> S;
        for (int i = 0; i < r; ++i)
            if (ck * rs.pairing(i, y) < D) S.push_back(i);
        BasicSubsystem sub = basic_subsystem(rs, S);
        double inner = 0, outer = kInf;
        for (std::size_t a : sub.positive) inner = std::max(inner, rs.pairing(a, y));
        for (std::size_t b : sub.complement) outer = std::min(outer, rs.pairing(b, y));
        if (!(ck * inner < D)) continue;
        Subregion out;
        out.sub = std::move(sub);
        out.escalations = step;
        out.c_prime = ck;
        if (!(D < ck * outer)) {
            // boundary equality: move c' up by half the room left on the inner side
            double room = std::min(inner > 0 ? D / inner : kInf, c) - ck;
            if (!(room > 0)) throw ClassificationFailed("no room to separate a boundary equality");
            out.c_prime = ck + room / 2;
        }
        out.slack_inner = out.sub.positive.empty() ? kInf : D - out.c_prime * inner;
        out.slack_outer = out.sub.complement.empty() ? kInf : out.c_prime * outer - D;
        if (!(out.slack_inner > 0 && out.slack_outer > 0))
            throw ClassificationFailed("subregion inequalities are not strict");
        return out;
    }
    throw ClassificationFailed("no subsystem found after " + std::to_string(r + 1) + " steps");
}

const char* to_string(SampleStrategy s) {
    switch (s) {
        case SampleStrategy::Uniform: return "uniform";
        case SampleStrategy::WallStratified: return "wall";
        case SampleStrategy::NearDiagonal: return "diagonal";
        case SampleStrategy::SubregionTargeted: return "subregion";
        case SampleStrategy::Mixed: return "mixed";
    }
    return "?";
}

SampleStrategy parse_strategy(const std::string& s) {
    for (auto v : {SampleStrategy::Uniform, SampleStrategy::WallStratified, SampleStrategy::NearDiagonal,
                   SampleStrategy::SubregionTargeted, SampleStrategy::Mixed})
        if (s == to_string(v)) return v;
    throw InvalidArgument("unknown strategy '" + s + "'");
}

const char* to_string(KernelType k) { return k == KernelType::Poisson ? "poisson" : "newton"; }

KernelType parse_kernel_type(const std::string& s) {
    if (s == "poisson") return KernelType::Poisson;
    if (s == "newton") return KernelType::Newton;
    throw InvalidArgument("unknown kernel '" + s + "'");
}

namespace {

class Sampler {
public:
    Sampler(const RootSystem& rs, KernelType k, const SamplerOptions& opt)
        : rs_(rs), kind_(k), opt_(opt), subs_(all_basic_subsystems(rs)) {
        for (const auto& w : rs.fundamental_coweights()) coweights_.push_back(to_double(w));
        c_ = opt.c > 0 ? opt.c : default_classification_c(rs);
        c0_ = c_ / std::pow(static_cast<double>(rs.height_bound()), rs.rank());
    }

    SamplePair draw(SampleStrategy st, std::mt19937_64& g) {
        for (std::uint64_t tries = 0; tries < opt_.max_rejections; ++tries) {
            SamplePair p;
            p.strategy = st;
            bool ok = false;
            switch (st) {
                case SampleStrategy::Uniform: ok = uniform(p, g); break;
                case SampleStrategy::WallStratified: ok = wall(p, g); break;
                case SampleStrategy::NearDiagonal: ok = diagonal(p, g); break;
                case SampleStrategy::SubregionTargeted: ok = targeted(p, g); break;
                case SampleStrategy::Mixed: throw InvalidArgument("mixed is resolved per sample");
            }
            if (ok && accept(p)) return p;
        }
        throw StrategyExhausted(std::string(to_string(st)) + " sampler rejected " +
                                std::to_string(opt_.max_rejections) + " candidates");
    }

private:
    bool poisson() const { return kind_ == KernelType::Poisson; }

    Vec unit(std::mt19937_64& g) {
        std::normal_distribution<double> N;
        const int d = rs_.ambient_dim();
        Vec v(d);
        for (double& c : v) c = N(g);
        if (rs_.span_only()) {
            double m = 0;
            for (double c : v) m += c;
            for (double& c : v) c -= m / d;
        }
        return scale(v, 1 / norm(v));
    }
    Vec ball(std::mt19937_64& g) {
        Vec u = unit(g);
        return scale(u, std::pow(U(g), 1.0 / rs_.kernel_dim()));
    }
    Vec fold(const Vec& v) const { return project_to_chamber(rs_, v).x_plus; }
    double U(std::mt19937_64& g) { return std::uniform_real_distribution<double>(0, 1)(g); }

    bool interior(const Vec& v) const {
        for (int i = 0; i < rs_.rank(); ++i)
            if (!(rs_.pairing(i, v) > 0)) return false;
        return true;
    }
    bool accept(const SamplePair& p) const {
        if (!interior(p.x) || !interior(p.y) || !(dist2(p.x, p.y) > 0)) return false;
        if (poisson() && !(norm2(p.x) < 1)) return false;
        return std::isfinite(norm2(p.x)) && std::isfinite(norm2(p.y));
    }

    Vec second(std::mt19937_64& g) { return poisson() ? fold(unit(g)) : fold(ball(g)); }

    bool uniform(SamplePair& p, std::mt19937_64& g) {
        p.x = fold(ball(g));
        p.y = second(g);
        return true;
    }

    // moves v along the i-th coweight so that alpha_i(v) = e, keeping |v| = 1 when on the sphere
    Vec pin(const Vec& v, int i, double e, bool sphere) const {
        const Vec& w = coweights_[i];
        const double a = rs_.pairing(i, v);
        if (!sphere) return axpy(v, e - a, w);
        // (a + t)^2 = e^2 |v + t w|^2 with a + t > 0; take the root nearest t = 0
        const double b = dot(v, w), c = dot(w, w);
        const double A = 1 - e * e * c, B = 2 * (a - e * e * b), C = a * a - e * e;
        const double disc = B * B - 4 * A * C;
        if (!(disc >= 0) || A == 0) return v;
        const double q = -0.5 * (B + std::copysign(std::sqrt(disc), B));
        double t1 = q / A, t2 = q != 0 ? C / q : t1;
        double best = std::numeric_limits<double>::quiet_NaN();
        for (double t : {t1, t2})
            if (a + t > 0 && !(std::abs(t) >= std::abs(best))) best = t;
        if (std::isnan(best)) return v;
        Vec z = axpy(v, best, w);
        return scale(z, 1 / norm(z));
    }

    bool wall(SamplePair& p, std::mt19937_64& g) {
        const int i = std::uniform_int_distribution<int>(0, rs_.rank() - 1)(g);
        const int which = std::uniform_int_distribution<int>(0, 2)(g);
        const double e = std::pow(10.0, -1 - 5 * U(g));
        p.x = fold(ball(g));
        p.y = second(g);
        if (which != 1) p.x = pin(p.x, i, e, false);
        if (which != 0) p.y = pin(p.y, i, e, poisson());
        p.requested = e;
        p.wall = i;
        p.near = which == 0 ? 'x' : which == 1 ? 'y' : 'b';
        if (which != 1 && std::abs(rs_.pairing(i, p.x) - e) > 1e-9 * e) return false;
        if (which != 0 && std::abs(rs_.pairing(i, p.y) - e) > 1e-9 * e) return false;
        for (int j = 0; j < rs_.rank(); ++j) {
            if (j == i) continue;
            if (which != 1 && rs_.pairing(j, p.x) < e) return false;
            if (which != 0 && rs_.pairing(j, p.y) < e) return false;
        }
        return true;
    }

    bool diagonal(SamplePair& p, std::mt19937_64& g) {
        const double r = std::pow(10.0, -1 - 5 * U(g));
        Vec u = unit(g);
        if (poisson()) {
            p.y = fold(unit(g));
            if (dot(u, p.y) > 0) u = scale(u, -1);
            p.x = fold(axpy(p.y, r, u));
        } else {
            p.x = fold(ball(g));
            p.y = fold(axpy(p.x, r, u));
        }
        p.requested = r;
        return true;
    }

    bool targeted(SamplePair& p, std::mt19937_64& g) {
        const BasicSubsystem& sub = subs_[std::uniform_int_distribution<std::size_t>(0, subs_.size() - 1)(g)];
        const int r = rs_.rank();
        std::vector<char> in(r, 0);
        for (int i : sub.simple) in[i] = 1;
        const double eps = std::pow(10.0, -3 - 3 * U(g));
        Vec y(rs_.ambient_dim(), 0.0);
        for (int i = 0; i < r; ++i) y = axpy(y, in[i] ? eps * (0.5 + 0.5 * U(g)) : 0.3 + 0.7 * U(g), coweights_[i]);
        if (!rs_.span_only() && rs_.kernel_dim() > r) {
            Vec v = unit(g);
            for (int i = 0; i < r; ++i) v = axpy(v, -rs_.pairing(i, v), coweights_[i]);
            y = axpy(y, 0.5 * U(g) * norm(y), v);
        }
        y = scale(y, (poisson() ? 1.0 : 0.3 + 0.6 * U(g)) / norm(y));
        double hi = kInf, lo = 0;
        for (int i = 0; i < r; ++i) {
            if (in[i]) lo = std::max(lo, c0_ * rs_.height_bound() * rs_.pairing(i, y));
            else hi = std::min(hi, c0_ * rs_.pairing(i, y));
        }
        double D;
        if (sub.simple.empty()) D = hi * std::pow(10.0, -0.3 - 2 * U(g));
        else if (hi == kInf) D = std::min(lo * (1.5 + 1.5 * U(g)), 0.9);
        else D = std::sqrt(lo * hi);
        if (!(lo < D && D < hi)) return false;
        Vec v = unit(g);
        for (bool moved = true; moved;) {
            moved = false;
            for (int i : sub.simple)
                if (rs_.pairing(i, v) < 0) {
                    v = rs_.reflect(i, v);
                    moved = true;
                }
        }
        Vec u = poisson() ? axpy(v, -1, y) : v;
        p.y = y;
        p.x = axpy(y, D / norm(u), u);
        p.target = sub.simple;
        p.requested = D;
        return true;
    }

    const RootSystem& rs_;
    KernelType kind_;
    SamplerOptions opt_;
    std::vector<BasicSubsystem> subs_;
    std::vector<Vec> coweights_;
    double c_ = 0, c0_ = 0;
};

}  // namespace

std::vector<SamplePair> sample_pairs(const RootSystem& rs, KernelType k, SampleStrategy s, std::size_t n,
                                     std::uint64_t seed, const SamplerOptions& opt) {
    if (n < 1) throw InvalidArgument("n must be >= 1");
    Sampler sampler(rs, k, opt);
    std::vector<SamplePair> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto g = stream_rng(seed, i);
        SampleStrategy st = s == SampleStrategy::Mixed ? static_cast<SampleStrategy>(i % 4) : s;
        out.push_back(sampler.draw(st, g));
    }
    return out;
}

RatioStats ratio_stats(std::vector<double> v) {
    RatioStats s;
    s.count = v.size();
    if (v.empty()) return s;
    std::sort(v.begin(), v.end());
    s.min = v.front();
    s.max = v.back();
    double l = 0;
    for (double r : v) l += std::log(r);
    s.geometric_mean = std::exp(l / v.size());
    for (int k = 1; k <= 9; ++k) {
        double pos = k / 10.0 * (v.size() - 1);
        std::size_t lo = static_cast<std::size_t>(pos);
        std::size_t hi = std::min(lo + 1, v.size() - 1);
        s.deciles[k - 1] = v[lo] + (pos - lo) * (v[hi] - v[lo]);
    }
    return s;
}

bool envelope_stable(const RatioStats& a, const RatioStats& b, double tol) {
    auto close = [tol](double p, double q) { return std::abs(q - p) <= tol * std::abs(p); };
    return a.count > 0 && b.count > 0 && a.min > 0 && b.min > 0 && close(a.min, b.min) && close(a.max, b.max);
}

namespace {

struct Outcome {
    SampleRow row;
    bool ok = false;
    double lower_ratio = 0;  // framing only
    Reject reject;
};

BoundReport assemble(const RootSystem& rs, KernelType k, std::vector<Outcome>& outs, const SweepOptions& opt,
                     const char* measure) {
    BoundReport rep;
    rep.system_id = rs.id();
    rep.kernel = k;
    rep.measure = measure;
    rep.estimator = opt.estimator;
    rep.sample_count = outs.size();
    rep.seed = opt.seed;
    rep.config = {{"target_rel_err", opt.policy.target_rel_err},
                  {"max_bits", opt.policy.max_bits},
                  {"estimator", opt.estimator == EstimatorVariant::Phi ? "phi" : "reflected"},
                  {"c", opt.c > 0 ? opt.c : default_classification_c(rs)},
                  {"reject_cap", opt.reject_cap},
                  {"threads", opt.threads},
                  {"strategy", opt.strategy}};
    std::vector<double> all, lower;
    std::map<std::string, std::pair<SubregionStats, std::vector<double>>> subs;
    std::map<int, std::size_t> tiers;
    double bits_sum = 0;
    rep.precision.min_bits = std::numeric_limits<int>::max();
    for (auto& o : outs) {
        auto& slot = subs[o.row.subregion];
        slot.first.label = o.row.subregion;
        ++slot.first.count;
        if (!o.ok) {
            ++slot.first.rejected;
            rep.rejects.push_back(std::move(o.reject));
            continue;
        }
        all.push_back(o.row.ratio);
        lower.push_back(o.lower_ratio);
        slot.second.push_back(o.row.ratio);
        ++tiers[o.row.bits];
        bits_sum += o.row.bits;
        rep.precision.min_bits = std::min(rep.precision.min_bits, o.row.bits);
        rep.precision.max_bits = std::max(rep.precision.max_bits, o.row.bits);
        rep.precision.max_cancellation = std::max(rep.precision.max_cancellation, o.row.cancellation);
        if (opt.keep_rows) rep.rows.push_back(std::move(o.row));
    }
    if (all.empty()) rep.precision.min_bits = 0;
    else rep.precision.mean_bits = bits_sum / all.size();
    rep.precision.tiers.assign(tiers.begin(), tiers.end());
    rep.ratio = ratio_stats(all);
    for (auto& [label, slot] : subs) {
        slot.first.ratio = ratio_stats(std::move(slot.second));
        rep.subregions.push_back(std::move(slot.first));
    }
    if (std::string(measure) == "framing") {
        rep.framing.to_upper = rep.ratio;
        rep.framing.to_lower = ratio_stats(lower);
        rep.framing.fitted_upper = rep.framing.to_upper.max;
        rep.framing.fitted_lower = rep.framing.to_lower.min;
    }
    rep.failed = static_cast<double>(rep.rejects.size()) > opt.reject_cap * static_cast<double>(rep.sample_count) ||
                 all.empty() || !(rep.ratio.min > 0);
    return rep;
}

template <class Measure>
BoundReport sweep(const RootSystem& rs, KernelType k, const std::vector<SamplePair>& samples, const SweepOptions& opt,
                  const char* name, Measure&& measure) {
    const double c = opt.c > 0 ? opt.c : default_classification_c(rs);
    std::vector<Outcome> outs(samples.size());
    parallel_for(samples.size(), opt.threads, [&](std::size_t i) {
        const SamplePair& s = samples[i];
        Outcome& o = outs[i];
        o.row.index = i;
        o.row.x = s.x;
        o.row.y = s.y;
        o.row.strategy = s.strategy;
        o.row.distance = dist(s.x, s.y);
        o.row.wall_distance = std::numeric_limits<double>::infinity();
        for (int a = 0; a < rs.rank(); ++a)
            o.row.wall_distance = std::min({o.row.wall_distance, dist_to_wall(rs, a, s.x), dist_to_wall(rs, a, s.y)});
        try {
            Subregion sr = classify_subregion(rs, s.x, s.y, c);
            o.row.subregion = sr.label();
            o.row.c_prime = sr.c_prime;
        } catch (const ClassificationFailed& e) {
            o.row.subregion = "unclassified";
        }
        try {
            KernelQuery q;
            q.system = &rs;
            q.x = s.x;
            q.y = s.y;
            q.policy = opt.policy;
            KernelValue v = k == KernelType::Poisson ? poisson_complex(q) : newton_complex(q);
            o.row.kernel = std::abs(v.value);
            o.row.bits = v.precision_bits_used;
            o.row.cancellation = v.cancellation_ratio;
            measure(o);
            o.ok = o.row.ratio > 0 && std::isfinite(o.row.ratio);
            if (!o.ok) o.reject = {i, s.x, s.y, v.cancellation_ratio, "non-positive or non-finite ratio"};
        } catch (const PrecisionExhausted& e) {
            o.reject = {i, s.x, s.y, e.cancellation_ratio, e.what()};
        } catch (const Error& e) {
            o.reject = {i, s.x, s.y, 0, e.what()};
        }
    });
    return assemble(rs, k, outs, opt, name);
}

}  // namespace

BoundReport ratio_sweep(const RootSystem& rs, KernelType k, const std::vector<SamplePair>& samples,
                        const SweepOptions& opt) {
    return sweep(rs, k, samples, opt, "omega", [&](Outcome& o) {
        o.row.estimate = k == KernelType::Poisson ? omega_poisson(rs, o.row.x, o.row.y, opt.estimator)
                                                  : omega_newton(rs, o.row.x, o.row.y, opt.estimator);
        o.row.ratio = o.row.kernel / o.row.estimate;
    });
}

BoundReport framing_sweep(const RootSystem& rs, const std::vector<SamplePair>& samples, const SweepOptions& opt) {
    return sweep(rs, KernelType::Poisson, samples, opt, "framing", [&](Outcome& o) {
        FramingBounds b = framing_bounds(rs, o.row.x, o.row.y);
        o.row.estimate = b.upper;
        o.row.ratio = o.row.kernel / b.upper;
        o.lower_ratio = o.row.kernel / b.lower;
    });
}

namespace {

json stats_json(const RatioStats& s) {
    return {{"count", s.count},
            {"min", s.min},
            {"max", s.max},
            {"geometric_mean", s.geometric_mean},
            {"deciles", s.deciles}};
}

std::string utc_now() {
    std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

}  // namespace

json report_to_json(const BoundReport& r, bool include_rows) {
    json j;
    j["schema_version"] = BoundReport::schema_version;
    j["version"] = library_version();
    j["generated_at"] = utc_now();
    j["system"] = r.system_id;
    j["kernel"] = to_string(r.kernel);
    j["measure"] = r.measure;
    j["estimator"] = r.estimator == EstimatorVariant::Phi ? "phi" : "reflected";
    j["sample_count"] = r.sample_count;
    j["ratio"] = stats_json(r.ratio);
    j["subregions"] = json::array();
    for (const auto& s : r.subregions)
        j["subregions"].push_back(
            {{"label", s.label}, {"count", s.count}, {"rejected", s.rejected}, {"ratio", stats_json(s.ratio)}});
    json tiers = json::array();
    for (auto [bits, count] : r.precision.tiers) tiers.push_back({{"bits", bits}, {"count", count}});
    j["precision"] = {{"min_bits", r.precision.min_bits},
                      {"max_bits", r.precision.max_bits},
                      {"mean_bits", r.precision.mean_bits},
                      {"max_cancellation", r.precision.max_cancellation},
                      {"tiers", tiers}};
    if (r.measure == "framing")
        j["framing"] = {{"to_upper", stats_json(r.framing.to_upper)},
                        {"to_lower", stats_json(r.framing.to_lower)},
                        {"fitted_upper", r.framing.fitted_upper},
                        {"fitted_lower", r.framing.fitted_lower}};
    j["rejects"] = json::array();
    for (const auto& x : r.rejects)
        j["rejects"].push_back(
            {{"index", x.index}, {"x", x.x}, {"y", x.y}, {"cancellation", x.cancellation}, {"reason", x.reason}});
    j["failed"] = r.failed;
    j["seed"] = r.seed;
    j["config"] = r.config;
    if (include_rows) {
        j["rows"] = json::array();
        for (const auto& w : r.rows)
            j["rows"].push_back({{"index", w.index},
                                 {"strategy", to_string(w.strategy)},
                                 {"x", w.x},
                                 {"y", w.y},
                                 {"distance", w.distance},
                                 {"wall_distance", w.wall_distance},
                                 {"kernel", w.kernel},
                                 {"estimate", w.estimate},
                                 {"ratio", w.ratio},
                                 {"subregion", w.subregion},
                                 {"bits", w.bits}});
    }
    return j;
}

std::string report_rows_csv(const BoundReport& r) {
    std::ostringstream os;
    os << std::setprecision(17);
    auto vec = [&](const Vec& v) {
        for (std::size_t k = 0; k < v.size(); ++k) os << (k ? " " : "") << v[k];
    };
    os << "index,strategy,x,y,distance,wall_distance,kernel,estimate,ratio,subregion,c_prime,bits,cancellation\n";
    for (const auto& w : r.rows) {
        os << w.index << ',' << to_string(w.strategy) << ',';
        vec(w.x);
        os << ',';
        vec(w.y);
        os << ',' << w.distance << ',' << w.wall_distance << ',' << w.kernel << ',' << w.estimate << ',' << w.ratio << ",\"" << w.subregion << "\"," << w.c_prime
           << ',' << w.bits << ',' << w.cancellation << '\n';
    }
    return os.str();
}

}  // namespace dunklpot

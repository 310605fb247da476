#include "cli.hpp"

#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <thread>

#include "dunklpot/dyson.hpp"
#include "dunklpot/errors.hpp"
#include "dunklpot/product.hpp"
#include "dunklpot/verify.hpp"

namespace dunklpot::cli {

namespace {

int default_max_bits() {
    if (const char* env = std::getenv("DUNKLPOT_MAX_BITS")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v >= 53) return static_cast<int>(v);
        throw InvalidArgument(std::string("DUNKLPOT_MAX_BITS must be an integer >= 53, got '") + env + "'");
    }
    return PrecisionPolicy{}.max_bits;
}

int default_threads() { return std::max(1u, std::thread::hardware_concurrency()); }

struct Output {
    std::string path;
    std::ostream* fallback;

    void write(const std::string& text) const {
        if (path.empty() || path == "-") {
            *fallback << text;
            return;
        }
        std::ofstream f(path);
        if (!f) throw InvalidArgument("cannot write '" + path + "'");
        f << text;
    }
};

std::string dump(const json& j) { return j.dump(2) + "\n"; }

struct PolicyArgs {
    double target = PrecisionPolicy{}.target_rel_err;
    int max_bits = 0;
    void add(CLI::App* app) {
        app->add_option("--target", target, "target relative error")->capture_default_str()->check(
            CLI::Range(1e-30, 1e-2));
        app->add_option("--max-bits", max_bits, "precision cap in bits (default: DUNKLPOT_MAX_BITS or 4096)")
            ->check(CLI::Range(53, 1 << 20));
    }
    PrecisionPolicy resolve() const { return {target, max_bits > 0 ? max_bits : default_max_bits()}; }
};

const std::map<std::string, KernelType> kKernels{{"poisson", KernelType::Poisson}, {"newton", KernelType::Newton}};

// systems

void cmd_systems(const std::string& format, const Output& out) {
    json list = json::array();
    for (const auto& sel : catalog_selectors()) {
        RootSystem rs = parse_system(sel);
        list.push_back({{"id", rs.id()},
                        {"selector", sel},
                        {"rank", rs.rank()},
                        {"ambient_dim", rs.ambient_dim()},
                        {"positive_roots", rs.num_positive_roots()},
                        {"weyl_order", rs.weyl_order()},
                        {"N", rs.height_bound()},
                        {"K0", rs.K0().get_d()},
                        {"C1", rs.C1()},
                        {"kappa", rs.kappa().get_d()}});
    }
    if (format == "json") {
        out.write(dump({{"schema_version", 1}, {"version", library_version()}, {"systems", list}}));
        return;
    }
    std::ostringstream os;
    os << std::left << std::setw(10) << "system" << std::setw(6) << "rank" << std::setw(5) << "d" << std::setw(7)
       << "|Phi+|" << std::setw(8) << "|W|" << std::setw(4) << "N" << std::setw(7) << "K0" << std::setw(10) << "C1"
       << "kappa\n";
    for (const auto& s : list)
        os << std::setw(10) << s["selector"].get<std::string>() << std::setw(6) << s["rank"].get<int>() << std::setw(5)
           << s["ambient_dim"].get<int>() << std::setw(7) << s["positive_roots"].get<std::size_t>() << std::setw(8)
           << s["weyl_order"].get<std::size_t>() << std::setw(4) << s["N"].get<int>() << std::setw(7)
           << s["K0"].get<double>() << std::setw(10) << s["C1"].get<double>() << s["kappa"].get<double>() << "\n";
    out.write(os.str());
}

// eval

struct EvalArgs {
    std::string kernel, system = "a2";
    std::vector<double> x, y;
    PolicyArgs policy;
};

void cmd_eval(const EvalArgs& a, const Output& out) {
    RootSystem rs = parse_system(a.system);
    KernelQuery q;
    q.system = &rs;
    q.x = a.x;
    q.y = a.y;
    q.policy = a.policy.resolve();
    KernelType k = kKernels.at(a.kernel);
    KernelValue v = k == KernelType::Poisson ? poisson_complex(q) : newton_complex(q);
    out.write(dump({{"schema_version", 1},
                    {"version", library_version()},
                    {"command", "eval"},
                    {"kernel", a.kernel},
                    {"system", rs.id()},
                    {"x", q.x},
                    {"y", q.y},
                    {"value", v.value},
                    {"achieved_relative_error", v.achieved_relative_error},
                    {"precision_bits_used", v.precision_bits_used},
                    {"cancellation_ratio", v.cancellation_ratio},
                    {"config", {{"target_rel_err", q.policy.target_rel_err}, {"max_bits", q.policy.max_bits}}}}));
}

// verify conjecture

struct VerifyArgs {
    std::string system = "a2", kernel = "poisson", measure = "omega", strategy = "mixed", estimator = "phi";
    std::size_t samples = 1000;
    std::uint64_t seed = 42;
    double c = 0, reject_cap = 1e-3;
    bool rows = false;
    std::string csv;
    PolicyArgs policy;
};

int cmd_verify(const VerifyArgs& a, int threads, const Output& out) {
    RootSystem rs = parse_system(a.system);
    KernelType k = kKernels.at(a.kernel);
    if (a.measure == "framing" && k != KernelType::Poisson)
        throw InvalidArgument("the framing measure applies to the Poisson kernel only");
    SampleStrategy st = parse_strategy(a.strategy);
    SweepOptions opt;
    opt.policy = a.policy.resolve();
    opt.estimator = a.estimator == "phi" ? EstimatorVariant::Phi : EstimatorVariant::Reflected;
    opt.c = a.c;
    opt.threads = threads;
    opt.reject_cap = a.reject_cap;
    opt.seed = a.seed;
    opt.strategy = a.strategy;
    opt.keep_rows = a.rows || !a.csv.empty();
    SamplerOptions so;
    so.c = a.c;
    auto samples = sample_pairs(rs, k, st, a.samples, a.seed, so);
    BoundReport r = a.measure == "framing" ? framing_sweep(rs, samples, opt) : ratio_sweep(rs, k, samples, opt);
    r.config.update({{"command", "verify conjecture"},
                     {"system", a.system},
                     {"kernel", a.kernel},
                     {"measure", a.measure},
                     {"samples", a.samples},
                     {"seed", a.seed}});
    out.write(dump(report_to_json(r, a.rows)));
    if (!a.csv.empty()) Output{a.csv, nullptr}.write(report_rows_csv(r));
    return r.failed ? SweepFailed : Ok;
}

// product

struct ProductArgs {
    int J = 1, d = 0;
    std::vector<double> m;
    std::string variant = "a1", kernel = "poisson";
    int nodes = QuadratureSpec{}.nodes;
    double target = QuadratureSpec{}.target_rel_err;
    void add(CLI::App* app) {
        app->add_option("--J", J, "number of rank-one factors")->capture_default_str()->check(CLI::Range(1, 8));
        app->add_option("--m", m, "multiplicity parameter per factor (default 2 each)")->delimiter(',');
        app->add_option("--d", d, "ambient dimension (default: smallest that fits)");
        app->add_option("--variant", variant, "a1 or b1")->capture_default_str()->check(CLI::IsMember({"a1", "b1"}));
        app->add_option("--kernel", kernel)->capture_default_str()->check(CLI::IsMember({"poisson", "newton"}));
        app->add_option("--nodes", nodes, "Gauss nodes per panel")->capture_default_str()->check(CLI::Range(2, 200));
        app->add_option("--quad-target", target, "quadrature relative error target")->capture_default_str();
    }
    ProductSystem system() const {
        ProductSystem ps;
        ps.J = J;
        ps.variant = variant == "a1" ? ProductVariant::A1 : ProductVariant::B1;
        ps.m = m.empty() ? std::vector<double>(J, 2.0) : m;
        ps.d = d > 0 ? d : std::max(2, ps.variant == ProductVariant::A1 ? 2 * J : J);
        ps.validate();
        return ps;
    }
    QuadratureSpec quad() const {
        QuadratureSpec q;
        q.nodes = nodes;
        q.target_rel_err = target;
        return q;
    }
    json config(const ProductSystem& ps) const {
        return {{"J", ps.J},      {"m", ps.m},         {"d", ps.d},          {"variant", variant},
                {"kernel", kernel}, {"nodes", nodes}, {"quad_target", target}};
    }
};

void cmd_product_eval(const ProductArgs& a, const Vec& x, const Vec& y, const Output& out) {
    ProductSystem ps = a.system();
    KernelType k = kKernels.at(a.kernel);
    KernelValue v = k == KernelType::Poisson ? product_poisson(ps, x, y, a.quad()) : product_newton(ps, x, y, a.quad());
    double est = k == KernelType::Poisson ? product_estimate_poisson(ps, x, y) : product_estimate_newton(ps, x, y);
    json cfg = a.config(ps);
    cfg["command"] = "product eval";
    out.write(dump({{"schema_version", 1},
                    {"version", library_version()},
                    {"system", ps.id()},
                    {"kernel", a.kernel},
                    {"x", x},
                    {"y", y},
                    {"value", v.value},
                    {"achieved_relative_error", v.achieved_relative_error},
                    {"estimate", est},
                    {"ratio", v.value / est},
                    {"config", cfg}}));
}

struct ProductSweepArgs {
    std::size_t samples = 200;
    std::uint64_t seed = 42;
    std::string strategy = "mixed", summary;
};

int cmd_product_sweep(const ProductArgs& a, const ProductSweepArgs& s, int threads, const Output& out) {
    static const std::map<std::string, ProductStrategy> strategies{{"uniform", ProductStrategy::Uniform},
                                                                    {"wall", ProductStrategy::WallStratified},
                                                                    {"diagonal", ProductStrategy::NearDiagonal},
                                                                    {"mixed", ProductStrategy::Mixed}};
    ProductSystem ps = a.system();
    KernelType k = kKernels.at(a.kernel);
    auto samples = product_sample_pairs(ps, k, strategies.at(s.strategy), s.samples, s.seed);
    ProductSweep sw = product_sweep(ps, k, samples, a.quad(), threads);

    std::ostringstream os;
    os << std::setprecision(17);
    os << "index,strategy,x,y,distance,wall_distance,kernel,kernel_coarse,estimate,ratio,ok,error\n";
    auto vec = [&](const Vec& v) {
        for (std::size_t i = 0; i < v.size(); ++i) os << (i ? " " : "") << v[i];
    };
    for (std::size_t i = 0; i < sw.rows.size(); ++i) {
        const ProductRow& r = sw.rows[i];
        double wall = std::numeric_limits<double>::infinity();
        for (int f = 0; f < ps.J; ++f) wall = std::min({wall, ps.pairing(f, r.x), ps.pairing(f, r.y)});
        auto name = std::find_if(strategies.begin(), strategies.end(),
                                 [&](const auto& kv) { return kv.second == samples[i].strategy; });
        os << i << ',' << name->first << ',';
        vec(r.x);
        os << ',';
        vec(r.y);
        os << ',' << dist(r.x, r.y) << ',' << wall << ',' << r.kernel << ',' << r.kernel_coarse << ',' << r.estimate
           << ',' << r.ratio << ',' << (r.ok ? 1 : 0) << ",\"" << r.error << "\"\n";
    }
    out.write(os.str());

    const bool failed = sw.failures > 0 || sw.rows.size() == sw.failures;
    if (!s.summary.empty()) {
        json cfg = a.config(ps);
        cfg.update({{"command", "product sweep"},
                    {"samples", s.samples},
                    {"seed", s.seed},
                    {"strategy", s.strategy},
                    {"threads", threads}});
        Output{s.summary, nullptr}.write(dump({{"schema_version", 1},
                                               {"version", library_version()},
                                               {"system", ps.id()},
                                               {"kernel", a.kernel},
                                               {"sample_count", sw.rows.size()},
                                               {"failures", sw.failures},
                                               {"min_ratio", sw.min_ratio},
                                               {"max_ratio", sw.max_ratio},
                                               {"min_ratio_coarse", sw.min_ratio_coarse},
                                               {"max_ratio_coarse", sw.max_ratio_coarse},
                                               {"failed", failed},
                                               {"config", cfg}}));
    }
    return failed ? SweepFailed : Ok;
}

// dyson exit-test

struct DysonArgs {
    std::string system = "a2";
    std::vector<double> x0;
    std::size_t paths = 100'000;
    int bins = 32;
    SdeConfig cfg;
};

void cmd_dyson(const DysonArgs& a, int threads, const Output& out) {
    RootSystem rs = parse_system(a.system);
    ExitHistogram h = exit_law_test(rs, a.x0, a.paths, a.bins, a.cfg, threads);
    json j = histogram_to_json(h);
    j["config"].update({{"command", "dyson exit-test"}, {"paths", a.paths}, {"threads", threads}});
    out.write(dump(j));
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Dunkl kernels of Weyl chambers: evaluation, estimate sweeps and exit-law checks", "dunklpot"};
    app.set_version_flag("--version", std::string("dunklpot ") + library_version());
    app.require_subcommand(1);
    app.fallthrough();
    int threads = 0;
    std::string out_path;
    app.add_option("--threads", threads, "worker threads (default: all cores)")->check(CLI::Range(1, 1024));

    auto* systems = app.add_subcommand("systems", "list the catalog root systems and their constants");
    std::string format = "text";
    systems->add_option("--format", format)->capture_default_str()->check(CLI::IsMember({"text", "json"}));
    systems->add_option("--out", out_path, "output file (default stdout)");

    auto* eval = app.add_subcommand("eval", "evaluate a Poisson or Newton kernel");
    EvalArgs ea;
    eval->add_option("kernel", ea.kernel, "poisson or newton")->required()->check(CLI::IsMember({"poisson", "newton"}));
    eval->add_option("--system", ea.system)->capture_default_str();
    eval->add_option("--x", ea.x, "comma-separated coordinates")->required()->delimiter(',');
    eval->add_option("--y", ea.y, "comma-separated coordinates")->required()->delimiter(',');
    ea.policy.add(eval);
    eval->add_option("--out", out_path, "output file (default stdout)");

    auto* verify = app.add_subcommand("verify", "measure kernel / estimator envelopes");
    verify->require_subcommand(1);
    auto* conj = verify->add_subcommand("conjecture", "ratio sweep over structured samples");
    VerifyArgs va;
    conj->add_option("--system", va.system)->capture_default_str();
    conj->add_option("--kernel", va.kernel)->capture_default_str()->check(CLI::IsMember({"poisson", "newton"}));
    conj->add_option("--measure", va.measure, "omega estimator or upper/lower framing")
        ->capture_default_str()
        ->check(CLI::IsMember({"omega", "framing"}));
    conj->add_option("--samples,-n", va.samples)->capture_default_str()->check(CLI::PositiveNumber);
    conj->add_option("--seed", va.seed)->capture_default_str();
    conj->add_option("--strategy", va.strategy)
        ->capture_default_str()
        ->check(CLI::IsMember({"uniform", "wall", "diagonal", "subregion", "mixed"}));
    conj->add_option("--estimator", va.estimator)->capture_default_str()->check(CLI::IsMember({"phi", "reflected"}));
    conj->add_option("--c", va.c, "classification constant (default: derived from the system)");
    conj->add_option("--reject-cap", va.reject_cap, "largest tolerated fraction of rejected samples")
        ->capture_default_str()
        ->check(CLI::Range(0.0, 1.0));
    conj->add_flag("--rows", va.rows, "include per-sample rows in the JSON report");
    conj->add_option("--csv", va.csv, "write per-sample rows as CSV");
    va.policy.add(conj);
    conj->add_option("--out", out_path, "report file (default stdout)");

    auto* product = app.add_subcommand("product", "kernels of products of rank-one systems");
    product->require_subcommand(1);
    ProductArgs pa;
    Vec px, py;
    auto* peval = product->add_subcommand("eval", "kernel, estimate and ratio at one pair");
    pa.add(peval);
    peval->add_option("--x", px)->required()->delimiter(',');
    peval->add_option("--y", py)->required()->delimiter(',');
    peval->add_option("--out", out_path, "output file (default stdout)");
    auto* psweep = product->add_subcommand("sweep", "ratio sweep, one CSV row per sample");
    ProductSweepArgs ps;
    pa.add(psweep);
    psweep->add_option("--samples,-n", ps.samples)->capture_default_str()->check(CLI::PositiveNumber);
    psweep->add_option("--seed", ps.seed)->capture_default_str();
    psweep->add_option("--strategy", ps.strategy)
        ->capture_default_str()
        ->check(CLI::IsMember({"uniform", "wall", "diagonal", "mixed"}));
    psweep->add_option("--summary", ps.summary, "write the JSON summary here");
    psweep->add_option("--out", out_path, "CSV file (default stdout)");

    auto* dyson = app.add_subcommand("dyson", "Monte Carlo exit law of the chamber diffusion");
    dyson->require_subcommand(1);
    auto* exit_test = dyson->add_subcommand("exit-test", "exit histogram against the Poisson density");
    DysonArgs da;
    exit_test->add_option("--system", da.system)->capture_default_str();
    exit_test->add_option("--x0", da.x0, "start point, comma-separated")->required()->delimiter(',');
    exit_test->add_option("--paths", da.paths)->capture_default_str();
    exit_test->add_option("--bins", da.bins)->capture_default_str()->check(CLI::PositiveNumber);
    exit_test->add_option("--seed", da.cfg.seed)->capture_default_str();
    exit_test->add_option("--h0", da.cfg.h0)->capture_default_str();
    exit_test->add_option("--c-w", da.cfg.c_w)->capture_default_str();
    exit_test->add_option("--c-b", da.cfg.c_b)->capture_default_str();
    exit_test->add_option("--delta-exit", da.cfg.delta_exit)->capture_default_str();
    exit_test->add_option("--max-steps", da.cfg.max_steps)->capture_default_str();
    exit_test->add_option("--out", out_path, "histogram file (default stdout)");

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? Ok : Usage;
    }
    if (threads == 0) threads = default_threads();
    Output sink{out_path, &out};

    try {
        if (*systems) cmd_systems(format, sink);
        else if (*eval) cmd_eval(ea, sink);
        else if (*conj) return cmd_verify(va, threads, sink);
        else if (*peval) {
            cmd_product_eval(pa, px, py, sink);
        } else if (*psweep) {
            return cmd_product_sweep(pa, ps, threads, sink);
        } else if (*exit_test) {
            cmd_dyson(da, threads, sink);
        }
        return Ok;
    } catch (const OnWall& e) {
        err << e.what() << "\n";
        return Degenerate;
    } catch (const DegenerateWall& e) {
        err << e.what() << "\n";
        return Degenerate;
    } catch (const NotInChamber& e) {
        err << e.what() << "\n";
        return Degenerate;
    } catch (const PrecisionExhausted& e) {
        err << e.what() << "\n";
        return PrecisionLost;
    } catch (const QuadratureNotConverged& e) {
        err << e.what() << "\n";
        return PrecisionLost;
    } catch (const std::exception& e) {
        err << e.what() << "\n" << app.get_subcommands().front()->help("", CLI::AppFormatMode::Normal);
        return Usage;
    }
}

}  // namespace dunklpot::cli

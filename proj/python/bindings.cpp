#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dunklpot/dyson.hpp"
#include "dunklpot/errors.hpp"
#include "dunklpot/product.hpp"
#include "dunklpot/verify.hpp"

namespace py = pybind11;
using namespace dunklpot;

namespace {

KernelQuery query(const RootSystem& rs, const Vec& x, const Vec& y, double target, int max_bits) {
    KernelQuery q;
    q.system = &rs;
    q.x = x;
    q.y = y;
    q.policy.target_rel_err = target;
    q.policy.max_bits = max_bits;
    return q;
}

EstimatorVariant estimator(const std::string& s) {
    if (s == "phi") return EstimatorVariant::Phi;
    if (s == "reflected") return EstimatorVariant::Reflected;
    throw InvalidArgument("estimator must be 'phi' or 'reflected'");
}

ProductSystem product_system(int J, std::vector<double> m, int d, const std::string& variant) {
    ProductSystem ps;
    ps.J = J;
    ps.m = m.empty() ? std::vector<double>(J, 2.0) : std::move(m);
    if (variant != "a1" && variant != "b1") throw InvalidArgument("variant must be 'a1' or 'b1'");
    ps.variant = variant == "a1" ? ProductVariant::A1 : ProductVariant::B1;
    ps.d = d > 0 ? d : std::max(2, ps.variant == ProductVariant::A1 ? 2 * J : J);
    ps.validate();
    return ps;
}

// JSON crosses the boundary as text; the package turns it into dicts.
std::string text(const json& j) { return j.dump(); }

}  // namespace

PYBIND11_MODULE(_dunklpot, m) {
    m.doc() = "Poisson and Newton kernels of Weyl chambers";
    m.attr("__version__") = library_version();

    auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<InvalidArgument>(m, "InvalidArgument", error.ptr());
    py::register_exception<UnsupportedFamily>(m, "UnsupportedFamily", error.ptr());
    py::register_exception<NotInChamber>(m, "NotInChamber", error.ptr());
    py::register_exception<OnWall>(m, "OnWall", error.ptr());
    py::register_exception<DegenerateWall>(m, "DegenerateWall", error.ptr());
    py::register_exception<PrecisionExhausted>(m, "PrecisionExhausted", error.ptr());
    py::register_exception<QuadratureNotConverged>(m, "QuadratureNotConverged", error.ptr());
    py::register_exception<UnsupportedGeometry>(m, "UnsupportedGeometry", error.ptr());
    py::register_exception<StrategyExhausted>(m, "StrategyExhausted", error.ptr());

    py::class_<RootSystem>(m, "RootSystem")
        .def(py::init([](const std::string& sel) { return parse_system(sel); }), py::arg("selector"))
        .def_property_readonly("id", &RootSystem::id)
        .def_property_readonly("rank", &RootSystem::rank)
        .def_property_readonly("ambient_dim", &RootSystem::ambient_dim)
        .def_property_readonly("num_positive_roots", &RootSystem::num_positive_roots)
        .def_property_readonly("weyl_order", &RootSystem::weyl_order)
        .def_property_readonly("positive_roots", &RootSystem::positive_roots_f)
        .def_property_readonly("N", &RootSystem::height_bound)
        .def_property_readonly("K0", [](const RootSystem& rs) { return rs.K0().get_d(); })
        .def_property_readonly("C1", &RootSystem::C1)
        .def_property_readonly("kappa", [](const RootSystem& rs) { return rs.kappa().get_d(); })
        .def("pairing", py::overload_cast<std::size_t, const Vec&>(&RootSystem::pairing, py::const_), py::arg("root"),
             py::arg("x"))
        .def("pi", [](const RootSystem& rs, const Vec& x) { return pi_value(rs, x); }, py::arg("x"))
        .def("to_json", [](const RootSystem& rs) { return text(root_system_to_json(rs)); })
        .def("__repr__", [](const RootSystem& rs) { return "RootSystem('" + rs.id() + "')"; });

    m.def("catalog", &catalog_selectors);

    py::class_<KernelValue>(m, "KernelValue")
        .def_readonly("value", &KernelValue::value)
        .def_readonly("achieved_relative_error", &KernelValue::achieved_relative_error)
        .def_readonly("precision_bits_used", &KernelValue::precision_bits_used)
        .def_readonly("cancellation_ratio", &KernelValue::cancellation_ratio)
        .def("__float__", [](const KernelValue& v) { return v.value; })
        .def("__repr__", [](const KernelValue& v) {
            return "KernelValue(" + std::to_string(v.value) + ", bits=" + std::to_string(v.precision_bits_used) + ")";
        });

    const double target = PrecisionPolicy{}.target_rel_err;
    const int bits = PrecisionPolicy{}.max_bits;
    m.def(
        "poisson",
        [](const RootSystem& rs, const Vec& x, const Vec& y, double t, int b) {
            return poisson_complex(query(rs, x, y, t, b));
        },
        py::arg("system"), py::arg("x"), py::arg("y"), py::arg("target_rel_err") = target, py::arg("max_bits") = bits);
    m.def(
        "newton",
        [](const RootSystem& rs, const Vec& x, const Vec& y, double t, int b) {
            return newton_complex(query(rs, x, y, t, b));
        },
        py::arg("system"), py::arg("x"), py::arg("y"), py::arg("target_rel_err") = target, py::arg("max_bits") = bits);
    m.def(
        "poisson_density",
        [](const RootSystem& rs, const Vec& x, const Vec& y) {
            PrecisionPolicy p;
            return poisson_density(query(rs, x, y, p.target_rel_err, p.max_bits)).value;
        },
        py::arg("system"), py::arg("x"), py::arg("y"));
    m.def("poisson_at_origin", [](const RootSystem& rs) { return poisson_at_origin(rs); }, py::arg("system"));
    m.def("newton_at_origin", &newton_at_origin, py::arg("system"), py::arg("x"));
    m.def(
        "omega_poisson",
        [](const RootSystem& rs, const Vec& x, const Vec& y, const std::string& e) {
            return omega_poisson(rs, x, y, estimator(e));
        },
        py::arg("system"), py::arg("x"), py::arg("y"), py::arg("estimator") = "reflected");
    m.def(
        "omega_newton",
        [](const RootSystem& rs, const Vec& x, const Vec& y, const std::string& e) {
            return omega_newton(rs, x, y, estimator(e));
        },
        py::arg("system"), py::arg("x"), py::arg("y"), py::arg("estimator") = "reflected");
    m.def(
        "classify",
        [](const RootSystem& rs, const Vec& x, const Vec& y, double c) {
            Subregion s = classify_subregion(rs, x, y, c > 0 ? c : default_classification_c(rs));
            return py::dict(py::arg("label") = s.label(), py::arg("c_prime") = s.c_prime,
                            py::arg("escalations") = s.escalations, py::arg("positive") = s.sub.positive,
                            py::arg("complement") = s.sub.complement);
        },
        py::arg("system"), py::arg("x"), py::arg("y"), py::arg("c") = 0.0);

    m.def(
        "_sweep",
        [](const RootSystem& rs, const std::string& kernel, const std::string& measure, std::size_t n,
           std::uint64_t seed, const std::string& strategy, const std::string& est, int threads, double t, int b,
           bool rows) {
            KernelType k = parse_kernel_type(kernel);
            SweepOptions opt;
            opt.policy = {t, b};
            opt.estimator = estimator(est);
            opt.threads = threads;
            opt.seed = seed;
            opt.strategy = strategy;
            opt.keep_rows = rows;
            auto samples = sample_pairs(rs, k, parse_strategy(strategy), n, seed);
            py::gil_scoped_release unlocked;
            BoundReport r = measure == "framing" ? framing_sweep(rs, samples, opt) : ratio_sweep(rs, k, samples, opt);
            return text(report_to_json(r, rows));
        },
        py::arg("system"), py::arg("kernel"), py::arg("measure"), py::arg("samples"), py::arg("seed"),
        py::arg("strategy"), py::arg("estimator"), py::arg("threads"), py::arg("target_rel_err"), py::arg("max_bits"),
        py::arg("rows"));

    m.def(
        "product_kernel",
        [](const std::string& kernel, const Vec& x, const Vec& y, int J, std::vector<double> mult, int d,
           const std::string& variant, int nodes) {
            ProductSystem ps = product_system(J, std::move(mult), d, variant);
            QuadratureSpec q;
            q.nodes = nodes;
            KernelType k = parse_kernel_type(kernel);
            KernelValue v = k == KernelType::Poisson ? product_poisson(ps, x, y, q) : product_newton(ps, x, y, q);
            double e = k == KernelType::Poisson ? product_estimate_poisson(ps, x, y) : product_estimate_newton(ps, x, y);
            return py::dict(py::arg("value") = v.value, py::arg("achieved_relative_error") = v.achieved_relative_error,
                            py::arg("estimate") = e, py::arg("ratio") = v.value / e, py::arg("system") = ps.id());
        },
        py::arg("kernel"), py::arg("x"), py::arg("y"), py::arg("J") = 1, py::arg("m") = std::vector<double>{},
        py::arg("d") = 0, py::arg("variant") = "a1", py::arg("nodes") = QuadratureSpec{}.nodes);

    m.def("drift", &drift, py::arg("system"), py::arg("x"));
    m.def(
        "_exit_test",
        [](const RootSystem& rs, const Vec& x0, std::size_t paths, int bins, std::uint64_t seed, double h0, double c_w,
           double c_b, double delta_exit, int threads) {
            SdeConfig cfg;
            cfg.seed = seed;
            cfg.h0 = h0;
            cfg.c_w = c_w;
            cfg.c_b = c_b;
            cfg.delta_exit = delta_exit;
            py::gil_scoped_release unlocked;
            return text(histogram_to_json(exit_law_test(rs, x0, paths, bins, cfg, threads)));
        },
        py::arg("system"), py::arg("x0"), py::arg("paths"), py::arg("bins"), py::arg("seed"), py::arg("h0"),
        py::arg("c_w"), py::arg("c_b"), py::arg("delta_exit"), py::arg("threads"));
}

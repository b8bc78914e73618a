// Python bindings: thin wrappers, losses passed by name.
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "sparseclf/io.hpp"

namespace py = pybind11;
using namespace sparseclf;

namespace {

LossKind loss_of(const std::string& name, double mu) { return parse_loss(name, mu); }

CorrelationKind correlation_of(const std::string& s) {
    if (s == "identity") return CorrelationKind::identity;
    if (s == "exponential") return CorrelationKind::exponential;
    if (s == "equicorrelated") return CorrelationKind::equicorrelated;
    throw std::invalid_argument("unknown correlation '" + s + "' (identity, exponential, equicorrelated)");
}

FitOptions fit_options(double rel_tol, int max_cycles, double gamma, double grad_tol) {
    FitOptions o;
    o.rel_tol = rel_tol;
    o.max_full_cycles = max_cycles;
    o.gamma = gamma;
    o.grad_tol = grad_tol;
    o.validate();
    return o;
}

}  // namespace

PYBIND11_MODULE(_sparseclf, m) {
    m.doc() = "Sparse linear classification with l0-l1-l2 penalties";
    py::register_exception<DataError>(m, "DataError", PyExc_ValueError);

    py::class_<Dataset>(m, "Dataset")
        .def(py::init([](const DenseMatrix& X, const Vector& y) { return Dataset::dense(X, y); }), py::arg("X"),
             py::arg("y"))
        .def_property_readonly("n", &Dataset::n)
        .def_property_readonly("p", &Dataset::p)
        .def_property_readonly("y", &Dataset::y)
        .def("to_dense", &Dataset::to_dense)
        .def("with_labels", &Dataset::with_labels, py::arg("y"))
        .def("scores", &Dataset::multiply, py::arg("beta"));

    m.def("load_csv", &load_csv, py::arg("path"), py::arg("has_header") = true, py::arg("label_column") = 0);
    m.def("load_svmlight", &load_svmlight, py::arg("path"));

    m.def(
        "gen_synthetic",
        [](Index n, Index p, Index k_dagger, const std::string& correlation, double rho, double s,
           std::optional<double> snr, std::uint64_t seed) {
            SyntheticSpec spec;
            spec.n = n;
            spec.p = p;
            spec.k_dagger = k_dagger;
            spec.correlation = correlation_of(correlation);
            spec.correlation_param = rho;
            spec.response = snr ? ResponseModel::sign_noise : ResponseModel::bernoulli_logistic;
            spec.response_param = snr ? *snr : s;
            SyntheticData syn = gen_synthetic(spec, seed);
            Dataset val = syn.data.with_labels(gen_validation_response(syn.data, syn.beta_dagger, spec, seed));
            return py::make_tuple(syn.data, val, syn.beta_dagger);
        },
        py::kw_only(), py::arg("n"), py::arg("p"), py::arg("k_dagger"), py::arg("correlation") = "identity",
        py::arg("rho") = 0.0, py::arg("s") = 1.0, py::arg("snr") = py::none(), py::arg("seed"),
        "Returns (train, validation, beta_dagger); validation shares the training features.");

    py::class_<Solution>(m, "Solution")
        .def_readonly("beta", &Solution::beta)
        .def_readonly("support", &Solution::support)
        .def_readonly("objective", &Solution::objective_P)
        .def_property_readonly("converged", [](const Solution& s) { return s.diagnostics.converged; })
        .def_property_readonly("cycles", [](const Solution& s) { return s.diagnostics.cycles; })
        .def("__repr__", [](const Solution& s) {
            return "<Solution support=" + std::to_string(s.support.size()) +
                   " objective=" + std::to_string(s.objective_P) + ">";
        });

    m.def("threshold", [](double c, double l0, double l1, double l2, double lhat) {
        return threshold(c, {l0, l1, l2}, lhat);
    }, py::arg("c"), py::arg("l0"), py::arg("l1"), py::arg("l2"), py::arg("lhat"));

    m.def(
        "lambda0_max",
        [](const Dataset& d, const std::string& loss, double l1, double l2, double mu) {
            return lambda0_max(d, loss_of(loss, mu), l1, l2);
        },
        py::arg("data"), py::arg("loss") = "logistic", py::arg("l1") = 0.0, py::arg("l2") = 0.0, py::arg("mu") = 0.2);

    m.def(
        "fit",
        [](const Dataset& d, const std::string& loss, double l0, double l1, double l2, bool local_search,
           std::optional<Vector> init, double rel_tol, int max_cycles, double gamma, double grad_tol, double mu) {
            const FitOptions o = fit_options(rel_tol, max_cycles, gamma, grad_tol);
            const Vector start = init ? *init : Vector();
            py::gil_scoped_release release;
            if (local_search) return cd_with_local_search(d, loss_of(loss, mu), {l0, l1, l2}, start, o);
            return cd_fit(d, loss_of(loss, mu), {l0, l1, l2}, start, o);
        },
        py::arg("data"), py::arg("loss") = "logistic", py::arg("l0") = 0.0, py::arg("l1") = 0.0, py::arg("l2") = 0.0,
        py::arg("local_search") = false, py::arg("init") = py::none(), py::arg("rel_tol") = 1e-6,
        py::arg("max_cycles") = 1000, py::arg("gamma") = 1.05, py::arg("grad_tol") = 0.0, py::arg("mu") = 0.2,
        "Coordinate descent (optionally with swap local search) at fixed penalties.");

    m.def(
        "iht_fit",
        [](const Dataset& d, Index k, const std::string& loss, double l1, double l2, double mu) {
            ConstrainedSpec spec{k, l1, l2, 1.05};
            py::gil_scoped_release release;
            return iht_fit(d, loss_of(loss, mu), spec, Vector()).solution;
        },
        py::arg("data"), py::arg("k"), py::arg("loss") = "logistic", py::arg("l1") = 0.0, py::arg("l2") = 0.0,
        py::arg("mu") = 0.2);

    py::class_<PathEntry>(m, "PathEntry")
        .def_property_readonly("lambda0", [](const PathEntry& e) { return e.lambda.lambda0; })
        .def_property_readonly("lambda1", [](const PathEntry& e) { return e.lambda.lambda1; })
        .def_property_readonly("lambda2", [](const PathEntry& e) { return e.lambda.lambda2; })
        .def_readonly("solution", &PathEntry::solution);

    py::class_<PathResult>(m, "Path")
        .def_readonly("entries", &PathResult::entries)
        .def("__len__", [](const PathResult& p) { return p.entries.size(); });

    m.def(
        "fit_path",
        [](const Dataset& d, const std::string& loss, std::vector<double> l2, int n_lambda0, double ratio,
           bool local_search, Index max_support, double rel_tol, double mu) {
            GridSpec grid;
            grid.lambda_q_values = std::move(l2);
            grid.n_lambda0 = n_lambda0;
            grid.lambda0_ratio = ratio;
            grid.max_support = max_support;
            PathOptions po;
            po.algorithm = local_search ? PathAlgorithm::cd_local_search : PathAlgorithm::cd;
            po.fit.rel_tol = rel_tol;
            py::gil_scoped_release release;
            return fit_path(d, loss_of(loss, mu), grid, po);
        },
        py::arg("data"), py::arg("loss") = "logistic", py::arg("l2") = std::vector<double>{0.0},
        py::arg("n_lambda0") = 100, py::arg("ratio") = 0.001, py::arg("local_search") = false,
        py::arg("max_support") = 0, py::arg("rel_tol") = 1e-6, py::arg("mu") = 0.2);

    m.def(
        "tune",
        [](const PathResult& path, const Dataset& val, const std::string& loss, double mu) {
            return tune_on_validation(path, val, loss_of(loss, mu)).best;
        },
        py::arg("path"), py::arg("validation"), py::arg("loss") = "logistic", py::arg("mu") = 0.2,
        "Index of the entry with the smallest validation loss.");

    py::class_<MipResult>(m, "MipResult")
        .def_readonly("beta", &MipResult::beta)
        .def_readonly("objective", &MipResult::upper_bound)
        .def_readonly("lower_bound", &MipResult::lower_bound)
        .def_readonly("gap", &MipResult::gap)
        .def_readonly("nodes", &MipResult::nodes_explored)
        .def_readonly("iga_iterations", &MipResult::iga_iterations)
        .def_readonly("big_m", &MipResult::big_m)
        .def_readonly("warnings", &MipResult::warnings)
        .def_property_readonly("status", [](const MipResult& r) { return to_string(r.status); })
        .def_property_readonly("support", &MipResult::support)
        .def("certificate", [](const MipResult& r) { return certificate_to_json(r).dump(); },
             "Certificate as a JSON string.");

    m.def(
        "iga_solve",
        [](const Dataset& d, const std::string& loss, double l0, double l1, double l2,
           std::optional<Solution> warm, double gap_tol, long node_budget, double big_m, double mu) {
            const LossKind kind = loss_of(loss, mu);
            const PenaltyParams lam{l0, l1, l2};
            IgaOptions o;
            o.gap_tol = gap_tol;
            o.node_budget = node_budget;
            o.big_m = big_m;
            py::gil_scoped_release release;
            const Solution start = warm ? *warm : cd_with_local_search(d, kind, lam, Vector());
            return iga_solve(d, kind, lam, start, o);
        },
        py::arg("data"), py::arg("loss") = "logistic", py::arg("l0") = 0.0, py::arg("l1") = 0.0, py::arg("l2") = 0.0,
        py::arg("warm") = py::none(), py::arg("gap_tol") = 1e-6, py::arg("node_budget") = 100000,
        py::arg("big_m") = 0.0, py::arg("mu") = 0.2,
        "Global optimum with a certificate; warm start defaults to coordinate descent + local search.");

    m.def("auc", &auc, py::arg("scores"), py::arg("labels"));

    m.def(
        "recovery_report",
        [](const Vector& estimate, const Vector& truth) {
            const EvalReport r = recovery_report(estimate, truth);
            py::dict out;
            out["f1"] = r.f1;
            out["precision"] = r.precision;
            out["recall"] = r.recall;
            out["support_size"] = r.support_size;
            out["false_positives"] = r.false_positives;
            return out;
        },
        py::arg("estimate"), py::arg("truth"));
}

// sparseclf command-line tool: synth, fit, path, mip, eval, bench.
#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "sparseclf/io.hpp"

using namespace sparseclf;
namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitBudget = 3;

// thrown for bad flag combinations found after parsing
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DataFlags {
    std::string path;
    std::string format = "auto";
    bool no_header = false;
    Index label_column = 0;
    std::string standardize = "none";
    bool constant_column = false;

    void add(CLI::App* cmd, const std::string& flag = "--data") {
        cmd->add_option(flag, path, "CSV (label column + features) or SVMLight file")->required();
        cmd->add_option("--format", format, "auto, csv or svmlight")->check(CLI::IsMember({"auto", "csv", "svmlight"}));
        cmd->add_flag("--no-header", no_header, "CSV has no header row");
        cmd->add_option("--label-column", label_column, "CSV label column index");
        cmd->add_option("--standardize", standardize, "none, unit-l2 or center-unit-l2");
        cmd->add_flag("--add-constant-column", constant_column, "append a penalized all-ones column");
    }
};

Dataset load_any(const std::string& path, const DataFlags& f) {
    std::string format = f.format;
    if (format == "auto") format = fs::path(path).extension() == ".csv" ? "csv" : "svmlight";
    return format == "csv" ? load_csv(path, !f.no_header, f.label_column) : load_svmlight(path);
}

Dataset prepare(const std::string& path, const DataFlags& f) {
    Dataset d = standardize(load_any(path, f), parse_standardize_mode(f.standardize));
    if (f.constant_column) {
        std::cerr << "warning: appending an all-ones column; it is penalized like every other coefficient\n";
        d = add_constant_column(d);
    }
    return d;
}

struct LossFlags {
    std::string loss = "logistic";
    double mu = 0.2;

    void add(CLI::App* cmd) {
        cmd->add_option("--loss", loss, "logistic, squared-hinge or smoothed-hinge");
        cmd->add_option("--mu", mu, "smoothed hinge width");
    }
    LossKind kind() const { return parse_loss(loss, mu); }
};

struct FitFlags {
    double rel_tol = 1e-6;
    int max_cycles = 1000;
    double gamma = 1.05;
    bool screening = false;

    void add(CLI::App* cmd) {
        cmd->add_option("--rel-tol", rel_tol, "relative objective change that counts as converged");
        cmd->add_option("--max-cycles", max_cycles, "coordinate cycle cap");
        cmd->add_option("--gamma", gamma, "Lipschitz inflation factor (> 1)");
        cmd->add_flag("--screening", screening, "start on the top 20% coordinates by |gradient|");
    }
    FitOptions options() const {
        FitOptions o;
        o.rel_tol = rel_tol;
        o.max_full_cycles = max_cycles;
        o.gamma = gamma;
        o.screening = screening;
        o.validate();
        return o;
    }
};

void check_out_dir(const fs::path& file) {
    const fs::path dir = file.parent_path();
    if (!dir.empty() && !fs::is_directory(dir)) throw DataError("output directory does not exist: " + dir.string());
}

void emit(const Json& j, const std::string& out) {
    if (out.empty()) {
        std::cout << j.dump(2) << '\n';
    } else {
        check_out_dir(out);
        write_json(j, out);
    }
}

// ---------------------------------------------------------------------------
// synth

struct SynthArgs {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::string format = "csv";
    Index n = 100, p = 10, k_dagger = 1;
    std::string correlation = "identity";
    double param = 0.0;
    std::string response = "bernoulli-logistic";
    double s = 1.0;
    double snr = 0.0;
};

Json synth_config(const SynthArgs& a, CLI::App* cmd) {
    Json j;
    if (!a.config.empty()) j = read_json(a.config);
    auto set = [&](const char* flag, const char* key, Json v) {
        if (a.config.empty() || cmd->count(flag) > 0) j[key] = std::move(v);
    };
    set("--n", "n", a.n);
    set("--p", "p", a.p);
    set("--k-dagger", "k_dagger", a.k_dagger);
    if (a.config.empty() || cmd->count("--correlation") + cmd->count("--rho") > 0) {
        j["correlation"] = {{"kind", a.correlation}, {"param", a.param}};
    }
    const bool sign_noise = a.response == "sign-noise" || cmd->count("--snr") > 0;
    if (a.config.empty() || cmd->count("--response") + cmd->count("--s") + cmd->count("--snr") > 0) {
        j["response_model"] = sign_noise ? "sign-noise" : "bernoulli-logistic";
        if (sign_noise) {
            j["snr"] = a.snr;
            j.erase("s");
        } else {
            j["s"] = a.s;
            j.erase("snr");
        }
    }
    return j;
}

int run_synth(const SynthArgs& a, CLI::App* cmd) {
    SyntheticConfig cfg = synthetic_from_json(synth_config(a, cmd));
    const auto seed = a.seed ? a.seed : cfg.seed;
    if (!seed) throw UsageError("synth needs an explicit --seed (or a seed in the config file)");
    cfg.spec.validate();
    const fs::path dir = a.out;
    if (!fs::is_directory(dir)) throw DataError("output directory does not exist: " + dir.string());

    const SyntheticData syn = gen_synthetic(cfg.spec, *seed);
    const Dataset val = syn.data.with_labels(gen_validation_response(syn.data, syn.beta_dagger, cfg.spec, *seed));
    const std::string ext = a.format == "csv" ? ".csv" : ".svm";
    auto write = [&](const Dataset& d, const fs::path& f) {
        if (a.format == "csv") {
            write_csv(d, f);
        } else {
            write_svmlight(d, f);
        }
    };
    write(syn.data, dir / ("train" + ext));
    write(val, dir / ("validation" + ext));
    Json truth;
    truth["schema"] = kSchemaVersion;
    truth["p"] = cfg.spec.p;
    truth["coefficients"] = sparse_pairs(syn.beta_dagger);
    write_json(truth, dir / "beta_dagger.json");
    Json spec = synthetic_to_json(cfg.spec, *seed);
    write_json(spec, dir / "spec.json");

    Json summary;
    summary["schema"] = kSchemaVersion;
    summary["spec"] = spec;
    summary["train"] = (dir / ("train" + ext)).string();
    summary["validation"] = (dir / ("validation" + ext)).string();
    summary["beta_dagger"] = (dir / "beta_dagger.json").string();
    double positives = 0;
    for (Index i = 0; i < syn.data.n(); ++i) positives += syn.data.y()[i] > 0;
    summary["positive_fraction"] = positives / static_cast<double>(syn.data.n());
    std::cout << summary.dump(2) << '\n';
    return kExitOk;
}

// ---------------------------------------------------------------------------
// fit

struct FitArgs {
    DataFlags data;
    LossFlags loss;
    FitFlags fit;
    double l0 = 0, l1 = 0, l2 = 0;
    std::string algo = "cd";
    Index k = 0;
    std::string swap_mode = "heuristic";
    std::string out;
};

int run_fit(const FitArgs& a) {
    const LossKind kind = a.loss.kind();
    const Dataset d = prepare(a.data.path, a.data);
    const FitOptions opts = a.fit.options();
    PenaltyParams lam{a.l0, a.l1, a.l2};
    lam.validate();
    Solution sol;
    if (a.algo == "cd") {
        sol = cd_fit(d, kind, lam, Vector(), opts);
    } else if (a.algo == "cd+ls") {
        SwapOptions so;
        so.mode = a.swap_mode == "exhaustive" ? SwapMode::exhaustive : SwapMode::heuristic;
        sol = cd_with_local_search(d, kind, lam, Vector(), opts, so);
    } else {
        if (a.k <= 0) throw UsageError("--algo iht needs --k >= 1");
        ConstrainedSpec spec{a.k, a.l1, a.l2, opts.gamma};
        lam.lambda0 = 0;
        sol = iht_fit(d, kind, spec, Vector()).solution;
    }
    emit(model_to_json({kind, lam, sol.beta}, sol), a.out);
    return kExitOk;
}

// ---------------------------------------------------------------------------
// path

struct PathArgs {
    DataFlags data;
    LossFlags loss;
    FitFlags fit;
    std::string validation;
    std::string algo = "cd";
    int n_lambda0 = 100;
    double ratio = 0.001;
    std::vector<double> l2{0.0};
    std::vector<double> l1;
    bool static_grid = false;
    Index max_support = 0;
    std::string out;
};

int run_path(const PathArgs& a) {
    const LossKind kind = a.loss.kind();
    const Dataset d = prepare(a.data.path, a.data);
    GridSpec grid;
    grid.n_lambda0 = a.n_lambda0;
    grid.lambda0_ratio = a.ratio;
    grid.dynamic = !a.static_grid;
    grid.max_support = a.max_support;
    if (!a.l1.empty()) {
        // l1 swept, l2 held at its single value
        if (a.l2.size() != 1) throw UsageError("with --l1 values, give a single --l2");
        grid.secondary = SecondaryPenalty::l1;
        grid.lambda_q_values = a.l1;
        grid.fixed_other = a.l2.front();
    } else {
        grid.lambda_q_values = a.l2;
    }
    grid.validate();
    PathOptions po;
    po.fit = a.fit.options();
    po.algorithm = a.algo == "cd+ls" ? PathAlgorithm::cd_local_search : PathAlgorithm::cd;
    const PathResult path = fit_path(d, kind, grid, po);
    if (a.validation.empty()) {
        emit(path_to_json(path), a.out);
    } else {
        const Dataset val = prepare(a.validation, a.data);
        if (val.p() != d.p()) throw DataError("validation data has a different number of features");
        const TuneResult tune = tune_on_validation(path, val, kind);
        emit(path_to_json(path, &tune), a.out);
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------
// mip

struct MipArgs {
    DataFlags data;
    LossFlags loss;
    double l0 = 0, l1 = 0, l2 = 0;
    std::string warm = "auto";
    double gap = 1e-6;
    long node_budget = 100000;
    int max_iterations = 100;
    double big_m = 0;
    int max_add = 10;
    std::optional<double> frac_cutoff;
    std::string out;
};

int run_mip(const MipArgs& a) {
    const LossKind kind = a.loss.kind();
    const Dataset d = prepare(a.data.path, a.data);
    const PenaltyParams lam{a.l0, a.l1, a.l2};
    lam.validate();
    Solution warm;
    if (a.warm == "auto") {
        warm = cd_with_local_search(d, kind, lam, Vector());
    } else if (a.warm == "zero") {
        warm = Solution::zero(kind, d, lam);
    } else {
        const Model m = model_from_json(read_json(a.warm));
        if (m.beta.size() != d.p()) throw DataError("warm-start model has a different number of features");
        warm = Solution::from_beta(kind, d, m.beta, lam);
    }
    IgaOptions opts;
    opts.gap_tol = a.gap;
    opts.node_budget = a.node_budget;
    opts.max_iterations = a.max_iterations;
    opts.big_m = a.big_m;
    opts.max_add_per_iter = a.max_add;
    opts.frac_cutoff = a.frac_cutoff;
    const MipResult r = iga_solve(d, kind, lam, warm, opts);
    for (const auto& w : r.warnings) std::cerr << "warning: " << w << '\n';
    emit(certificate_to_json(r), a.out);
    return r.status == MipStatus::budget_exhausted ? kExitBudget : kExitOk;
}

// ---------------------------------------------------------------------------
// eval

struct EvalArgs {
    std::string model;
    DataFlags data;
    std::string truth;
    std::string out;
};

int run_eval(const EvalArgs& a) {
    const Model m = model_from_json(read_json(a.model));
    const Dataset d = prepare(a.data.path, a.data);
    if (m.beta.size() != d.p()) {
        throw DataError("model has p = " + std::to_string(m.beta.size()) + " but the data has p = " +
                        std::to_string(d.p()));
    }
    std::optional<double> auc_value;
    const Vector scores = d.multiply(m.beta);
    const bool both = d.y().maxCoeff() > 0 && d.y().minCoeff() < 0;
    if (both) {
        auc_value = auc(scores, d.y());
    } else {
        std::cerr << "warning: only one class present, AUC undefined\n";
    }
    std::optional<EvalReport> rec;
    if (!a.truth.empty()) {
        const Json t = read_json(a.truth);
        const Vector truth = from_sparse_pairs(t.at("coefficients"), t.at("p").get<Index>());
        if (truth.size() != m.beta.size()) throw DataError("truth vector has a different length than the model");
        rec = recovery_report(m.beta, truth);
    }
    emit(eval_to_json(auc_value, rec), a.out);
    return kExitOk;
}

// ---------------------------------------------------------------------------
// bench

struct Scenario {
    SyntheticSpec spec;
    std::vector<double> lambda2;
    Index max_support = 0;
    bool mip = false;
};

const std::map<std::string, Scenario>& scenarios() {
    static const std::map<std::string, Scenario> registry = [] {
        std::map<std::string, Scenario> r;
        SyntheticSpec s;
        s.n = 600;
        s.p = 200;
        s.correlation = CorrelationKind::exponential;
        s.correlation_param = 0.9;
        s.k_dagger = 10;
        s.response_param = 1.0;
        r["highcorr-small"] = {s, {1e-3, 1e-2, 1e-1}, 60, false};
        s.correlation_param = 0.5;
        r["medcorr-small"] = {s, {1e-3, 1e-2, 1e-1}, 60, false};
        SyntheticSpec s1;
        s1.n = 500;
        s1.p = 2000;
        s1.k_dagger = 10;
        s1.response_param = 1000.0;
        r["setting1-small"] = {s1, {1e-4, 1e-5, 1e-6}, 20, false};
        SyntheticSpec sm;
        sm.n = 100;
        sm.p = 20;
        sm.correlation = CorrelationKind::exponential;
        sm.correlation_param = 0.5;
        sm.k_dagger = 3;
        sm.response_param = 2.0;
        r["mip-small"] = {sm, {1e-2}, 10, true};
        return r;
    }();
    return registry;
}

std::string scenario_list() {
    std::string s;
    for (const auto& [name, _] : scenarios()) s += (s.empty() ? "" : ", ") + name;
    return s;
}

struct MethodRow {
    std::string method;
    double auc = 0.5;
    EvalReport rec;
};

std::vector<MethodRow> bench_seed(const Scenario& sc, std::uint64_t seed) {
    const LossKind kind = LossKind::logistic();
    const SyntheticData syn = gen_synthetic(sc.spec, seed);
    const Dataset& d = syn.data;
    const Dataset val = d.with_labels(gen_validation_response(d, syn.beta_dagger, sc.spec, seed));
    // held-out test design: an independent draw of X from the same spec
    const Dataset test = gen_synthetic(sc.spec, seed + 0x9e3779b97f4a7c15ULL).data;

    std::vector<MethodRow> rows;
    auto record = [&](const std::string& name, const Vector& beta) {
        MethodRow r{name, 0.5, recovery_report(beta, syn.beta_dagger)};
        r.auc = auc(test.multiply(beta), test.y());
        rows.push_back(r);
    };
    auto best_of = [&](const PathResult& path) -> const PathEntry& {
        return path.entries[tune_on_validation(path, val, kind).best];
    };

    GridSpec grid;
    grid.lambda_q_values = sc.lambda2;
    grid.max_support = sc.max_support;
    PathOptions po;
    po.fit.rel_tol = 1e-8;
    po.fit.max_full_cycles = 20000;
    const PathResult cd = fit_path(d, kind, grid, po);
    record("cd", best_of(cd).solution.beta);
    po.algorithm = PathAlgorithm::cd_local_search;
    const PathResult ls = fit_path(d, kind, grid, po);
    const PathEntry& ls_best = best_of(ls);
    record("cd+ls", ls_best.solution.beta);

    // IHT from zero for k = 1 .. 2k, every lambda2; tuned the same way
    PathResult iht;
    const Index kmax = std::min<Index>(2 * sc.spec.k_dagger, d.p());
    for (double l2 : sc.lambda2) {
        iht.slice_begin.push_back(iht.entries.size());
        for (Index k = 1; k <= kmax; ++k) {
            PathEntry e;
            e.lambda = {0.0, 0.0, l2};
            e.solution = iht_fit(d, kind, {k, 0.0, l2, 1.05}, Vector()).solution;
            iht.entries.push_back(std::move(e));
        }
    }
    record("iht", best_of(iht).solution.beta);
    record("l1", best_of(fit_l1_path(d, kind, 100, 0.001, 0.0, {}, 3 * sc.max_support)).solution.beta);

    if (sc.mip) {
        IgaOptions mo;
        mo.node_budget = 20000;
        const MipResult r = iga_solve(d, kind, ls_best.lambda, ls_best.solution, mo);
        record("mip", r.beta);
    }
    return rows;
}

unsigned thread_count(std::size_t jobs) {
    unsigned t = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("SPARSECLF_THREADS")) {
        const int v = std::atoi(env);
        if (v < 1) throw UsageError("SPARSECLF_THREADS must be a positive integer");
        t = static_cast<unsigned>(v);
    }
    return static_cast<unsigned>(std::min<std::size_t>(t, jobs));
}

std::string num(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

struct BenchArgs {
    std::string scenario;
    std::optional<std::uint64_t> seed;
    int seeds = 1;
    std::string out;
};

int run_bench(const BenchArgs& a) {
    const auto it = scenarios().find(a.scenario);
    if (it == scenarios().end()) {
        throw UsageError("unknown scenario '" + a.scenario + "' (available: " + scenario_list() + ")");
    }
    if (!a.seed) throw UsageError("bench needs an explicit --seed");
    if (a.seeds < 1) throw UsageError("--seeds must be >= 1");
    const fs::path dir = a.out;
    if (!fs::is_directory(dir)) throw DataError("output directory does not exist: " + dir.string());

    std::vector<std::vector<MethodRow>> results(static_cast<std::size_t>(a.seeds));
    std::vector<std::string> errors(results.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next++) < results.size();) {
            try {
                results[i] = bench_seed(it->second, *a.seed + i);
            } catch (const std::exception& e) {
                errors[i] = e.what();
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < thread_count(results.size()); ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    for (const auto& e : errors) {
        if (!e.empty()) throw std::runtime_error(e);
    }

    std::ofstream per(dir / "per_seed.csv");
    per << "scenario,seed,method,auc,f1,support,false_positives\n";
    std::vector<std::string> order;
    std::map<std::string, std::vector<const MethodRow*>> by_method;
    for (std::size_t i = 0; i < results.size(); ++i) {
        for (const auto& r : results[i]) {
            per << a.scenario << ',' << *a.seed + i << ',' << r.method << ',' << num(r.auc) << ',' << num(r.rec.f1)
                << ',' << r.rec.support_size << ',' << r.rec.false_positives << '\n';
            if (!by_method.count(r.method)) order.push_back(r.method);
            by_method[r.method].push_back(&r);
        }
    }

    const bool with_se = a.seeds > 1;
    const std::vector<std::pair<std::string, std::function<double(const MethodRow&)>>> cols{
        {"auc", [](const MethodRow& r) { return r.auc; }},
        {"f1", [](const MethodRow& r) { return r.rec.f1; }},
        {"support", [](const MethodRow& r) { return static_cast<double>(r.rec.support_size); }},
        {"false_positives", [](const MethodRow& r) { return static_cast<double>(r.rec.false_positives); }},
    };
    std::ofstream sum(dir / "summary.csv");
    sum << "scenario,method,seeds";
    for (const auto& [name, _] : cols) sum << ',' << name << "_mean" << (with_se ? "," + name + "_stderr" : "");
    sum << '\n';
    for (const auto& m : order) {
        const auto& rows = by_method[m];
        const double n = static_cast<double>(rows.size());
        sum << a.scenario << ',' << m << ',' << rows.size();
        for (const auto& [_, get] : cols) {
            double s = 0, ss = 0;
            for (const auto* r : rows) s += get(*r);
            const double mean = s / n;
            for (const auto* r : rows) ss += (get(*r) - mean) * (get(*r) - mean);
            sum << ',' << num(mean);
            if (with_se) sum << ',' << num(std::sqrt(ss / (n - 1) / n));
        }
        sum << '\n';
    }
    per.close();
    sum.close();
    if (!per || !sum) throw DataError("failed writing tables to " + dir.string());
    std::cout << std::ifstream(dir / "summary.csv").rdbuf();
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sparse linear classification with l0-l1-l2 penalties"};
    app.require_subcommand(1);

    SynthArgs sa;
    auto* synth = app.add_subcommand("synth", "generate a synthetic dataset");
    synth->add_option("--config", sa.config, "JSON spec file (flags override its fields)");
    synth->add_option("--seed", sa.seed, "random seed (mandatory)");
    synth->add_option("--out", sa.out, "existing output directory")->required();
    synth->add_option("--format", sa.format, "csv or svmlight")->check(CLI::IsMember({"csv", "svmlight"}));
    synth->add_option("--n", sa.n, "samples");
    synth->add_option("--p", sa.p, "features");
    synth->add_option("--k-dagger", sa.k_dagger, "planted support size");
    synth->add_option("--correlation", sa.correlation, "identity, exponential or equicorrelated");
    synth->add_option("--rho", sa.param, "correlation parameter");
    synth->add_option("--response", sa.response, "bernoulli-logistic or sign-noise");
    synth->add_option("--s", sa.s, "logistic signal scale");
    synth->add_option("--snr", sa.snr, "signal-to-noise ratio (sign-noise model)");

    FitArgs fa;
    auto* fit = app.add_subcommand("fit", "fit one model at fixed penalties");
    fa.data.add(fit);
    fa.loss.add(fit);
    fa.fit.add(fit);
    fit->add_option("--l0", fa.l0, "lambda0");
    fit->add_option("--l1", fa.l1, "lambda1");
    fit->add_option("--l2", fa.l2, "lambda2");
    fit->add_option("--algo", fa.algo, "cd, cd+ls or iht")->check(CLI::IsMember({"cd", "cd+ls", "iht"}));
    fit->add_option("--k", fa.k, "support size for iht");
    fit->add_option("--swap-mode", fa.swap_mode, "heuristic or exhaustive")
        ->check(CLI::IsMember({"heuristic", "exhaustive"}));
    fit->add_option("--out", fa.out, "model JSON (stdout if omitted)");

    PathArgs pa;
    auto* path = app.add_subcommand("path", "regularization path over (lambda0, lambda_q)");
    pa.data.add(path);
    pa.loss.add(path);
    pa.fit.add(path);
    path->add_option("--validation", pa.validation, "validation file for tuning");
    path->add_option("--algo", pa.algo, "cd or cd+ls")->check(CLI::IsMember({"cd", "cd+ls"}));
    path->add_option("--n-lambda0", pa.n_lambda0, "lambda0 grid size");
    path->add_option("--ratio", pa.ratio, "smallest lambda0 / lambda0_max");
    path->add_option("--l2", pa.l2, "lambda2 value(s)");
    path->add_option("--l1", pa.l1, "sweep lambda1 over these values instead of lambda2");
    path->add_flag("--static-grid", pa.static_grid, "use the plain log-spaced lambda0 grid");
    path->add_option("--max-support", pa.max_support, "stop a slice once the support exceeds this");
    path->add_option("--out", pa.out, "path JSON (stdout if omitted)");

    MipArgs ma;
    auto* mip = app.add_subcommand("mip", "certify global optimality with integrality generation");
    ma.data.add(mip);
    ma.loss.add(mip);
    mip->add_option("--l0", ma.l0, "lambda0");
    mip->add_option("--l1", ma.l1, "lambda1");
    mip->add_option("--l2", ma.l2, "lambda2");
    mip->add_option("--warm", ma.warm, "auto, zero, or a model JSON file");
    mip->add_option("--gap", ma.gap, "relative optimality gap to stop at");
    mip->add_option("--node-budget", ma.node_budget, "maximum relaxations solved");
    mip->add_option("--max-iterations", ma.max_iterations, "integrality generation rounds");
    mip->add_option("--big-m", ma.big_m, "coefficient bound (0 = 1.2 max|warm|)");
    mip->add_option("--max-add", ma.max_add, "indicators made binary per round");
    mip->add_option("--frac-cutoff", ma.frac_cutoff, "make every indicator >= cutoff binary instead");
    mip->add_option("--out", ma.out, "certificate JSON (stdout if omitted)");

    EvalArgs ea;
    auto* eval = app.add_subcommand("eval", "AUC and support recovery of a fitted model");
    eval->add_option("--model", ea.model, "model JSON")->required();
    ea.data.add(eval);
    eval->add_option("--truth", ea.truth, "beta_dagger JSON from synth");
    eval->add_option("--out", ea.out, "report JSON (stdout if omitted)");

    BenchArgs ba;
    auto* bench = app.add_subcommand("bench", "run a built-in experiment over several seeds");
    bench->add_option("--scenario", ba.scenario, "one of: " + scenario_list())->required();
    bench->add_option("--seed", ba.seed, "first seed (mandatory)");
    bench->add_option("--seeds", ba.seeds, "number of consecutive seeds");
    bench->add_option("--out", ba.out, "existing output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*synth) return run_synth(sa, synth);
        if (*fit) return run_fit(fa);
        if (*path) return run_path(pa);
        if (*mip) return run_mip(ma);
        if (*eval) return run_eval(ea);
        if (*bench) return run_bench(ba);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}

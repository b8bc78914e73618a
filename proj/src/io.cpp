#include "sparseclf/io.hpp"

#include <fstream>
#include <stdexcept>

namespace sparseclf {

Json sparse_pairs(const Vector& beta) {
    Json out = Json::array();
    for (Index i = 0; i < beta.size(); ++i) {
        if (beta[i] != 0.0) out.push_back(Json::array({i, beta[i]}));
    }
    return out;
}

Vector from_sparse_pairs(const Json& pairs, Index p) {
    Vector beta = Vector::Zero(p);
    for (const auto& e : pairs) {
        if (!e.is_array() || e.size() != 2) throw DataError("coefficients must be [index, value] pairs");
        const auto i = e[0].get<Index>();
        if (i < 0 || i >= p) throw DataError("coefficient index " + std::to_string(i) + " out of range");
        beta[i] = e[1].get<double>();
    }
    return beta;
}

namespace {

const char* correlation_name(CorrelationKind k) {
    switch (k) {
        case CorrelationKind::identity: return "identity";
        case CorrelationKind::exponential: return "exponential";
        case CorrelationKind::equicorrelated: return "equicorrelated";
    }
    return "identity";
}

CorrelationKind parse_correlation(const std::string& s) {
    if (s == "identity") return CorrelationKind::identity;
    if (s == "exponential") return CorrelationKind::exponential;
    if (s == "equicorrelated") return CorrelationKind::equicorrelated;
    throw DataError("unknown correlation kind '" + s + "' (identity, exponential, equicorrelated)");
}

}  // namespace

Json synthetic_to_json(const SyntheticSpec& spec, std::uint64_t seed) {
    Json j;
    j["schema"] = kSchemaVersion;
    j["n"] = spec.n;
    j["p"] = spec.p;
    j["correlation"] = {{"kind", correlation_name(spec.correlation)}, {"param", spec.correlation_param}};
    j["k_dagger"] = spec.k_dagger;
    if (spec.response == ResponseModel::bernoulli_logistic) {
        j["s"] = spec.response_param;
        j["response_model"] = "bernoulli-logistic";
    } else {
        j["snr"] = spec.response_param;
        j["response_model"] = "sign-noise";
    }
    j["seed"] = seed;
    return j;
}

SyntheticConfig synthetic_from_json(const Json& j) {
    SyntheticConfig out;
    try {
        auto& s = out.spec;
        s.n = j.at("n").get<Index>();
        s.p = j.at("p").get<Index>();
        if (j.contains("correlation")) {
            const auto& c = j.at("correlation");
            s.correlation = parse_correlation(c.at("kind").get<std::string>());
            s.correlation_param = c.value("param", 0.0);
        }
        s.k_dagger = j.at("k_dagger").get<Index>();
        const std::string model = j.value("response_model", std::string("bernoulli-logistic"));
        if (model == "bernoulli-logistic") {
            s.response = ResponseModel::bernoulli_logistic;
            s.response_param = j.at("s").get<double>();
        } else if (model == "sign-noise") {
            s.response = ResponseModel::sign_noise;
            s.response_param = j.at("snr").get<double>();
        } else {
            throw DataError("unknown response model '" + model + "' (bernoulli-logistic, sign-noise)");
        }
        if (j.contains("seed") && !j.at("seed").is_null()) out.seed = j.at("seed").get<std::uint64_t>();
    } catch (const Json::exception& e) {
        throw DataError(std::string("bad synthetic spec: ") + e.what());
    }
    out.spec.validate();
    return out;
}

Json model_to_json(const Model& m, const Solution& sol) {
    Json j;
    j["schema"] = kSchemaVersion;
    j["loss"] = m.kind.name();
    if (m.kind.type == LossType::smoothed_hinge) j["mu"] = m.kind.mu;
    j["lambda0"] = m.lambda.lambda0;
    j["lambda1"] = m.lambda.lambda1;
    j["lambda2"] = m.lambda.lambda2;
    j["p"] = m.beta.size();
    j["support"] = sol.support;
    j["coefficients"] = sparse_pairs(m.beta);
    j["objective"] = sol.objective_P;
    j["converged"] = sol.diagnostics.converged;
    return j;
}

Model model_from_json(const Json& j) {
    try {
        Model m;
        m.kind = parse_loss(j.at("loss").get<std::string>(), j.value("mu", 0.2));
        m.lambda = {j.value("lambda0", 0.0), j.value("lambda1", 0.0), j.value("lambda2", 0.0)};
        m.beta = from_sparse_pairs(j.at("coefficients"), j.at("p").get<Index>());
        return m;
    } catch (const Json::exception& e) {
        throw DataError(std::string("bad model file: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw DataError(std::string("bad model file: ") + e.what());
    }
}

Json path_entry_to_json(const PathEntry& e, const ValidationRow* row) {
    Json j;
    j["lambda0"] = e.lambda.lambda0;
    j["lambda1"] = e.lambda.lambda1;
    j["lambda2"] = e.lambda.lambda2;
    j["support"] = e.solution.support;
    j["coefficients"] = sparse_pairs(e.solution.beta);
    j["objective"] = e.solution.objective_P;
    j["converged"] = e.solution.diagnostics.converged;
    if (row != nullptr) {
        j["val_loss"] = row->val_loss;
        j["auc"] = row->auc;
    }
    return j;
}

Json path_to_json(const PathResult& path, const TuneResult* tune) {
    Json entries = Json::array();
    for (std::size_t e = 0; e < path.entries.size(); ++e) {
        const ValidationRow* row = tune != nullptr ? &tune->table[e] : nullptr;
        entries.push_back(path_entry_to_json(path.entries[e], row));
    }
    Json j;
    j["schema"] = kSchemaVersion;
    j["entries"] = std::move(entries);
    if (tune != nullptr) j["best"] = tune->best;
    return j;
}

Json certificate_to_json(const MipResult& r) {
    Json j;
    j["schema"] = kSchemaVersion;
    j["objective"] = r.upper_bound;
    j["lower_bound"] = r.lower_bound;
    j["gap"] = r.gap;
    j["support"] = r.support();
    j["coefficients"] = sparse_pairs(r.beta);
    j["big_m"] = r.big_m;
    j["nodes"] = r.nodes_explored;
    j["iga_iterations"] = r.iga_iterations;
    j["status"] = to_string(r.status);
    j["warnings"] = r.warnings;
    return j;
}

Json eval_to_json(const std::optional<double>& auc_value, const std::optional<EvalReport>& recovery) {
    Json j;
    j["schema"] = kSchemaVersion;
    j["auc"] = auc_value ? Json(*auc_value) : Json(nullptr);
    for (const char* key : {"f1", "precision", "recall", "support_size", "false_positives"}) j[key] = nullptr;
    if (recovery) {
        j["f1"] = recovery->f1;
        j["precision"] = recovery->precision;
        j["recall"] = recovery->recall;
        j["support_size"] = recovery->support_size;
        j["false_positives"] = recovery->false_positives;
    }
    return j;
}

Json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

void write_json(const Json& j, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path.string());
    out << j.dump(2) << '\n';
    if (!out) throw DataError("write failed for " + path.string());
}

}  // namespace sparseclf

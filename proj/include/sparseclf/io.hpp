#pragma once

#include <filesystem>
#include <optional>

#include <json.hpp>

#include "sparseclf/iht.hpp"
#include "sparseclf/metrics.hpp"
#include "sparseclf/mip.hpp"
#include "sparseclf/path.hpp"

namespace sparseclf {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

/// [[index, value], ...] for the nonzero entries.
Json sparse_pairs(const Vector& beta);
Vector from_sparse_pairs(const Json& pairs, Index p);

struct SyntheticConfig {
    SyntheticSpec spec;
    std::optional<std::uint64_t> seed;
};

/// {n, p, correlation:{kind, param}, k_dagger, s | snr, response_model, seed}
Json synthetic_to_json(const SyntheticSpec& spec, std::uint64_t seed);
SyntheticConfig synthetic_from_json(const Json& j);

/// A fitted model: loss, penalties, p and the sparse coefficients.
struct Model {
    LossKind kind;
    PenaltyParams lambda;
    Vector beta;
};

Json model_to_json(const Model& m, const Solution& sol);
Model model_from_json(const Json& j);

Json path_entry_to_json(const PathEntry& e, const ValidationRow* row = nullptr);
Json path_to_json(const PathResult& path, const TuneResult* tune = nullptr);

Json certificate_to_json(const MipResult& r);
Json eval_to_json(const std::optional<double>& auc_value, const std::optional<EvalReport>& recovery);

Json read_json(const std::filesystem::path& path);
void write_json(const Json& j, const std::filesystem::path& path);

}  // namespace sparseclf

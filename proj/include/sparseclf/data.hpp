#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <stdexcept>
#include <string>
#include <variant>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace sparseclf {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using DenseMatrix = Eigen::MatrixXd;
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor>;

/// Raised for malformed input files and invalid dataset construction.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/**
 * Design matrix with +-1 labels.
 *
 * Columns are stored either densely (column-major) or as a compressed sparse
 * column matrix. The feature storage is shared between copies, so relabelling
 * (fixed-design validation) does not duplicate X. A Dataset never changes
 * after construction.
 */
class Dataset {
public:
    static Dataset dense(DenseMatrix X, Vector y);
    static Dataset sparse(SparseMatrix X, Vector y);

    Index n() const { return n_; }
    Index p() const { return p_; }
    bool is_sparse() const { return std::holds_alternative<SparseMatrix>(*storage_); }

    const Vector& y() const { return y_; }
    const Vector& col_sq_norms() const { return *col_sq_norms_; }

    const DenseMatrix& dense_matrix() const;
    const SparseMatrix& sparse_matrix() const;

    /// <X_j, v>
    double col_dot(Index j, const Vector& v) const;
    /// v += a * X_j
    void col_axpy(Index j, double a, Vector& v) const;
    /// Number of stored entries of column j (n for dense storage).
    Index col_nnz(Index j) const;

    Vector multiply(const Vector& beta) const;
    Vector multiply_transpose(const Vector& r) const;

    /// Same features, new labels.
    Dataset with_labels(Vector y) const;

    /// Dense copy of the features (for small problems and tests).
    DenseMatrix to_dense() const;

private:
    using Storage = std::variant<DenseMatrix, SparseMatrix>;

    Dataset(std::shared_ptr<const Storage> storage, Vector y);

    std::shared_ptr<const Storage> storage_;
    std::shared_ptr<const Vector> col_sq_norms_;
    Vector y_;
    Index n_ = 0;
    Index p_ = 0;
};

// ---------------------------------------------------------------------------
// File formats

/// CSV with one label column. Labels in {-1,+1} or {0,1} (0 maps to -1).
Dataset load_csv(const std::filesystem::path& path, bool has_header, Index label_column);
/// Writes the label as column 0 followed by the p features.
void write_csv(const Dataset& d, const std::filesystem::path& path, bool header = true);

/// SVMLight / LIBSVM text format with 1-based, strictly increasing indices.
Dataset load_svmlight(const std::filesystem::path& path);
void write_svmlight(const Dataset& d, const std::filesystem::path& path);

enum class StandardizeMode { none, unit_l2, center_unit_l2 };

StandardizeMode parse_standardize_mode(const std::string& name);

/// Returns a new dataset; all-zero columns are left untouched.
Dataset standardize(const Dataset& d, StandardizeMode mode);

/// Appends an all-ones (penalized) column. There is no unpenalized intercept.
Dataset add_constant_column(const Dataset& d);

// ---------------------------------------------------------------------------
// Synthetic data

enum class CorrelationKind { identity, exponential, equicorrelated };
enum class ResponseModel { bernoulli_logistic, sign_noise };

struct SyntheticSpec {
    Index n = 100;
    Index p = 10;
    CorrelationKind correlation = CorrelationKind::identity;
    /// rho for exponential, c for equicorrelated; ignored for identity.
    double correlation_param = 0.0;
    Index k_dagger = 1;
    ResponseModel response = ResponseModel::bernoulli_logistic;
    /// s for bernoulli-logistic, SNR for sign-noise.
    double response_param = 1.0;

    /// Throws DataError when an invariant is violated.
    void validate() const;
};

struct SyntheticData {
    Dataset data;
    Vector beta_dagger;
};

/**
 * Rows of X are i.i.d. N(0, Sigma), beta_dagger has k_dagger ones at
 * equi-spaced indices floor(t * p / k_dagger), t = 0..k_dagger-1.
 *
 * Random streams: every draw comes from std::mt19937_64 seeded with
 * std::seed_seq{seed_lo, seed_hi, stream}. Stream 0 produces X, stream 1 the
 * training labels, stream 2 validation labels. Normal deviates use
 * boost::random::normal_distribution, whose algorithm is fixed across
 * platforms, so outputs are bit-reproducible.
 */
SyntheticData gen_synthetic(const SyntheticSpec& spec, std::uint64_t seed);

/// Fresh labels on the same feature matrix (fixed design).
Vector gen_validation_response(const Dataset& d, const Vector& beta_dagger,
                               const SyntheticSpec& spec, std::uint64_t seed);

/// Population Var(x^T beta) under the spec's covariance.
double population_signal_variance(const SyntheticSpec& spec, const Vector& beta);

}  // namespace sparseclf

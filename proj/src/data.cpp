#include "sparseclf/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <string_view>
#include <vector>

#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_01.hpp>

namespace sparseclf {

namespace {

Vector column_sq_norms(const DenseMatrix& X) {
    return X.colwise().squaredNorm().transpose();
}

Vector column_sq_norms(const SparseMatrix& X) {
    Vector out = Vector::Zero(X.cols());
    for (Index j = 0; j < X.outerSize(); ++j) {
        double s = 0.0;
        for (SparseMatrix::InnerIterator it(X, j); it; ++it) s += it.value() * it.value();
        out[j] = s;
    }
    return out;
}

void check_labels(const Vector& y) {
    for (Index i = 0; i < y.size(); ++i) {
        if (y[i] != 1.0 && y[i] != -1.0) {
            throw DataError("label at row " + std::to_string(i + 1) + " is not -1 or +1");
        }
    }
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

bool parse_double(std::string_view s, double& out) {
    s = trim(s);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    if (s.empty()) return false;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(out);
}

bool parse_index(std::string_view s, long long& out) {
    s = trim(s);
    if (s.empty()) return false;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size();
}

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        auto pos = line.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

/// Maps raw labels to +-1. Accepts {-1,+1} or {0,1}; mixing 0 and -1 is rejected.
Vector map_labels(const std::vector<double>& raw, const std::vector<std::size_t>& rows) {
    bool saw_zero = false;
    bool saw_minus = false;
    Vector y(static_cast<Index>(raw.size()));
    for (std::size_t i = 0; i < raw.size(); ++i) {
        double v = raw[i];
        if (v == 1.0) {
            y[static_cast<Index>(i)] = 1.0;
        } else if (v == -1.0) {
            saw_minus = true;
            y[static_cast<Index>(i)] = -1.0;
        } else if (v == 0.0) {
            saw_zero = true;
            y[static_cast<Index>(i)] = -1.0;
        } else {
            std::ostringstream msg;
            msg << "row " << rows[i] << ": label " << v << " is not one of {-1,+1} or {0,1}";
            throw DataError(msg.str());
        }
    }
    if (saw_zero && saw_minus) throw DataError("labels mix the {0,1} and {-1,+1} encodings");
    return y;
}

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

std::mt19937_64 make_stream(std::uint64_t seed, std::uint32_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu),
                      static_cast<std::uint32_t>(seed >> 32), stream};
    return std::mt19937_64(seq);
}

constexpr std::uint32_t kFeatureStream = 0;
constexpr std::uint32_t kTrainLabelStream = 1;
constexpr std::uint32_t kValidationLabelStream = 2;

Vector draw_labels(const Vector& eta, const SyntheticSpec& spec, double signal_variance,
                   std::mt19937_64& gen) {
    Vector y(eta.size());
    if (spec.response == ResponseModel::bernoulli_logistic) {
        boost::random::uniform_01<double> unif;
        for (Index i = 0; i < eta.size(); ++i) {
            double prob = 1.0 / (1.0 + std::exp(-spec.response_param * eta[i]));
            y[i] = unif(gen) < prob ? 1.0 : -1.0;
        }
    } else {
        double sigma = std::sqrt(signal_variance / spec.response_param);
        boost::random::normal_distribution<double> noise(0.0, 1.0);
        for (Index i = 0; i < eta.size(); ++i) {
            y[i] = eta[i] + sigma * noise(gen) >= 0.0 ? 1.0 : -1.0;
        }
    }
    return y;
}

}  // namespace

// ---------------------------------------------------------------------------
// Dataset

Dataset::Dataset(std::shared_ptr<const Storage> storage, Vector y)
    : storage_(std::move(storage)), y_(std::move(y)) {
    std::visit(
        [this](const auto& X) {
            n_ = X.rows();
            p_ = X.cols();
            col_sq_norms_ = std::make_shared<const Vector>(column_sq_norms(X));
        },
        *storage_);
    if (n_ < 1 || p_ < 1) throw DataError("dataset needs n >= 1 and p >= 1");
    if (y_.size() != n_) throw DataError("label vector length does not match the row count");
    check_labels(y_);
}

Dataset Dataset::dense(DenseMatrix X, Vector y) {
    if (!X.allFinite()) throw DataError("feature matrix contains non-finite values");
    return Dataset(std::make_shared<const Storage>(std::move(X)), std::move(y));
}

Dataset Dataset::sparse(SparseMatrix X, Vector y) {
    X.makeCompressed();
    for (Index k = 0; k < X.nonZeros(); ++k) {
        if (!std::isfinite(X.valuePtr()[k])) throw DataError("feature matrix contains non-finite values");
    }
    return Dataset(std::make_shared<const Storage>(std::move(X)), std::move(y));
}

const DenseMatrix& Dataset::dense_matrix() const {
    if (is_sparse()) throw std::logic_error("dataset uses sparse storage");
    return std::get<DenseMatrix>(*storage_);
}

const SparseMatrix& Dataset::sparse_matrix() const {
    if (!is_sparse()) throw std::logic_error("dataset uses dense storage");
    return std::get<SparseMatrix>(*storage_);
}

double Dataset::col_dot(Index j, const Vector& v) const {
    if (!is_sparse()) return std::get<DenseMatrix>(*storage_).col(j).dot(v);
    const auto& X = std::get<SparseMatrix>(*storage_);
    double s = 0.0;
    for (SparseMatrix::InnerIterator it(X, j); it; ++it) s += it.value() * v[it.index()];
    return s;
}

void Dataset::col_axpy(Index j, double a, Vector& v) const {
    if (!is_sparse()) {
        v.noalias() += a * std::get<DenseMatrix>(*storage_).col(j);
        return;
    }
    const auto& X = std::get<SparseMatrix>(*storage_);
    for (SparseMatrix::InnerIterator it(X, j); it; ++it) v[it.index()] += a * it.value();
}

Index Dataset::col_nnz(Index j) const {
    if (!is_sparse()) return n_;
    const auto& X = std::get<SparseMatrix>(*storage_);
    return X.outerIndexPtr()[j + 1] - X.outerIndexPtr()[j];
}

Vector Dataset::multiply(const Vector& beta) const {
    return std::visit([&](const auto& X) -> Vector { return X * beta; }, *storage_);
}

Vector Dataset::multiply_transpose(const Vector& r) const {
    return std::visit([&](const auto& X) -> Vector { return X.transpose() * r; }, *storage_);
}

Dataset Dataset::with_labels(Vector y) const {
    return Dataset(storage_, std::move(y));
}

DenseMatrix Dataset::to_dense() const {
    if (!is_sparse()) return std::get<DenseMatrix>(*storage_);
    return DenseMatrix(std::get<SparseMatrix>(*storage_));
}

// ---------------------------------------------------------------------------
// CSV

Dataset load_csv(const std::filesystem::path& path, bool has_header, Index label_column) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());

    std::vector<std::vector<double>> rows;
    std::vector<double> raw_labels;
    std::vector<std::size_t> row_numbers;
    std::size_t width = 0;
    std::size_t line_no = 0;
    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        if (has_header && line_no == 1) continue;
        if (trim(line).empty()) continue;
        auto fields = split(line, ',');
        if (width == 0) {
            width = fields.size();
            if (width < 2) throw DataError("row " + std::to_string(line_no) + ": need a label and at least one feature");
            if (label_column < 0 || static_cast<std::size_t>(label_column) >= width) {
                throw DataError("label column " + std::to_string(label_column) + " is out of range");
            }
        } else if (fields.size() != width) {
            throw DataError("row " + std::to_string(line_no) + ": expected " + std::to_string(width) +
                            " fields, found " + std::to_string(fields.size()));
        }
        std::vector<double> feats;
        feats.reserve(width - 1);
        for (std::size_t c = 0; c < fields.size(); ++c) {
            double v = 0.0;
            if (!parse_double(fields[c], v)) {
                throw DataError("row " + std::to_string(line_no) + ", column " + std::to_string(c + 1) +
                                ": cannot parse '" + std::string(trim(fields[c])) + "'");
            }
            if (static_cast<Index>(c) == label_column) {
                raw_labels.push_back(v);
            } else {
                feats.push_back(v);
            }
        }
        rows.push_back(std::move(feats));
        row_numbers.push_back(line_no);
    }
    if (rows.empty()) throw DataError("no rows in " + path.string());

    Vector y = map_labels(raw_labels, row_numbers);
    DenseMatrix X(static_cast<Index>(rows.size()), static_cast<Index>(width - 1));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j + 1 < width; ++j) X(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
    }
    return Dataset::dense(std::move(X), std::move(y));
}

void write_csv(const Dataset& d, const std::filesystem::path& path, bool header) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path.string());
    DenseMatrix X = d.to_dense();
    if (header) {
        out << "label";
        for (Index j = 0; j < d.p(); ++j) out << ",x" << (j + 1);
        out << '\n';
    }
    for (Index i = 0; i < d.n(); ++i) {
        out << (d.y()[i] > 0 ? "1" : "-1");
        for (Index j = 0; j < d.p(); ++j) out << ',' << format_double(X(i, j));
        out << '\n';
    }
    if (!out) throw DataError("write failed for " + path.string());
}

// ---------------------------------------------------------------------------
// SVMLight

Dataset load_svmlight(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());

    std::vector<Eigen::Triplet<double>> triplets;
    std::vector<double> raw_labels;
    std::vector<std::size_t> row_numbers;
    long long max_index = 0;
    std::size_t line_no = 0;
    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view body(line);
        if (auto hash = body.find('#'); hash != std::string_view::npos) body = body.substr(0, hash);
        body = trim(body);
        if (body.empty()) continue;

        std::vector<std::string_view> tokens;
        for (auto tok : split(body, ' ')) {
            for (auto t : split(tok, '\t')) {
                if (!trim(t).empty()) tokens.push_back(trim(t));
            }
        }
        double label = 0.0;
        if (!parse_double(tokens[0], label)) {
            throw DataError("line " + std::to_string(line_no) + ": cannot parse label '" + std::string(tokens[0]) + "'");
        }
        const auto row = static_cast<int>(raw_labels.size());
        long long prev = 0;
        for (std::size_t t = 1; t < tokens.size(); ++t) {
            auto colon = tokens[t].find(':');
            long long idx = 0;
            double val = 0.0;
            if (colon == std::string_view::npos || !parse_index(tokens[t].substr(0, colon), idx) ||
                !parse_double(tokens[t].substr(colon + 1), val)) {
                throw DataError("line " + std::to_string(line_no) + ": cannot parse token '" +
                                std::string(tokens[t]) + "'");
            }
            if (idx < 1) throw DataError("line " + std::to_string(line_no) + ": indices are 1-based");
            if (idx <= prev) throw DataError("line " + std::to_string(line_no) + ": indices not increasing");
            prev = idx;
            max_index = std::max(max_index, idx);
            if (val != 0.0) triplets.emplace_back(row, static_cast<int>(idx - 1), val);
        }
        raw_labels.push_back(label);
        row_numbers.push_back(line_no);
    }
    if (raw_labels.empty()) throw DataError("no rows in " + path.string());
    if (max_index == 0) throw DataError("no features in " + path.string());

    Vector y = map_labels(raw_labels, row_numbers);
    SparseMatrix X(static_cast<Index>(raw_labels.size()), static_cast<Index>(max_index));
    X.setFromTriplets(triplets.begin(), triplets.end());
    return Dataset::sparse(std::move(X), std::move(y));
}

void write_svmlight(const Dataset& d, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path.string());
    SparseMatrix X = d.is_sparse() ? d.sparse_matrix() : d.dense_matrix().sparseView();
    SparseMatrix rows = X.transpose();  // column-major transpose gives row access
    for (Index i = 0; i < d.n(); ++i) {
        out << (d.y()[i] > 0 ? "+1" : "-1");
        for (SparseMatrix::InnerIterator it(rows, i); it; ++it) {
            out << ' ' << (it.index() + 1) << ':' << format_double(it.value());
        }
        out << '\n';
    }
    if (!out) throw DataError("write failed for " + path.string());
}

// ---------------------------------------------------------------------------
// Standardization

StandardizeMode parse_standardize_mode(const std::string& name) {
    if (name == "none") return StandardizeMode::none;
    if (name == "unit-l2") return StandardizeMode::unit_l2;
    if (name == "center-and-unit-l2") return StandardizeMode::center_unit_l2;
    throw DataError("unknown standardization mode '" + name + "' (none, unit-l2, center-and-unit-l2)");
}

Dataset standardize(const Dataset& d, StandardizeMode mode) {
    switch (mode) {
    case StandardizeMode::none:
        return d.is_sparse() ? Dataset::sparse(d.sparse_matrix(), d.y()) : Dataset::dense(d.dense_matrix(), d.y());
    case StandardizeMode::unit_l2:
        if (d.is_sparse()) {
            SparseMatrix X = d.sparse_matrix();
            for (Index j = 0; j < X.outerSize(); ++j) {
                double norm = std::sqrt(d.col_sq_norms()[j]);
                if (norm == 0.0) continue;
                for (SparseMatrix::InnerIterator it(X, j); it; ++it) it.valueRef() /= norm;
            }
            return Dataset::sparse(std::move(X), d.y());
        } else {
            DenseMatrix X = d.dense_matrix();
            for (Index j = 0; j < X.cols(); ++j) {
                double norm = std::sqrt(d.col_sq_norms()[j]);
                if (norm != 0.0) X.col(j) /= norm;
            }
            return Dataset::dense(std::move(X), d.y());
        }
    case StandardizeMode::center_unit_l2: {
        if (d.is_sparse()) throw DataError("centering requires dense storage");
        DenseMatrix X = d.dense_matrix();
        for (Index j = 0; j < X.cols(); ++j) {
            if (d.col_sq_norms()[j] == 0.0) continue;
            X.col(j).array() -= X.col(j).mean();
            double norm = X.col(j).norm();
            if (norm != 0.0) X.col(j) /= norm;
        }
        return Dataset::dense(std::move(X), d.y());
    }
    }
    throw std::logic_error("unreachable standardization mode");
}

Dataset add_constant_column(const Dataset& d) {
    if (d.is_sparse()) {
        SparseMatrix X = d.sparse_matrix();
        SparseMatrix out(X.rows(), X.cols() + 1);
        std::vector<Eigen::Triplet<double>> trip;
        trip.reserve(static_cast<std::size_t>(X.nonZeros() + X.rows()));
        for (Index j = 0; j < X.outerSize(); ++j) {
            for (SparseMatrix::InnerIterator it(X, j); it; ++it) trip.emplace_back(it.index(), j, it.value());
        }
        for (Index i = 0; i < X.rows(); ++i) trip.emplace_back(i, X.cols(), 1.0);
        out.setFromTriplets(trip.begin(), trip.end());
        return Dataset::sparse(std::move(out), d.y());
    }
    DenseMatrix X(d.n(), d.p() + 1);
    X.leftCols(d.p()) = d.dense_matrix();
    X.col(d.p()).setOnes();
    return Dataset::dense(std::move(X), d.y());
}

// ---------------------------------------------------------------------------
// Synthetic generation

void SyntheticSpec::validate() const {
    if (n < 1 || p < 1) throw DataError("synthetic spec needs n >= 1 and p >= 1");
    if (k_dagger < 1 || k_dagger > p) throw DataError("k_dagger must lie in [1, p]");
    if (correlation != CorrelationKind::identity && !(correlation_param >= 0.0 && correlation_param < 1.0)) {
        throw DataError("correlation parameter must lie in [0, 1)");
    }
    if (!(response_param > 0.0) || !std::isfinite(response_param)) {
        throw DataError(response == ResponseModel::bernoulli_logistic ? "signal scale s must be positive"
                                                                       : "snr must be positive");
    }
}

double population_signal_variance(const SyntheticSpec& spec, const Vector& beta) {
    const Index p = beta.size();
    switch (spec.correlation) {
    case CorrelationKind::identity:
        return beta.squaredNorm();
    case CorrelationKind::equicorrelated: {
        double c = spec.correlation_param;
        double sum = beta.sum();
        return (1.0 - c) * beta.squaredNorm() + c * sum * sum;
    }
    case CorrelationKind::exponential: {
        double rho = spec.correlation_param;
        double v = 0.0;
        for (Index i = 0; i < p; ++i) {
            if (beta[i] == 0.0) continue;
            for (Index j = 0; j < p; ++j) {
                if (beta[j] != 0.0) v += beta[i] * beta[j] * std::pow(rho, static_cast<double>(std::abs(i - j)));
            }
        }
        return v;
    }
    }
    return 0.0;
}

SyntheticData gen_synthetic(const SyntheticSpec& spec, std::uint64_t seed) {
    spec.validate();
    const Index n = spec.n;
    const Index p = spec.p;

    Vector beta = Vector::Zero(p);
    for (Index t = 0; t < spec.k_dagger; ++t) beta[(t * p) / spec.k_dagger] = 1.0;

    auto gen = make_stream(seed, kFeatureStream);
    boost::random::normal_distribution<double> normal(0.0, 1.0);
    DenseMatrix X(n, p);
    const double rho = spec.correlation_param;
    const double innov = std::sqrt(1.0 - rho * rho);
    const double shared = std::sqrt(rho);
    const double idio = std::sqrt(1.0 - rho);
    for (Index i = 0; i < n; ++i) {
        switch (spec.correlation) {
        case CorrelationKind::identity:
            for (Index j = 0; j < p; ++j) X(i, j) = normal(gen);
            break;
        case CorrelationKind::exponential:
            X(i, 0) = normal(gen);
            for (Index j = 1; j < p; ++j) X(i, j) = rho * X(i, j - 1) + innov * normal(gen);
            break;
        case CorrelationKind::equicorrelated: {
            double z = normal(gen);
            for (Index j = 0; j < p; ++j) X(i, j) = shared * z + idio * normal(gen);
            break;
        }
        }
    }

    Vector eta = X * beta;
    auto label_gen = make_stream(seed, kTrainLabelStream);
    Vector y = draw_labels(eta, spec, population_signal_variance(spec, beta), label_gen);
    return {Dataset::dense(std::move(X), std::move(y)), std::move(beta)};
}

Vector gen_validation_response(const Dataset& d, const Vector& beta_dagger, const SyntheticSpec& spec,
                               std::uint64_t seed) {
    if (beta_dagger.size() != d.p()) throw DataError("beta_dagger length does not match the feature count");
    spec.validate();
    Vector eta = d.multiply(beta_dagger);
    auto gen = make_stream(seed, kValidationLabelStream);
    return draw_labels(eta, spec, population_signal_variance(spec, beta_dagger), gen);
}

}  // namespace sparseclf

#include "sparseclf/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace sparseclf {

double auc(const Vector& scores, const Vector& labels) {
    if (scores.size() != labels.size()) throw std::invalid_argument("scores and labels differ in length");
    const auto n = static_cast<std::size_t>(scores.size());
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[static_cast<Index>(a)] < scores[static_cast<Index>(b)]; });

    // Twice the (average) rank is an integer, which keeps the statistic exact.
    long long twice_rank_sum_pos = 0;
    long long n_pos = 0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && scores[static_cast<Index>(order[j + 1])] == scores[static_cast<Index>(order[i])]) ++j;
        const auto twice_rank = static_cast<long long>(i + 1 + j + 1);
        for (std::size_t t = i; t <= j; ++t) {
            if (labels[static_cast<Index>(order[t])] > 0) {
                twice_rank_sum_pos += twice_rank;
                ++n_pos;
            }
        }
        i = j + 1;
    }
    const long long n_neg = static_cast<long long>(n) - n_pos;
    if (n_pos == 0 || n_neg == 0) throw std::invalid_argument("AUC needs at least one positive and one negative label");
    // 2U = sum of twice-ranks of positives - n_pos (n_pos + 1)
    const long long twice_u = twice_rank_sum_pos - n_pos * (n_pos + 1);
    return static_cast<double>(twice_u) / static_cast<double>(2 * n_pos * n_neg);
}

EvalReport recovery_report(const Vector& estimate, const Vector& truth) {
    if (estimate.size() != truth.size()) throw std::invalid_argument("estimate and truth differ in length");
    EvalReport rep;
    Index true_pos = 0;
    Index truth_size = 0;
    for (Index i = 0; i < estimate.size(); ++i) {
        const bool est = estimate[i] != 0.0;
        const bool tru = truth[i] != 0.0;
        rep.support_size += est ? 1 : 0;
        truth_size += tru ? 1 : 0;
        true_pos += (est && tru) ? 1 : 0;
        rep.false_positives += (est && !tru) ? 1 : 0;
    }
    rep.precision = rep.support_size > 0 ? static_cast<double>(true_pos) / static_cast<double>(rep.support_size) : 0.0;
    rep.recall = truth_size > 0 ? static_cast<double>(true_pos) / static_cast<double>(truth_size) : 0.0;
    const double denom = rep.precision + rep.recall;
    rep.f1 = denom > 0.0 ? 2.0 * rep.precision * rep.recall / denom : 0.0;
    return rep;
}

}  // namespace sparseclf

#pragma once

#include "sparseclf/data.hpp"

namespace sparseclf {

/// Area under the ROC curve via the Mann-Whitney rank sum; tied pairs count 1/2.
/// Throws std::invalid_argument unless both classes are present.
double auc(const Vector& scores, const Vector& labels);

struct EvalReport {
    double auc = 0.5;
    double f1 = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    Index support_size = 0;
    Index false_positives = 0;
};

/// Support recovery of `estimate` against `truth` (auc left at 0.5).
EvalReport recovery_report(const Vector& estimate, const Vector& truth);

}  // namespace sparseclf

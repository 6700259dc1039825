#pragma once

#include "eyeaffect/corpus.hpp"

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace eyeaffect {

struct CccResult {
    double value = 0.0;
    /// Both inputs constant with equal means; CCC is reported as 0.
    bool degenerate = false;
};

/// Concordance correlation coefficient with population moments:
/// 2 cov(x, y) / (var x + var y + (mean x - mean y)^2).
/// Throws ArgumentError on length mismatch or fewer than 2 samples.
CccResult ccc_checked(std::span<const double> x, std::span<const double> y);
double ccc(std::span<const double> x, std::span<const double> y);

/// Pearson correlation; throws NumericError when either input is constant.
double pcc(std::span<const double> x, std::span<const double> y);

/// Mean squared difference per frame.
double sse(std::span<const double> x, std::span<const double> y);

/// Mean CCC over all unordered annotator pairs. Traces are compared over
/// their common length; fewer than two traces throws ArgumentError.
double human_baseline(const std::vector<AnnotationTrace>& traces);

struct RankSumResult {
    double w = 0.0;        // Mann-Whitney U of `a` against `b` (R's W)
    double p_value = 1.0;  // two-sided
    bool exact = false;
};

/// Wilcoxon rank-sum test. Exact p by enumeration of the null distribution
/// when n_a + n_b <= 12 without ties; otherwise the normal approximation
/// with continuity and tie correction.
RankSumResult wilcoxon_rank_sum(std::span<const double> a, std::span<const double> b);

struct EvalReport {
    std::string system;
    Dimension dimension = Dimension::arousal;
    std::string split;
    double ccc = 0.0;
    double pcc = 0.0;
    double sse = 0.0;
    std::size_t n_frames = 0;
};

/// `predictions` against `targets`; sse is taken on `standardized_*` when
/// supplied, otherwise on the raw values.
EvalReport evaluate(const std::string& system, Dimension dimension, const std::string& split,
                    std::span<const double> predictions, std::span<const double> targets,
                    std::span<const double> standardized_predictions = {},
                    std::span<const double> standardized_targets = {});

/// Rows `system,dimension,split,sse,ccc,pcc`.
void write_eval_csv(std::ostream& out, const std::vector<EvalReport>& reports);
std::vector<EvalReport> read_eval_csv(std::istream& in);

}  // namespace eyeaffect

#pragma once

#include <span>
#include <string>
#include <vector>

namespace spectra {

enum class Metric { Precision, Recall, F1 };

std::string_view to_string(Metric m) noexcept;
Metric parse_metric(std::string_view s);

/// Per-fold scores for one experimental condition and metric.
struct FoldScores {
  std::string condition;
  Metric metric = Metric::F1;
  std::vector<double> values;  // one per fold, each in [0, 1]

  /// Throws InsufficientFolds (< 2 values) or InvalidArgument (out of range).
  void validate() const;
};

struct Summary {
  double mean = 0.0;
  double sample_std = 0.0;  // n - 1 denominator
  double errbar = 0.0;      // two standard deviations
};

Summary summarize(std::span<const double> values);
Summary summarize(const FoldScores& scores);

enum class VarianceMode { Pooled, Welch };

struct TTestResult {
  double t = 0.0;
  double df = 0.0;
  double p_two_tailed = 1.0;
};

/// Unpaired two-sample t-test with a two-tailed p-value. Pooled (Student)
/// by default; Welch uses the Satterthwaite degrees of freedom.
/// Zero variance with equal means gives t = 0, p = 1; zero variance with
/// different means throws DegenerateVariance.
TTestResult ttest_unpaired(std::span<const double> a, std::span<const double> b,
                           VarianceMode mode = VarianceMode::Pooled);
TTestResult ttest_unpaired(const FoldScores& a, const FoldScores& b,
                           VarianceMode mode = VarianceMode::Pooled);

/// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
double incomplete_beta(double a, double b, double x);

/// Student-t cumulative distribution with `df` degrees of freedom.
double student_t_cdf(double t, double df);

/// Two-tailed tail probability P(|T| >= |t|).
double student_t_two_tailed(double t, double df);

}  // namespace spectra

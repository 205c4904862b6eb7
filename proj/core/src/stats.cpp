#include "spectra/stats.hpp"

#include <cmath>
#include <limits>
#include <numeric>

#include "spectra/error.hpp"

namespace spectra {

std::string_view to_string(Metric m) noexcept {
  switch (m) {
    case Metric::Precision: return "precision";
    case Metric::Recall: return "recall";
    case Metric::F1: return "f1";
  }
  return "unknown";
}

Metric parse_metric(std::string_view s) {
  for (auto m : {Metric::Precision, Metric::Recall, Metric::F1}) {
    if (to_string(m) == s) return m;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown metric '" + std::string(s) + "'");
}

void FoldScores::validate() const {
  if (values.size() < 2)
    throw Error(ErrorCode::InsufficientFolds,
                "condition '" + condition + "' has " + std::to_string(values.size()) + " fold(s)");
  for (double v : values) {
    if (!(v >= 0.0 && v <= 1.0))
      throw Error(ErrorCode::InvalidArgument, "score outside [0, 1] for '" + condition + "'");
  }
}

namespace {

struct Moments {
  double n = 0.0;
  double mean = 0.0;
  double var = 0.0;  // sample variance
};

Moments moments(std::span<const double> v) {
  if (v.size() < 2) throw Error(ErrorCode::InsufficientFolds, "need at least two values");
  Moments m;
  m.n = static_cast<double>(v.size());
  m.mean = std::accumulate(v.begin(), v.end(), 0.0) / m.n;
  double ss = 0.0;
  for (double x : v) ss += (x - m.mean) * (x - m.mean);
  m.var = ss / (m.n - 1.0);
  return m;
}

}  // namespace

Summary summarize(std::span<const double> values) {
  const auto m = moments(values);
  const double sd = std::sqrt(m.var);
  return {m.mean, sd, 2.0 * sd};
}

Summary summarize(const FoldScores& scores) {
  scores.validate();
  return summarize(scores.values);
}

TTestResult ttest_unpaired(std::span<const double> a, std::span<const double> b, VarianceMode mode) {
  const auto ma = moments(a);
  const auto mb = moments(b);
  const double diff = ma.mean - mb.mean;

  double se = 0.0;
  double df = 0.0;
  if (mode == VarianceMode::Pooled) {
    df = ma.n + mb.n - 2.0;
    const double sp2 = ((ma.n - 1.0) * ma.var + (mb.n - 1.0) * mb.var) / df;
    se = std::sqrt(sp2 * (1.0 / ma.n + 1.0 / mb.n));
  } else {
    const double va = ma.var / ma.n, vb = mb.var / mb.n;
    se = std::sqrt(va + vb);
    const double denom = va * va / (ma.n - 1.0) + vb * vb / (mb.n - 1.0);
    df = denom > 0.0 ? (va + vb) * (va + vb) / denom : ma.n + mb.n - 2.0;
  }

  if (diff == 0.0) return {0.0, df, 1.0};
  if (!(se > 0.0))
    throw Error(ErrorCode::DegenerateVariance, "zero variance in both groups with different means");
  const double t = diff / se;
  return {t, df, student_t_two_tailed(t, df)};
}

TTestResult ttest_unpaired(const FoldScores& a, const FoldScores& b, VarianceMode mode) {
  a.validate();
  b.validate();
  return ttest_unpaired(a.values, b.values, mode);
}

namespace {

// Modified Lentz evaluation of the continued fraction for I_x(a, b).
double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIterations = 10000;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIterations; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) return h;
  }
  throw Error(ErrorCode::InvalidArgument, "incomplete beta continued fraction did not converge");
}

// I_x(a, b) with y = 1 - x supplied separately so callers can pass an
// exactly computed complement.
double incomplete_beta(double a, double b, double x, double y) {
  if (x == 0.0) return 0.0;
  if (y == 0.0) return 1.0;
  const double log_front =
      std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log(y);
  const double front = std::exp(log_front);
  // The fraction converges fastest on the side of the distribution mean.
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * beta_continued_fraction(b, a, y) / b;
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) throw Error(ErrorCode::InvalidArgument, "beta parameters must be positive");
  if (!(x >= 0.0 && x <= 1.0)) throw Error(ErrorCode::InvalidArgument, "x must lie in [0, 1]");
  return incomplete_beta(a, b, x, 1.0 - x);
}

double student_t_two_tailed(double t, double df) {
  if (!(df > 0.0)) throw Error(ErrorCode::InvalidArgument, "degrees of freedom must be positive");
  if (std::isnan(t)) throw Error(ErrorCode::InvalidArgument, "t statistic is NaN");
  if (std::isinf(t)) return 0.0;
  if (t == 0.0) return 1.0;
  const double t2 = t * t;
  return incomplete_beta(df / 2.0, 0.5, df / (df + t2), t2 / (df + t2));
}

double student_t_cdf(double t, double df) {
  if (t == 0.0) return 0.5;
  const double tail = 0.5 * student_t_two_tailed(t, df);
  return t > 0.0 ? 1.0 - tail : tail;
}

}  // namespace spectra

#pragma once

#include <optional>
#include <span>
#include <vector>

namespace irrkit {

double mean(std::span<const double> xs);
double median(std::vector<double> xs);

// Area under the ROC curve from the Mann-Whitney U statistic with mid-ranks
// for ties. `positive[i]` marks the positive class. Returns NaN when either
// class is empty.
double roc_auc(std::span<const double> scores, std::span<const int> positive);

struct Correlation {
  double r = 0.0;
  double p = 1.0;  // two-sided, Student t with n - 2 degrees of freedom
};

// Throws Error(Numeric) for fewer than 3 points, length mismatch, or a
// constant input.
Correlation pearson(std::span<const double> x, std::span<const double> y);

// Same as pearson() but reports degenerate input as nullopt.
std::optional<Correlation> try_pearson(std::span<const double> x, std::span<const double> y);

struct OneSampleTTest {
  std::size_t n = 0;
  double mean = 0.0;
  double t = 0.0;  // +inf / -inf when the sample variance is zero
  double p = 1.0;  // one-sided, H1: mean > 0
  bool defined = false;
  bool zero_variance = false;
};

OneSampleTTest t_test_greater_than_zero(std::span<const double> xs);

// Upper tail of Student's t distribution, P(T > t).
double student_t_upper_tail(double t, double dof);

}  // namespace irrkit

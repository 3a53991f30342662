#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace gist::stats {

// Median; an even count averages the two middle values.
double median(std::vector<double> values);

double mean(std::span<const double> values);

// Spearman rank correlation with average ranks for ties.
// Throws DegenerateInputError when either side has zero rank variance.
double spearman(std::span<const double> xs, std::span<const double> ys);

// Cohen's kappa over paired binary labels.
double cohen_kappa(std::span<const int> labels_a, std::span<const int> labels_b);

// Geometric mean of the two primary scores.
double combined_score(double ig_f1, double is);

struct WelchResult {
  double t = 0.0;
  double df = 0.0;
  double p = 1.0;  // two-tailed
};

// Welch's unequal-variance t-test. Requires >= 2 samples per group.
WelchResult welch_ttest(std::span<const double> a, std::span<const double> b);

}  // namespace gist::stats

#include "gist/stats.hpp"

#include "gist/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/distributions/students_t.hpp>

namespace gist::stats {

namespace {

std::vector<double> average_ranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
    i = j + 1;
  }
  return ranks;
}

double pearson(std::span<const double> xs, std::span<const double> ys) {
  const double mx = mean(xs);
  const double my = mean(ys);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw DegenerateInputError("zero variance in correlation input");
  }
  return sxy / std::sqrt(sxx * syy);
}

double sample_variance(std::span<const double> v, double m) {
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / (static_cast<double>(v.size()) - 1.0);
}

}  // namespace

double median(std::vector<double> values) {
  if (values.empty()) throw DegenerateInputError("median of empty set");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n % 2 == 1) return values[n / 2];
  return (values[n / 2 - 1] + values[n / 2]) / 2.0;
}

double mean(std::span<const double> values) {
  if (values.empty()) throw DegenerateInputError("mean of empty set");
  return std::accumulate(values.begin(), values.end(), 0.0) /
         static_cast<double>(values.size());
}

double spearman(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size() || xs.size() < 2) {
    throw DegenerateInputError("spearman needs two equal-length series of >= 2");
  }
  const std::vector<double> rx = average_ranks(xs);
  const std::vector<double> ry = average_ranks(ys);
  return pearson(rx, ry);
}

double cohen_kappa(std::span<const int> labels_a, std::span<const int> labels_b) {
  if (labels_a.size() != labels_b.size() || labels_a.empty()) {
    throw DegenerateInputError("kappa needs two equal-length non-empty label sets");
  }
  const double n = static_cast<double>(labels_a.size());
  double agree = 0.0, a_pos = 0.0, b_pos = 0.0;
  for (std::size_t i = 0; i < labels_a.size(); ++i) {
    const int a = labels_a[i] ? 1 : 0;
    const int b = labels_b[i] ? 1 : 0;
    if (a == b) agree += 1.0;
    a_pos += a;
    b_pos += b;
  }
  const double po = agree / n;
  const double pa = a_pos / n;
  const double pb = b_pos / n;
  const double pe = pa * pb + (1.0 - pa) * (1.0 - pb);
  if (pe == 1.0) {
    // Both annotators constant: agreement carries no chance correction.
    throw DegenerateInputError("kappa undefined for constant labelings");
  }
  return (po - pe) / (1.0 - pe);
}

double combined_score(double ig_f1, double is) {
  return std::sqrt(ig_f1 * is);
}

WelchResult welch_ttest(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) {
    throw InsufficientSamplesError("welch t-test needs >= 2 samples per group");
  }
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double ma = mean(a);
  const double mb = mean(b);
  const double va = sample_variance(a, ma);
  const double vb = sample_variance(b, mb);

  WelchResult result;
  const double se2 = va / na + vb / nb;
  if (se2 == 0.0) {
    // Identical constant groups: no evidence of difference.
    result.t = ma == mb ? 0.0 : std::numeric_limits<double>::infinity();
    result.df = na + nb - 2.0;
    result.p = ma == mb ? 1.0 : 0.0;
    return result;
  }
  result.t = (ma - mb) / std::sqrt(se2);
  result.df = se2 * se2 /
              (va * va / (na * na * (na - 1.0)) + vb * vb / (nb * nb * (nb - 1.0)));
  boost::math::students_t_distribution<double> dist(result.df);
  result.p = 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(result.t)));
  return result;
}

}  // namespace gist::stats

#include "gist/stats.hpp"

#include "gist/errors.hpp"

#include <doctest.h>

#include <cmath>

using namespace gist;
using namespace gist::stats;

TEST_CASE("median conventions") {
  CHECK(median({0.2, 0.5, 0.9}) == doctest::Approx(0.5));
  CHECK(median({0.2, 0.4}) == doctest::Approx(0.3));  // mean of the middles
  CHECK(median({1.0}) == doctest::Approx(1.0));
  CHECK_THROWS_AS(median({}), DegenerateInputError);
}

TEST_CASE("spearman on clean rankings") {
  std::vector<double> xs = {1, 2, 3, 4, 5};
  std::vector<double> ys_same = {10, 20, 30, 40, 50};
  std::vector<double> ys_rev = {50, 40, 30, 20, 10};
  CHECK(spearman(xs, ys_same) == doctest::Approx(1.0));
  CHECK(spearman(xs, ys_rev) == doctest::Approx(-1.0));
}

TEST_CASE("spearman uses average ranks for ties") {
  // scipy.stats.spearmanr([1,2,2,3],[1,3,2,4]) = 0.9486832980505139
  std::vector<double> xs = {1, 2, 2, 3};
  std::vector<double> ys = {1, 3, 2, 4};
  CHECK(spearman(xs, ys) == doctest::Approx(0.9486832980505139).epsilon(1e-12));
}

TEST_CASE("spearman degenerate input") {
  std::vector<double> flat = {2, 2, 2};
  std::vector<double> ys = {1, 2, 3};
  CHECK_THROWS_AS(spearman(flat, ys), DegenerateInputError);
  CHECK_THROWS_AS(spearman(ys, flat), DegenerateInputError);
  CHECK_THROWS_AS(spearman({1.0}, {2.0}), DegenerateInputError);
}

TEST_CASE("cohen kappa closed forms") {
  auto labels = [](int yy, int yn, int ny, int nn) {
    std::vector<int> a, b;
    for (int i = 0; i < yy; ++i) { a.push_back(1); b.push_back(1); }
    for (int i = 0; i < yn; ++i) { a.push_back(1); b.push_back(0); }
    for (int i = 0; i < ny; ++i) { a.push_back(0); b.push_back(1); }
    for (int i = 0; i < nn; ++i) { a.push_back(0); b.push_back(0); }
    return std::make_pair(a, b);
  };
  {
    auto [a, b] = labels(40, 10, 10, 40);
    CHECK(cohen_kappa(a, b) == doctest::Approx(0.6).epsilon(1e-12));
  }
  {
    auto [a, b] = labels(70, 10, 15, 5);
    // po=0.75, pe=0.8*0.85+0.2*0.15=0.71 -> 0.04/0.29
    CHECK(cohen_kappa(a, b) == doctest::Approx(0.04 / 0.29).epsilon(1e-12));
  }
  {
    auto [a, b] = labels(80, 5, 10, 5);
    // po=0.85, pe=0.85*0.90+0.15*0.10=0.78 -> 0.07/0.22
    CHECK(cohen_kappa(a, b) == doctest::Approx(0.07 / 0.22).epsilon(1e-12));
  }
  {
    auto [a, b] = labels(50, 0, 0, 50);
    CHECK(cohen_kappa(a, b) == doctest::Approx(1.0));
  }
}

TEST_CASE("combined score is the geometric mean") {
  CHECK(combined_score(0.49, 0.64) == doctest::Approx(0.56).epsilon(1e-12));
  CHECK(combined_score(0.0, 0.9) == doctest::Approx(0.0));
  CHECK(std::fabs(combined_score(0.25, 0.25) - 0.25) < 1e-12);
}

TEST_CASE("welch t-test against an independently computed value") {
  // {2,4,6} vs {1,3,5}: t = sqrt(3/8), df = 4, two-tailed p = 0.57339...
  std::vector<double> a = {2, 4, 6};
  std::vector<double> b = {1, 3, 5};
  WelchResult r = welch_ttest(a, b);
  CHECK(r.t == doctest::Approx(std::sqrt(3.0 / 8.0)).epsilon(1e-12));
  CHECK(r.df == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(r.p == doctest::Approx(0.5733922538253555).epsilon(1e-9));
}

TEST_CASE("welch on identical groups") {
  std::vector<double> a = {2, 4, 6};
  WelchResult r = welch_ttest(a, a);
  CHECK(r.t == doctest::Approx(0.0));
  CHECK(r.p == doctest::Approx(1.0));

  // Identical constant groups.
  std::vector<double> c = {3, 3, 3};
  WelchResult rc = welch_ttest(c, c);
  CHECK(rc.t == doctest::Approx(0.0));
  CHECK(rc.p == doctest::Approx(1.0));

  CHECK_THROWS_AS(welch_ttest({1.0}, {1.0, 2.0}), InsufficientSamplesError);
}

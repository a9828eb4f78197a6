#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "nncp/errors.hpp"
#include "nncp/metrics.hpp"
#include "nncp/rng.hpp"

using namespace nncp;

TEST_CASE("rmse oracles") {
  std::vector<double> actual = {3.0, 4.0};
  std::vector<double> zero = {0.0, 0.0};
  CHECK(rmse(actual, zero) == doctest::Approx(std::sqrt(12.5)).epsilon(1e-12));
  CHECK(rmse(zero, actual) == rmse(actual, zero));
  CHECK(rmse(actual, actual) == 0.0);

  std::vector<double> one = {5.0};
  std::vector<double> seven = {7.0};
  CHECK(rmse(one, seven) == doctest::Approx(2.0).epsilon(1e-12));

  std::vector<double> empty;
  CHECK_THROWS_AS(rmse(empty, empty), ArgumentError);
  CHECK_THROWS_AS(rmse(actual, one), ShapeError);
}

TEST_CASE("r2 oracles") {
  std::vector<double> actual = {1.0, 2.0, 3.0};
  CHECK(r2(actual, actual) == doctest::Approx(1.0).epsilon(1e-12));

  // Predicting the mean of the actuals scores exactly zero.
  std::vector<double> mean_pred = {2.0, 2.0, 2.0};
  CHECK(r2(actual, mean_pred) == doctest::Approx(0.0).epsilon(1e-12));

  // SS_res = 4 + 0 + 4 = 8, SS_tot = 2, so 1 - 8/2 = -3.
  std::vector<double> inverted = {3.0, 2.0, 1.0};
  CHECK(r2(actual, inverted) == doctest::Approx(-3.0).epsilon(1e-12));

  std::vector<double> shorter = {1.0, 2.0};
  CHECK_THROWS_AS(r2(actual, shorter), ShapeError);
  std::vector<double> single = {1.0};
  CHECK_THROWS_AS(r2(single, single), ArgumentError);
}

TEST_CASE("r2 on constant actuals") {
  std::vector<double> constant = {4.0, 4.0, 4.0};
  CHECK(r2(constant, constant) == 1.0);
  CHECK(r2_defined(r2(constant, constant)));

  std::vector<double> off = {4.0, 4.0, 5.0};
  const double sentinel = r2(constant, off);
  CHECK_FALSE(r2_defined(sentinel));
  CHECK(sentinel == -std::numeric_limits<double>::infinity());
  CHECK(r2_defined(-3.0));
  CHECK(r2_defined(0.0));
}

TEST_CASE("mode labels") {
  CHECK(mode_label(EvalMode::kTotal) == "total");
  CHECK(mode_label(EvalMode::kYearly) == "yearly");
  CHECK(mode_label(EvalMode::kYearlyPooled) == "yearly_pooled");
}

TEST_CASE("make_scored aligns predictions with records") {
  std::vector<CitationRecord> records = {
      {"P1", "NATURE", 1999, {1, 2, 3, 4, 5, 6}},
      {"P2", "CELL", 1998, {0, 1, 0, 2, 0, 3}},
  };
  std::vector<PredictionResult> preds = {
      {"P2", {9.0, 8.0, 7.0}, 24.0},
      {"P1", {1.0, 2.0, 3.0}, 6.0},
  };

  auto scored = make_scored(records, preds, 2, 5, 3);
  REQUIRE(scored.size() == 2);
  CHECK(scored[0].paper_id == "P1");
  CHECK(scored[0].actual == std::vector<double>{4.0, 5.0, 6.0});
  CHECK(scored[0].predicted == std::vector<double>{1.0, 2.0, 3.0});
  CHECK(scored[1].actual == std::vector<double>{2.0, 0.0, 3.0});
  CHECK(scored[1].predicted == std::vector<double>{9.0, 8.0, 7.0});

  // A later first_year drops the leading scored years.
  auto late = make_scored(records, preds, 2, 5, 5);
  CHECK(late[0].actual == std::vector<double>{6.0});
  CHECK(late[0].predicted == std::vector<double>{3.0});

  CHECK_THROWS_AS(make_scored(records, preds, 2, 5, 2), ArgumentError);
  CHECK_THROWS_AS(make_scored(records, preds, 2, 5, 6), ArgumentError);

  std::vector<PredictionResult> missing = {preds[0]};
  CHECK_THROWS_AS(make_scored(records, missing, 2, 5, 3), ArgumentError);
}

TEST_CASE("total mode scores per-paper sums") {
  std::vector<ScoredPaper> papers = {
      {"A", {3.0, 4.0}, {3.0, 4.0}},
      {"B", {1.0, 0.0}, {0.0, 0.0}},
      {"C", {10.0, 10.0}, {12.0, 12.0}},
  };
  MethodScore score = evaluate(papers, EvalMode::kTotal);
  CHECK(score.papers == 3);
  // Totals: actual {7, 1, 20} vs predicted {7, 0, 24}.
  const double expected_rmse = std::sqrt((0.0 + 1.0 + 16.0) / 3.0);
  CHECK(score.rmse == doctest::Approx(expected_rmse).epsilon(1e-12));

  const double mean = 28.0 / 3.0;
  const double ss_tot = (7 - mean) * (7 - mean) + (1 - mean) * (1 - mean) +
                        (20 - mean) * (20 - mean);
  CHECK(score.r2 == doctest::Approx(1.0 - 17.0 / ss_tot).epsilon(1e-12));
  CHECK(score.r2_defined);
}

TEST_CASE("yearly mode averages per-year scores") {
  std::vector<ScoredPaper> papers = {
      {"A", {1.0, 10.0}, {2.0, 10.0}},
      {"B", {3.0, 20.0}, {3.0, 24.0}},
  };
  MethodScore score = evaluate(papers, EvalMode::kYearly);
  // Year 0: errors {1, 0}; year 1: errors {0, 4}.
  const double rmse0 = std::sqrt(0.5);
  const double rmse1 = std::sqrt(8.0);
  CHECK(score.rmse == doctest::Approx(0.5 * (rmse0 + rmse1)).epsilon(1e-12));

  // Year 0: SS_tot = 2, SS_res = 1; year 1: SS_tot = 50, SS_res = 16.
  const double r2_0 = 1.0 - 1.0 / 2.0;
  const double r2_1 = 1.0 - 16.0 / 50.0;
  CHECK(score.r2 == doctest::Approx(0.5 * (r2_0 + r2_1)).epsilon(1e-12));
  CHECK(score.r2_defined);
}

TEST_CASE("yearly mode skips undefined years in the r2 average") {
  std::vector<ScoredPaper> papers = {
      {"A", {5.0, 1.0}, {5.0, 1.0}},
      {"B", {5.0, 3.0}, {6.0, 3.0}},
  };
  // Year 0 actuals are constant with an imperfect fit: undefined. Year 1 is
  // perfect: r2 = 1. The average covers defined years only.
  MethodScore score = evaluate(papers, EvalMode::kYearly);
  CHECK(score.r2_defined);
  CHECK(score.r2 == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("pooled mode flattens paper-year pairs") {
  std::vector<ScoredPaper> papers = {
      {"A", {1.0, 2.0}, {1.0, 4.0}},
      {"B", {5.0, 9.0}, {5.0, 9.0}},
  };
  MethodScore score = evaluate(papers, EvalMode::kYearlyPooled);
  CHECK(score.papers == 2);
  CHECK(score.rmse == doctest::Approx(1.0).epsilon(1e-12));

  const double mean = 17.0 / 4.0;
  double ss_tot = 0.0;
  for (double v : {1.0, 2.0, 5.0, 9.0}) ss_tot += (v - mean) * (v - mean);
  CHECK(score.r2 == doctest::Approx(1.0 - 4.0 / ss_tot).epsilon(1e-12));
}

TEST_CASE("evaluate is independent of paper order") {
  Rng rng(64);
  std::vector<ScoredPaper> papers;
  for (int i = 0; i < 12; ++i) {
    ScoredPaper paper;
    paper.paper_id = "P" + std::to_string(i);
    for (int y = 0; y < 4; ++y) {
      paper.actual.push_back(std::floor(rng.uniform(0.0, 30.0)));
      paper.predicted.push_back(rng.uniform(0.0, 30.0));
    }
    papers.push_back(std::move(paper));
  }

  std::vector<ScoredPaper> shuffled = papers;
  std::reverse(shuffled.begin(), shuffled.end());
  std::swap(shuffled[2], shuffled[7]);

  for (EvalMode mode :
       {EvalMode::kTotal, EvalMode::kYearly, EvalMode::kYearlyPooled}) {
    MethodScore a = evaluate(papers, mode);
    MethodScore b = evaluate(shuffled, mode);
    CHECK(a.rmse == b.rmse);
    CHECK(a.r2 == b.r2);
    CHECK(a.r2_defined == b.r2_defined);
    CHECK(a.papers == b.papers);
  }
}

TEST_CASE("single-paper sets degrade gracefully") {
  std::vector<ScoredPaper> papers = {{"A", {2.0, 2.0}, {2.0, 2.0}}};
  MethodScore total = evaluate(papers, EvalMode::kTotal);
  CHECK(total.rmse == 0.0);
  CHECK_FALSE(total.r2_defined);

  MethodScore yearly = evaluate(papers, EvalMode::kYearly);
  CHECK(yearly.rmse == 0.0);
  CHECK_FALSE(yearly.r2_defined);

  std::vector<ScoredPaper> empty;
  CHECK_THROWS_AS(evaluate(empty, EvalMode::kTotal), ArgumentError);
}

TEST_CASE("ragged paper years raise ShapeError") {
  std::vector<ScoredPaper> papers = {
      {"A", {1.0, 2.0}, {1.0}},
  };
  CHECK_THROWS_AS(evaluate(papers, EvalMode::kTotal), ShapeError);
  std::vector<ScoredPaper> uneven = {
      {"A", {1.0, 2.0}, {1.0, 2.0}},
      {"B", {1.0}, {1.0}},
  };
  CHECK_THROWS_AS(evaluate(uneven, EvalMode::kYearly), ShapeError);
}

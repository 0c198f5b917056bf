#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <memory>

#include "core/error.hpp"
#include "core/rng.hpp"
#include "learners/gbt.hpp"
#include "learners/learner.hpp"
#include "learners/linear.hpp"

namespace geolift {
namespace {

double RSquared(const Eigen::VectorXd& y, const Eigen::VectorXd& pred) {
  const double mean = y.mean();
  return 1.0 - (y - pred).squaredNorm() / (y.array() - mean).square().sum();
}

double LogisticOracle(double z) { return 1.0 / (1.0 + std::exp(-z)); }

Eigen::MatrixXd UniformMatrix(int rows, int cols, RngStream& rng) {
  Eigen::MatrixXd x(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) x(r, c) = rng.Uniform(-1.0, 1.0);
  return x;
}

LearnerSpec Spec(LearnerKind kind) {
  LearnerSpec s;
  s.kind = kind;
  return s;
}

// Interaction target a linear model cannot fit: sign agreement of two features.
Eigen::VectorXd XorTarget(const Eigen::MatrixXd& x) {
  Eigen::VectorXd y(x.rows());
  for (Eigen::Index r = 0; r < x.rows(); ++r) y(r) = (x(r, 0) > 0.0) == (x(r, 1) > 0.0) ? 1.0 : -1.0;
  return y;
}

struct LogisticData {
  Eigen::MatrixXd x;
  Eigen::VectorXd y;
  Eigen::VectorXd p;
};

LogisticData MakeLogistic(int rows, RngStream& rng) {
  LogisticData d;
  d.x = UniformMatrix(rows, 2, rng) * 2.0;
  d.y.resize(rows);
  d.p.resize(rows);
  for (int r = 0; r < rows; ++r) {
    d.p(r) = LogisticOracle(-0.5 + 1.5 * d.x(r, 0) - 1.0 * d.x(r, 1));
    d.y(r) = rng.Uniform() < d.p(r) ? 1.0 : 0.0;
  }
  return d;
}

TEST(LearnerSpec, NamesAndValidation) {
  for (LearnerKind k : {LearnerKind::kGbtRegressor, LearnerKind::kGbtClassifier, LearnerKind::kRidge,
                        LearnerKind::kLogistic})
    EXPECT_EQ(ParseLearnerKind(ToString(k)), k);
  EXPECT_EQ(ToString(LearnerKind::kGbtRegressor), "gbt-regressor");
  EXPECT_THROW(ParseLearnerKind("forest"), Error);
  LearnerSpec s;
  s.learning_rate = 0.0;
  EXPECT_THROW(s.Validate(), Error);
  s = LearnerSpec{};
  s.max_depth = 0;
  EXPECT_THROW(s.Validate(), Error);
  s = LearnerSpec{};
  s.subsample = 1.5;
  EXPECT_THROW(s.Validate(), Error);
}

TEST(Gbt, ConstantTargetPredictsConstant) {
  RngStream rng(0, 0, "x");
  Eigen::MatrixXd x = UniformMatrix(200, 3, rng);
  Eigen::VectorXd y = Eigen::VectorXd::Constant(200, 123.5);
  auto model = Fit(Spec(LearnerKind::kGbtRegressor), x, y);
  Eigen::VectorXd pred = model->Predict(UniformMatrix(50, 3, rng));
  EXPECT_LT((pred.array() - 123.5).abs().maxCoeff(), 1e-9);
}

TEST(Gbt, CapturesTwoFeatureInteraction) {
  RngStream rng(1, 0, "xor");
  Eigen::MatrixXd x = UniformMatrix(2000, 2, rng);
  Eigen::VectorXd y = XorTarget(x);
  auto model = Fit(Spec(LearnerKind::kGbtRegressor), x, y);
  EXPECT_GT(RSquared(y, model->Predict(x)), 0.9);
  Eigen::MatrixXd x_test = UniformMatrix(2000, 2, rng);
  EXPECT_GT(RSquared(XorTarget(x_test), model->Predict(x_test)), 0.9);

  LearnerSpec ridge = Spec(LearnerKind::kRidge);
  ridge.ridge_lambda = 1e-6;
  EXPECT_LT(RSquared(y, Fit(ridge, x, y)->Predict(x)), 0.1);
}

TEST(Gbt, TrainFitBeatsTestFitOnNoise) {
  RngStream rng(2, 0, "noise");
  Eigen::MatrixXd x = UniformMatrix(500, 4, rng);
  Eigen::VectorXd y(500), y_test(500);
  for (int r = 0; r < 500; ++r) {
    y(r) = rng.Normal(0.0, 1.0);
    y_test(r) = rng.Normal(0.0, 1.0);
  }
  Eigen::MatrixXd x_test = UniformMatrix(500, 4, rng);
  auto model = Fit(Spec(LearnerKind::kGbtRegressor), x, y);
  EXPECT_GE(RSquared(y, model->Predict(x)), RSquared(y_test, model->Predict(x_test)));
}

TEST(Gbt, TrainingLossIsNonIncreasing) {
  RngStream rng(3, 0, "loss");
  Eigen::MatrixXd x = UniformMatrix(1000, 3, rng);
  Eigen::VectorXd y_reg(1000);
  for (int r = 0; r < 1000; ++r)
    y_reg(r) = std::sin(3.0 * x(r, 0)) + x(r, 1) * x(r, 2) + rng.Normal(0.0, 0.3);
  LogisticData cls = MakeLogistic(1000, rng);

  for (LearnerKind kind : {LearnerKind::kGbtRegressor, LearnerKind::kGbtClassifier}) {
    const bool classifier = kind == LearnerKind::kGbtClassifier;
    const Eigen::MatrixXd& xs = classifier ? cls.x : x;
    const Eigen::VectorXd& ys = classifier ? cls.y : y_reg;
    RngStream fit_rng(0, 0, "fit");
    auto model = FitGbt(Spec(kind), xs, ys, fit_rng);
    const std::vector<double> path = model->LossPath(xs, ys);
    ASSERT_EQ(path.size(), 201u);
    for (std::size_t m = 1; m < path.size(); ++m)
      ASSERT_LE(path[m], path[m - 1] + 1e-12) << ToString(kind) << " stage " << m;
    EXPECT_LT(path.back(), path.front());
  }
}

TEST(Gbt, LossPathMatchesIndependentLossOfStagedScores) {
  RngStream rng(4, 0, "stages");
  LogisticData d = MakeLogistic(400, rng);
  RngStream fit_rng(0, 0, "fit");
  LearnerSpec spec = Spec(LearnerKind::kGbtClassifier);
  spec.n_trees = 20;
  auto model = FitGbt(spec, d.x, d.y, fit_rng);
  const std::vector<double> path = model->LossPath(d.x, d.y);
  for (int m : {0, 1, 7, 20}) {
    Eigen::VectorXd score = model->PredictScore(d.x, m);
    double loss = 0.0;
    for (int r = 0; r < 400; ++r) {
      const double p = LogisticOracle(score(r));
      loss -= d.y(r) * std::log(p) + (1.0 - d.y(r)) * std::log(1.0 - p);
    }
    EXPECT_NEAR(path[m], loss / 400, 1e-12);
  }
  EXPECT_TRUE((model->PredictScore(d.x, 0).array() == model->base_score()).all());
}

TEST(Gbt, TreesRespectDepthAndLeafSize) {
  RngStream rng(5, 0, "depth");
  Eigen::MatrixXd x = UniformMatrix(300, 3, rng);
  Eigen::VectorXd y = x.col(0).array().square() + x.col(1).array();
  for (int depth : {1, 2, 4}) {
    LearnerSpec spec = Spec(LearnerKind::kGbtRegressor);
    spec.max_depth = depth;
    spec.n_trees = 10;
    spec.min_leaf = 20;
    RngStream fit_rng(0, 0, "fit");
    auto model = FitGbt(spec, x, y, fit_rng);
    for (const RegressionTree& tree : model->trees()) {
      EXPECT_LE(tree.depth(), depth);
      std::vector<int> leaf_rows(tree.nodes.size(), 0);
      for (int r = 0; r < 300; ++r) {
        int node = 0;
        while (tree.nodes[node].feature >= 0)
          node = x(r, tree.nodes[node].feature) <= tree.nodes[node].threshold ? tree.nodes[node].left
                                                                              : tree.nodes[node].right;
        ++leaf_rows[node];
      }
      for (std::size_t n = 0; n < tree.nodes.size(); ++n)
        if (tree.nodes[n].feature < 0 && leaf_rows[n] > 0) EXPECT_GE(leaf_rows[n], 20);
    }
  }
}

TEST(Gbt, SingleSplitStumpMatchesHandComputation) {
  // One feature, two clusters: a depth-1 stump with lr 1 and no penalty puts
  // each cluster mean in its leaf.
  Eigen::MatrixXd x(6, 1);
  x << 0, 1, 2, 10, 11, 12;
  Eigen::VectorXd y(6);
  y << 1, 2, 3, 19, 20, 21;
  LearnerSpec spec = Spec(LearnerKind::kGbtRegressor);
  spec.n_trees = 1;
  spec.max_depth = 1;
  spec.learning_rate = 1.0;
  spec.l2_leaf = 0.0;
  spec.min_leaf = 1;
  auto model = Fit(spec, x, y);
  Eigen::VectorXd pred = model->Predict(x);
  for (int r = 0; r < 3; ++r) EXPECT_NEAR(pred(r), 2.0, 1e-12);
  for (int r = 3; r < 6; ++r) EXPECT_NEAR(pred(r), 20.0, 1e-12);
  auto gbt = std::dynamic_pointer_cast<const GbtModel>(model);
  ASSERT_TRUE(gbt);
  EXPECT_NEAR(gbt->trees()[0].nodes[0].threshold, 6.0, 1e-12);
}

TEST(Gbt, LeafPenaltyShrinksLeafValues) {
  // With gradient sum G over n rows the leaf value is lr * G / (n + l2_leaf).
  Eigen::MatrixXd x(4, 1);
  x << 0, 1, 2, 3;
  Eigen::VectorXd y(4);
  y << 0, 0, 4, 4;
  LearnerSpec spec = Spec(LearnerKind::kGbtRegressor);
  spec.n_trees = 1;
  spec.max_depth = 1;
  spec.learning_rate = 0.5;
  spec.l2_leaf = 2.0;
  spec.min_leaf = 1;
  Eigen::VectorXd pred = Fit(spec, x, y)->Predict(x);
  // Base score 2, residuals -2,-2 | 2,2.
  EXPECT_NEAR(pred(0), 2.0 + 0.5 * (-4.0) / (2.0 + 2.0), 1e-12);
  EXPECT_NEAR(pred(3), 2.0 + 0.5 * 4.0 / (2.0 + 2.0), 1e-12);
}

TEST(Gbt, DeterministicUnderFixedStream) {
  RngStream rng(6, 0, "det");
  Eigen::MatrixXd x = UniformMatrix(600, 3, rng);
  Eigen::VectorXd y = x.col(0) + x.col(1).cwiseProduct(x.col(2));
  LearnerSpec spec = Spec(LearnerKind::kGbtRegressor);
  spec.subsample = 0.6;
  spec.n_trees = 50;
  Eigen::VectorXd a = Fit(spec, x, y, RngStream(1, 2, "s"))->Predict(x);
  Eigen::VectorXd b = Fit(spec, x, y, RngStream(1, 2, "s"))->Predict(x);
  Eigen::VectorXd c = Fit(spec, x, y, RngStream(1, 3, "s"))->Predict(x);
  EXPECT_EQ(a, b);
  EXPECT_NE(a, c);
}

TEST(Gbt, MatchesRidgeOnNoiselessLinearData) {
  RngStream rng(7, 0, "linear");
  Eigen::MatrixXd x = UniformMatrix(2000, 2, rng);
  Eigen::VectorXd y = 3.0 * x.col(0) - 2.0 * x.col(1);
  y.array() += 5.0;
  LearnerSpec gbt = Spec(LearnerKind::kGbtRegressor);
  gbt.n_trees = 1000;
  LearnerSpec ridge = Spec(LearnerKind::kRidge);
  ridge.ridge_lambda = 1e-9;
  Eigen::MatrixXd x_test = UniformMatrix(1000, 2, rng);
  Eigen::VectorXd a = Fit(gbt, x, y)->Predict(x_test);
  Eigen::VectorXd b = Fit(ridge, x, y)->Predict(x_test);
  const Eigen::VectorXd y_test = (3.0 * x_test.col(0) - 2.0 * x_test.col(1)).array() + 5.0;
  const double sd = std::sqrt((y_test.array() - y_test.mean()).square().mean());
  const double rmse = std::sqrt((a - b).squaredNorm() / a.size());
  EXPECT_LT(rmse, 0.05 * sd);
}

TEST(GbtClassifier, ProbabilitiesStayInsideClipBounds) {
  Eigen::MatrixXd x(200, 1);
  Eigen::VectorXd y(200);
  for (int r = 0; r < 200; ++r) {
    x(r, 0) = r;
    y(r) = r < 100 ? 0.0 : 1.0;
  }
  LearnerSpec spec = Spec(LearnerKind::kGbtClassifier);
  spec.n_trees = 2000;
  spec.learning_rate = 1.0;
  spec.l2_leaf = 0.0;
  Eigen::VectorXd p = Fit(spec, x, y)->Predict(x);
  EXPECT_GE(p.minCoeff(), kProbabilityFloor);
  EXPECT_LE(p.maxCoeff(), 1.0 - kProbabilityFloor);
  EXPECT_GT(p.minCoeff(), 0.0);
  EXPECT_LT(p.maxCoeff(), 1.0);
  EXPECT_LT(p(0), 0.01);
  EXPECT_GT(p(199), 0.99);
}

TEST(GbtClassifier, SingleClassTargetGivesConstantModel) {
  RngStream rng(8, 0, "single");
  Eigen::MatrixXd x = UniformMatrix(100, 2, rng);
  for (double label : {0.0, 1.0}) {
    Eigen::VectorXd y = Eigen::VectorXd::Constant(100, label);
    Eigen::VectorXd p = Fit(Spec(LearnerKind::kGbtClassifier), x, y)->Predict(x);
    EXPECT_EQ(p.minCoeff(), p.maxCoeff());
    EXPECT_NEAR(p(0), label == 0.0 ? kProbabilityFloor : 1.0 - kProbabilityFloor, 1e-12);
  }
}

TEST(GbtClassifier, CalibratedOnFeaturelessBernoulli) {
  for (double p_true : {0.1, 0.35, 0.8}) {
    RngStream rng(9, 0, "bern");
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(10000, 1);
    Eigen::VectorXd y(10000);
    for (int r = 0; r < 10000; ++r) y(r) = rng.Uniform() < p_true ? 1.0 : 0.0;
    const double p = Fit(Spec(LearnerKind::kGbtClassifier), x, y)->Predict(x)(0);
    EXPECT_NEAR(p, p_true, 0.02);
  }
}

TEST(GbtClassifier, BrierNearBayesOnLogisticData) {
  RngStream rng(10, 0, "brier");
  LogisticData train = MakeLogistic(10000, rng);
  LogisticData test = MakeLogistic(10000, rng);
  Eigen::VectorXd p = Fit(Spec(LearnerKind::kGbtClassifier), train.x, train.y)->Predict(test.x);
  const double brier = (p - test.y).squaredNorm() / 10000;
  const double bayes = (test.p - test.y).squaredNorm() / 10000;
  EXPECT_LE(brier - bayes, 0.02);
}

TEST(Ridge, RecoversSlopesOnNoiselessData) {
  RngStream rng(11, 0, "ridge");
  Eigen::MatrixXd x = UniformMatrix(300, 3, rng);
  Eigen::VectorXd y = (1.5 * x.col(0) - 0.25 * x.col(1) + 4.0 * x.col(2)).array() + 7.0;
  LearnerSpec spec = Spec(LearnerKind::kRidge);
  spec.ridge_lambda = 1e-10;
  auto model = FitRidge(spec, x, y);
  EXPECT_NEAR(model->coefficients()(0), 1.5, 1e-6);
  EXPECT_NEAR(model->coefficients()(1), -0.25, 1e-6);
  EXPECT_NEAR(model->coefficients()(2), 4.0, 1e-6);
  EXPECT_NEAR(model->intercept(), 7.0, 1e-6);
}

TEST(Ridge, MatchesNormalEquationsWithUnpenalizedIntercept) {
  RngStream rng(12, 0, "ridge2");
  Eigen::MatrixXd x = UniformMatrix(80, 4, rng);
  Eigen::VectorXd y(80);
  for (int r = 0; r < 80; ++r) y(r) = rng.Normal(0.0, 1.0) + x(r, 0);
  LearnerSpec spec = Spec(LearnerKind::kRidge);
  spec.ridge_lambda = 3.0;
  auto model = FitRidge(spec, x, y);
  // Oracle: augmented system with a zero penalty on the intercept column.
  Eigen::MatrixXd a(80, 5);
  a.col(0).setOnes();
  a.rightCols(4) = x;
  Eigen::MatrixXd penalty = Eigen::MatrixXd::Identity(5, 5) * 3.0;
  penalty(0, 0) = 0.0;
  Eigen::VectorXd beta = (a.transpose() * a + penalty).ldlt().solve(a.transpose() * y);
  EXPECT_NEAR(model->intercept(), beta(0), 1e-9);
  for (int k = 0; k < 4; ++k) EXPECT_NEAR(model->coefficients()(k), beta(k + 1), 1e-9);
}

TEST(Logistic, ApproachesGeneratingCoefficients) {
  RngStream rng(13, 0, "logit");
  LogisticData d = MakeLogistic(20000, rng);
  LearnerSpec spec = Spec(LearnerKind::kLogistic);
  spec.ridge_lambda = 1e-6;
  auto model = FitLogistic(spec, d.x, d.y);
  EXPECT_NEAR(model->intercept(), -0.5, 0.1);
  EXPECT_NEAR(model->coefficients()(0), 1.5, 0.1);
  EXPECT_NEAR(model->coefficients()(1), -1.0, 0.1);
  // At the optimum the penalized score equation holds.
  Eigen::VectorXd p = model->Predict(d.x);
  EXPECT_NEAR((d.y - p).sum(), 0.0, 1e-4);
}

TEST(Learner, PredictChecksFeatureCountAndFiniteness) {
  RngStream rng(14, 0, "shape");
  Eigen::MatrixXd x = UniformMatrix(50, 2, rng);
  Eigen::VectorXd y = x.col(0);
  for (LearnerKind k : {LearnerKind::kGbtRegressor, LearnerKind::kRidge}) {
    auto model = Fit(Spec(k), x, y);
    EXPECT_EQ(model->train_rows(), 50);
    EXPECT_EQ(model->n_features(), 2);
    try {
      model->Predict(UniformMatrix(5, 3, rng));
      FAIL() << "expected a dimension error";
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kDimensionMismatch);
    }
    Eigen::MatrixXd bad = UniformMatrix(5, 2, rng);
    bad(2, 1) = std::numeric_limits<double>::infinity();
    EXPECT_THROW(model->Predict(bad), Error);
  }
}

TEST(Learner, FitRejectsBadInputs) {
  RngStream rng(15, 0, "bad");
  Eigen::MatrixXd x = UniformMatrix(20, 2, rng);
  Eigen::VectorXd y = Eigen::VectorXd::Zero(20);
  y(3) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(Fit(Spec(LearnerKind::kGbtRegressor), x, y), Error);
  Eigen::VectorXd labels = Eigen::VectorXd::Zero(20);
  labels(0) = 0.5;
  EXPECT_THROW(Fit(Spec(LearnerKind::kGbtClassifier), x, labels), Error);
  EXPECT_THROW(Fit(Spec(LearnerKind::kGbtRegressor), x, Eigen::VectorXd::Zero(19)), Error);
}

}  // namespace
}  // namespace geolift

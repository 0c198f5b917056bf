#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "core/error.hpp"
#include "core/rng.hpp"
#include "dml/crossfit.hpp"
#include "dml/folds.hpp"
#include "dml/panel_dml.hpp"
#include "dml/second_stage.hpp"
#include "dml/transform.hpp"
#include "support/linear_panel.hpp"

namespace geolift {
namespace {

using testing::LinearPanelOptions;
using testing::MakeLinearPanel;

LearnerSpec Ridge(double lambda) {
  LearnerSpec s;
  s.kind = LearnerKind::kRidge;
  s.ridge_lambda = lambda;
  return s;
}

DmlSpec RidgeDml(DmlVariant variant, double lambda = 1e-6) {
  DmlSpec spec;
  spec.variant = variant;
  spec.outcome_learner = Ridge(lambda);
  spec.propensity_learner = Ridge(lambda);
  return spec;
}

Panel SmallPanel(std::uint64_t seed, int n_units = 40, int n_treated = 10, int t_pre = 10,
                 int t_post = 4) {
  LinearPanelOptions o;
  o.n_units = n_units;
  o.n_treated = n_treated;
  o.t_pre = t_pre;
  o.t_post = t_post;
  o.noise_sd = 100.0;
  return MakeLinearPanel(o, RngStream(seed, 0, "panel")).panel;
}

double Correlation(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const Eigen::ArrayXd da = a.array() - a.mean();
  const Eigen::ArrayXd db = b.array() - b.mean();
  return (da * db).sum() / std::sqrt(da.square().sum() * db.square().sum());
}

// Weighted no-intercept least squares and its clustered sandwich, written out
// through the normal equations.
struct SandwichOracle {
  double theta;
  double se;
};

SandwichOracle NormalEquations(const Eigen::VectorXd& ey, const Eigen::VectorXd& ed,
                               const Eigen::VectorXd& w, const std::vector<int>& cluster) {
  const Eigen::Index n = ey.size();
  Eigen::MatrixXd x(n, 1);
  x.col(0) = ed;
  const Eigen::MatrixXd xtwx = x.transpose() * w.asDiagonal() * x;
  const Eigen::VectorXd beta = xtwx.ldlt().solve(x.transpose() * w.asDiagonal() * ey);
  const Eigen::VectorXd e = ey - x * beta;
  std::map<int, Eigen::VectorXd> score;
  for (Eigen::Index r = 0; r < n; ++r) {
    auto it = score.try_emplace(cluster[r], Eigen::VectorXd::Zero(1)).first;
    it->second += x.row(r).transpose() * w(r) * e(r);
  }
  Eigen::MatrixXd meat = Eigen::MatrixXd::Zero(1, 1);
  for (const auto& [g, s] : score) meat += s * s.transpose();
  const double groups = static_cast<double>(score.size());
  const Eigen::MatrixXd bread = xtwx.inverse();
  const Eigen::MatrixXd v = groups / (groups - 1.0) * bread * meat * bread;
  return {beta(0), std::sqrt(v(0, 0))};
}

TEST(Transform, VariantNames) {
  EXPECT_EQ(ParseDmlVariant("wg-dml"), DmlVariant::kWg);
  EXPECT_EQ(ParseDmlVariant("CRE"), DmlVariant::kCre);
  EXPECT_EQ(ParseDmlVariant("twfe"), DmlVariant::kTwfe);
  EXPECT_EQ(ParseDmlVariant("FD-DML"), DmlVariant::kFd);
  EXPECT_THROW(ParseDmlVariant("re"), Error);
  EXPECT_EQ(ToEstimatorId(DmlVariant::kWg), EstimatorId::kWgDml);
}

TEST(Transform, WithinGeoZeroesConstantOutcome) {
  Panel panel = SmallPanel(1);
  panel.outcome.row(3).setConstant(777.0);
  panel.treat_active.row(3).setZero();
  panel.ever_treated[3] = 0;
  const TransformedPanel tp = Transform(panel, DmlVariant::kWg);
  for (Eigen::Index r = 0; r < tp.rows(); ++r)
    if (tp.geo_of_row[r] == 3) EXPECT_NEAR(tp.y_dagger[r], 0.0, 1e-9);
}

TEST(Transform, FirstDifferenceOfOnsetIsSingleSpike) {
  LinearPanelOptions o;
  const Panel panel = MakeLinearPanel(o, RngStream(2, 0, "panel")).panel;
  const TransformedPanel tp = Transform(panel, DmlVariant::kFd);
  EXPECT_EQ(tp.rows_dropped, 200);
  EXPECT_EQ(tp.weeks_per_geo, 63);
  for (Eigen::Index r = 0; r < tp.rows(); ++r) {
    const bool spike = panel.ever_treated[tp.geo_of_row[r]] == 1 && tp.week_of_row[r] == 52;
    EXPECT_EQ(tp.d_dagger[r], spike ? 1.0 : 0.0);
  }
}

TEST(Transform, CreTreatmentMeanColumn) {
  LinearPanelOptions o;
  const Panel panel = MakeLinearPanel(o, RngStream(3, 0, "panel")).panel;
  const TransformedPanel tp = Transform(panel, DmlVariant::kCre);
  const auto it = std::find(tp.feature_names.begin(), tp.feature_names.end(), "mean_d");
  ASSERT_NE(it, tp.feature_names.end());
  const auto col = static_cast<Eigen::Index>(it - tp.feature_names.begin());
  for (Eigen::Index r = 0; r < tp.rows(); ++r)
    EXPECT_DOUBLE_EQ(tp.x_dagger(r, col), panel.ever_treated[tp.geo_of_row[r]] == 1 ? 0.1875 : 0.0);
}

TEST(Transform, FeatureLayouts) {
  const Panel panel = SmallPanel(4);  // 40 geos, 14 weeks, 2 static, 2 dynamic
  const TransformedPanel twfe = Transform(panel, DmlVariant::kTwfe);
  EXPECT_EQ(twfe.x_dagger.cols(), 2 + 2 + 1 + 39 + 13);
  EXPECT_EQ(twfe.rows(), 40 * 14);
  EXPECT_EQ(twfe.feature_names.front(), "static_0");
  EXPECT_EQ(twfe.feature_names.back(), "week_13");

  const TransformedPanel wg = Transform(panel, DmlVariant::kWg);
  EXPECT_EQ(wg.feature_names, (std::vector<std::string>{"dynamic_0", "dynamic_1", "week"}));
  const TransformedPanel fd = Transform(panel, DmlVariant::kFd);
  EXPECT_EQ(fd.feature_names, (std::vector<std::string>{"dynamic_0", "dynamic_1", "week"}));
  EXPECT_EQ(fd.rows(), 40 * 13);

  const TransformedPanel cre = Transform(panel, DmlVariant::kCre);
  EXPECT_EQ(cre.feature_names,
            (std::vector<std::string>{"static_0", "static_1", "dynamic_0", "dynamic_1",
                                      "mean_dynamic_0", "mean_dynamic_1", "mean_d", "week"}));
  TransformOptions options;
  options.cre_include_week = false;
  options.cre_include_treatment_mean = false;
  EXPECT_EQ(Transform(panel, DmlVariant::kCre, options).x_dagger.cols(), 6);
}

TEST(Transform, TwfeDummiesAreIndicators) {
  const Panel panel = SmallPanel(5);
  const TransformedPanel tp = Transform(panel, DmlVariant::kTwfe);
  const Eigen::Index geo0 = 2 + 2 + 1;
  const Eigen::Index week0 = geo0 + 39;
  for (Eigen::Index r = 0; r < tp.rows(); ++r) {
    const int g = tp.geo_of_row[r];
    const int t = tp.week_of_row[r];
    for (int i = 1; i < 40; ++i) EXPECT_EQ(tp.x_dagger(r, geo0 + i - 1), g == i ? 1.0 : 0.0);
    for (int k = 1; k < 14; ++k) EXPECT_EQ(tp.x_dagger(r, week0 + k - 1), t == k ? 1.0 : 0.0);
    EXPECT_EQ(tp.x_dagger(r, 4), t);
    EXPECT_EQ(tp.y_dagger[r], panel.outcome(g, t));
  }
}

TEST(Transform, AlgebraProperties) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Panel panel = SmallPanel(10 + seed);
    // Outcome linear in t within each geo.
    for (int i = 0; i < panel.n_units; ++i)
      for (int t = 0; t < panel.n_weeks; ++t)
        panel.outcome(i, t) = 1000.0 + 100.0 * i + (3.0 + i) * t;

    const TransformedPanel wg = Transform(panel, DmlVariant::kWg);
    for (int i = 0; i < wg.n_geos; ++i) {
      const auto block = wg.x_dagger.middleRows(i * wg.weeks_per_geo, wg.weeks_per_geo);
      EXPECT_LT(block.colwise().sum().cwiseAbs().maxCoeff(), 1e-9);
      EXPECT_NEAR(wg.d_dagger.segment(i * wg.weeks_per_geo, wg.weeks_per_geo).sum(), 0.0, 1e-12);
    }

    const TransformedPanel fd = Transform(panel, DmlVariant::kFd);
    for (Eigen::Index r = 0; r < fd.rows(); ++r)
      EXPECT_NEAR(fd.y_dagger[r], 3.0 + fd.geo_of_row[r], 1e-9);

    const TransformedPanel cre = Transform(panel, DmlVariant::kCre);
    for (Eigen::Index c = 4; c < 7; ++c)
      for (int i = 0; i < cre.n_geos; ++i) {
        const auto block = cre.x_dagger.col(c).segment(i * cre.weeks_per_geo, cre.weeks_per_geo);
        EXPECT_EQ(block.minCoeff(), block.maxCoeff());
      }
  }
}

TEST(Transform, TreatmentSurfaceFollowsVariant) {
  const Panel panel = SmallPanel(6);
  RngStream rng(6, 0, "surface");
  for (DmlVariant v : {DmlVariant::kTwfe, DmlVariant::kWg, DmlVariant::kFd, DmlVariant::kCre}) {
    const TransformedPanel tp = Transform(panel, v);
    // The raw D surface maps onto d_dagger itself.
    EXPECT_LT((TransformTreatmentSurface(tp, tp.d_raw) - tp.d_dagger).cwiseAbs().maxCoeff(), 1e-12)
        << ToString(v);
    Eigen::VectorXd s(tp.rows());
    for (Eigen::Index r = 0; r < s.size(); ++r) s[r] = rng.Uniform();
    const Eigen::VectorXd m = TransformTreatmentSurface(tp, s);
    if (v == DmlVariant::kFd) {
      EXPECT_EQ(m[0], 0.0);
      EXPECT_DOUBLE_EQ(m[1], s[1] - s[0]);
    }
    if (v == DmlVariant::kWg)
      EXPECT_NEAR(m.head(tp.weeks_per_geo).sum(), 0.0, 1e-12);
  }
  const TransformedPanel tp = Transform(panel, DmlVariant::kWg);
  EXPECT_THROW(TransformTreatmentSurface(tp, Eigen::VectorXd::Zero(3)), Error);
}

TEST(Folds, DefaultStrataSplitEvenly) {
  std::vector<int> treated(200, 0);
  for (int i = 0; i < 40; ++i) treated[i * 5] = 1;
  RngStream rng(7, 0, "folds");
  const FoldAssignment folds = MakeFolds(treated, 5, rng);
  std::vector<int> t_count(5, 0), c_count(5, 0);
  for (int i = 0; i < 200; ++i) ++(treated[i] ? t_count : c_count)[folds.fold_of_geo[i]];
  for (int f = 0; f < 5; ++f) {
    EXPECT_EQ(t_count[f], 8);
    EXPECT_EQ(c_count[f], 32);
  }
  EXPECT_NO_THROW(ValidateFolds(treated, folds));
}

TEST(Folds, MinimalTwoFolds) {
  const std::vector<int> treated{1, 0, 1, 0};
  RngStream rng(8, 0, "folds");
  const FoldAssignment folds = MakeFolds(treated, 2, rng);
  for (int f = 0; f < 2; ++f) {
    int t = 0, c = 0;
    for (int i = 0; i < 4; ++i)
      if (folds.fold_of_geo[i] == f) ++(treated[i] ? t : c);
    EXPECT_EQ(t, 1);
    EXPECT_EQ(c, 1);
  }
}

TEST(Folds, DeterministicPerStreamAndBalanced) {
  RngStream sizes(9, 0, "sizes");
  for (int trial = 0; trial < 50; ++trial) {
    const int n = static_cast<int>(sizes.UniformInt(10, 120));
    const int k = static_cast<int>(sizes.UniformInt(2, 5));
    std::vector<int> treated(n, 0);
    const int n_treated = static_cast<int>(sizes.UniformInt(k, n - k));
    for (int i = 0; i < n_treated; ++i) treated[i] = 1;
    RngStream a(trial, 0, "f"), b(trial, 0, "f");
    const FoldAssignment fa = MakeFolds(treated, k, a);
    EXPECT_EQ(fa.fold_of_geo, MakeFolds(treated, k, b).fold_of_geo);
    for (int stratum : {0, 1}) {
      std::vector<int> count(k, 0);
      for (int i = 0; i < n; ++i)
        if (treated[i] == stratum) ++count[fa.fold_of_geo[i]];
      EXPECT_LE(*std::max_element(count.begin(), count.end()) -
                    *std::min_element(count.begin(), count.end()),
                1);
    }
  }
}

TEST(Folds, RejectsSmallStrataAndBrokenMaps) {
  RngStream rng(10, 0, "folds");
  EXPECT_THROW(MakeFolds(std::vector<int>{1, 1, 0, 0, 0}, 3, rng), Error);
  EXPECT_THROW(MakeFolds(std::vector<int>{1, 1, 1, 0, 0}, 3, rng), Error);
  EXPECT_THROW(MakeFolds(std::vector<int>{1, 0}, 1, rng), Error);
  FoldAssignment bad{2, {0, 0, 1, 1}};
  EXPECT_THROW(ValidateFolds({1, 1, 0, 0}, bad), Error);
}

TEST(Folds, EveryFirstDifferenceFoldHasTreatmentChange) {
  LinearPanelOptions o;
  const Panel panel = MakeLinearPanel(o, RngStream(11, 0, "panel")).panel;
  const TransformedPanel tp = Transform(panel, DmlVariant::kFd);
  RngStream rng(11, 0, "folds");
  const FoldAssignment folds = MakeFolds(panel, 5, rng);
  std::vector<int> changes(5, 0);
  for (Eigen::Index r = 0; r < tp.rows(); ++r)
    if (tp.d_dagger[r] != 0.0) ++changes[folds.fold_of_geo[tp.geo_of_row[r]]];
  for (int c : changes) EXPECT_GT(c, 0);
}

TEST(Crossfit, ConstantOutcomeLearnerLeavesTrainMeanResidual) {
  const Panel panel = SmallPanel(12);
  const TransformedPanel tp = Transform(panel, DmlVariant::kWg);
  RngStream fold_rng(12, 0, "folds");
  const FoldAssignment folds = MakeFolds(panel, 5, fold_rng);
  DmlSpec spec = RidgeDml(DmlVariant::kWg);
  spec.outcome_learner = LearnerSpec{};
  spec.outcome_learner.n_trees = 0;
  const CrossfitResult cf = CrossfitResiduals(tp, folds, spec, RngStream(12, 0, "cf"));
  for (int k = 0; k < 5; ++k) {
    double sum = 0.0;
    int count = 0;
    for (Eigen::Index r = 0; r < tp.rows(); ++r)
      if (folds.fold_of_geo[tp.geo_of_row[r]] != k) {
        sum += tp.y_dagger[r];
        ++count;
      }
    const double train_mean = sum / count;
    for (Eigen::Index r = 0; r < tp.rows(); ++r)
      if (folds.fold_of_geo[tp.geo_of_row[r]] == k)
        EXPECT_NEAR(cf.eps_y[r], tp.y_dagger[r] - train_mean, 1e-9);
  }
  ASSERT_EQ(cf.folds.size(), 5u);
  int test_rows = 0;
  for (const FoldDiagnostics& f : cf.folds) {
    EXPECT_EQ(f.train_rows + f.test_rows, tp.rows());
    test_rows += f.test_rows;
  }
  EXPECT_EQ(test_rows, tp.rows());
}

TEST(Crossfit, RandomizedTreatmentResidualCentersOnZero) {
  LinearPanelOptions o;
  o.noise_sd = 200.0;
  const Panel panel = MakeLinearPanel(o, RngStream(13, 0, "panel")).panel;
  TransformOptions options;
  options.cre_include_treatment_mean = false;
  const TransformedPanel tp = Transform(panel, DmlVariant::kCre, options);
  RngStream fold_rng(13, 0, "folds");
  const FoldAssignment folds = MakeFolds(panel, 5, fold_rng);
  DmlSpec spec;
  spec.variant = DmlVariant::kCre;
  spec.transform = options;
  const CrossfitResult cf = CrossfitResiduals(tp, folds, spec, RngStream(13, 0, "cf"));
  // Monte Carlo sd of the pooled mean from the geo cluster totals.
  std::vector<double> totals(tp.n_geos, 0.0);
  for (Eigen::Index r = 0; r < tp.rows(); ++r) totals[tp.geo_of_row[r]] += cf.eps_d[r];
  double ss = 0.0;
  const double mean_total = cf.eps_d.sum() / tp.n_geos;
  for (double t : totals) ss += (t - mean_total) * (t - mean_total);
  const double sd = std::sqrt(ss / (tp.n_geos - 1) / tp.n_geos) / tp.weeks_per_geo;
  EXPECT_LE(std::abs(cf.eps_d.mean()), 3.0 * sd);
  EXPECT_GE(cf.p_hat.minCoeff(), kProbabilityFloor);
  EXPECT_LE(cf.p_hat.maxCoeff(), 1.0 - kProbabilityFloor);
}

TEST(Crossfit, OwnGeoNeverInformsItsPrediction) {
  const Panel panel = SmallPanel(14);
  RngStream fold_rng(14, 0, "folds");
  const FoldAssignment folds = MakeFolds(panel, 5, fold_rng);
  for (DmlVariant v : {DmlVariant::kWg, DmlVariant::kCre}) {
    for (const bool boosted : {false, true}) {
      DmlSpec spec = RidgeDml(v, 1.0);
      if (boosted) {
        spec.outcome_learner = LearnerSpec{};
        spec.outcome_learner.n_trees = 20;
      }
      const TransformedPanel tp = Transform(panel, v);
      const CrossfitResult base = CrossfitResiduals(tp, folds, spec, RngStream(14, 0, "cf"));
      for (int g : {0, 17, 39}) {
        TransformedPanel changed = tp;
        for (Eigen::Index r = 0; r < tp.rows(); ++r)
          if (tp.geo_of_row[r] == g) {
            changed.y_dagger[r] += 1e4 * (1 + r % 3);
            changed.x_dagger.row(r).array() += 5.0;
          }
        const CrossfitResult cf = CrossfitResiduals(changed, folds, spec, RngStream(14, 0, "cf"));
        int other_changed = 0;
        for (Eigen::Index r = 0; r < tp.rows(); ++r) {
          const int fold = folds.fold_of_geo[tp.geo_of_row[r]];
          if (tp.geo_of_row[r] == g) continue;
          // Rows sharing g's fold use models blind to g.
          if (fold == folds.fold_of_geo[g]) {
            EXPECT_EQ(cf.y_hat[r], base.y_hat[r]);
          } else if (cf.y_hat[r] != base.y_hat[r]) {
            ++other_changed;
          }
        }
        EXPECT_GT(other_changed, 0);
      }
    }
  }
}

TEST(Iptw, FormulaExamples) {
  Eigen::VectorXd p(3), d(3);
  p << 0.5, 0.5, 0.2;
  d << 1, 0, 1;
  const IptwWeights w = ComputeIptwWeights(p, d, 1.0);
  EXPECT_DOUBLE_EQ(w.weights[0], 1.0);
  EXPECT_DOUBLE_EQ(w.weights[1], 1.0);
  EXPECT_DOUBLE_EQ(w.weights[2], 4.0);
  EXPECT_EQ(w.n_trimmed, 0);

  const IptwWeights flat = ComputeIptwWeights(Eigen::VectorXd::Constant(50, 0.5),
                                              Eigen::VectorXd::Ones(50), 0.95);
  EXPECT_TRUE((flat.weights.array() == 1.0).all());
  EXPECT_EQ(flat.n_trimmed, 0);
  EXPECT_THROW(ComputeIptwWeights(Eigen::VectorXd::Zero(3), d, 0.95), Error);
  EXPECT_THROW(ComputeIptwWeights(p, d, 0.4), Error);
}

TEST(Iptw, TrimmingClampsAtQuantile) {
  RngStream rng(15, 0, "iptw");
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 100 + trial * 13;
    Eigen::VectorXd p(n), d(n), raw(n);
    for (int r = 0; r < n; ++r) {
      p[r] = rng.Uniform(0.01, 0.99);
      d[r] = rng.Uniform() < 0.3 ? 1.0 : 0.0;
      raw[r] = d[r] * (1 - p[r]) / p[r] + (1 - d[r]) * p[r] / (1 - p[r]);
    }
    const IptwWeights w = ComputeIptwWeights(p, d, 0.95);
    std::vector<double> sorted(raw.data(), raw.data() + n);
    std::sort(sorted.begin(), sorted.end());
    const double h = 0.95 * (n - 1);
    const auto lo = static_cast<std::size_t>(h);
    const double q = sorted[lo] + (h - lo) * (sorted[lo + 1] - sorted[lo]);
    EXPECT_NEAR(w.trim_threshold, q, 1e-12);
    EXPECT_EQ(w.weights.maxCoeff(), w.trim_threshold);
    int above = 0;
    for (int r = 0; r < n; ++r) {
      above += raw[r] > w.trim_threshold ? 1 : 0;
      EXPECT_EQ(w.weights[r], std::min(raw[r], w.trim_threshold));
    }
    EXPECT_EQ(w.n_trimmed, above);
  }
}

TEST(Iptw, QuantileMatchesInterpolation) {
  Eigen::VectorXd v(5);
  v << 5, 1, 4, 2, 3;
  EXPECT_DOUBLE_EQ(EmpiricalQuantile(v, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(EmpiricalQuantile(v, 1.0), 5.0);
  EXPECT_DOUBLE_EQ(EmpiricalQuantile(v, 0.5), 3.0);
  EXPECT_DOUBLE_EQ(EmpiricalQuantile(v, 0.9), 4.6);
}

TEST(SecondStage, ExactFitHasZeroSe) {
  RngStream rng(16, 0, "exact");
  Eigen::VectorXd ed(60), w(60);
  std::vector<int> cluster(60);
  for (int r = 0; r < 60; ++r) {
    ed[r] = rng.Normal(0.0, 1.0);
    w[r] = rng.Uniform(0.1, 3.0);
    cluster[r] = r / 6;
  }
  const SecondStageFit fit = FitSecondStage(3.0 * ed, ed, w, cluster);
  EXPECT_NEAR(fit.theta, 3.0, 1e-12);
  EXPECT_NEAR(fit.se, 0.0, 1e-12);
  EXPECT_EQ(fit.n_clusters, 10);
}

TEST(SecondStage, HandFixture) {
  Eigen::VectorXd ed(2), ey(2);
  ed << 1, -1;
  ey << 2, 0;
  const EstimateResult r = SecondStage(EstimatorId::kWgDml, ey, ed, Eigen::VectorXd::Ones(2), {1, 2});
  EXPECT_DOUBLE_EQ(r.att_hat, 1.0);
  // Residuals (1, 1); scores (1, -1); 2/(2-1) * 2 / 2^2 = 1.
  EXPECT_DOUBLE_EQ(r.se, 1.0);
  EXPECT_DOUBLE_EQ(r.ci_low, 1.0 - 1.96);
  EXPECT_EQ(r.estimator_id, EstimatorId::kWgDml);
}

TEST(SecondStage, MatchesNormalEquationsOracle) {
  RngStream rng(17, 0, "oracle");
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::VectorXd ey(100), ed(100), w(100);
    std::vector<int> cluster(100);
    for (int r = 0; r < 100; ++r) {
      ed[r] = rng.Normal(0.0, 1.0);
      ey[r] = 2.5 * ed[r] + rng.Normal(0.0, 2.0);
      w[r] = rng.Uniform(0.2, 5.0);
      cluster[r] = static_cast<int>(rng.UniformInt(0, 14));
    }
    const SecondStageFit fit = FitSecondStage(ey, ed, w, cluster);
    const SandwichOracle oracle = NormalEquations(ey, ed, w, cluster);
    EXPECT_NEAR(fit.theta, oracle.theta, 1e-8);
    EXPECT_NEAR(fit.se, oracle.se, 1e-8);
  }
}

TEST(SecondStage, ScaleEquivariance) {
  RngStream rng(18, 0, "scale");
  Eigen::VectorXd ey(80), ed(80), w(80);
  std::vector<int> cluster(80);
  for (int r = 0; r < 80; ++r) {
    ed[r] = rng.Normal(0.0, 1.0);
    ey[r] = rng.Normal(0.0, 1.0) - ed[r];
    w[r] = rng.Uniform(0.5, 2.0);
    cluster[r] = r % 8;
  }
  const SecondStageFit base = FitSecondStage(ey, ed, w, cluster);
  for (double c : {4.0, 0.125, -2.0}) {
    const SecondStageFit scaled = FitSecondStage(c * ey, ed, w, cluster);
    EXPECT_EQ(scaled.theta, c * base.theta);
    EXPECT_EQ(scaled.se, std::abs(c) * base.se);
  }
  const SecondStageFit three = FitSecondStage(3.0 * ey, ed, w, cluster);
  EXPECT_NEAR(three.theta, 3.0 * base.theta, 1e-14 * std::abs(base.theta) * 3);
  EXPECT_NEAR(three.se, 3.0 * base.se, 1e-14 * base.se * 3);
}

TEST(SecondStage, DegenerateInputsThrow) {
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(4);
  try {
    FitSecondStage(ones, Eigen::VectorXd::Zero(4), ones, {0, 1, 2, 3});
    FAIL() << "expected a numerical error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNumerical);
  }
  EXPECT_THROW(FitSecondStage(ones, ones, ones, {0, 0, 0, 0}), Error);
  EXPECT_THROW(FitSecondStage(ones, ones, ones, {0, 1, 2}), Error);
}

TEST(EstimateDml, WithinGeoRecoversThetaOnNoiseFreeLinearPanel) {
  LinearPanelOptions o;
  const auto lp = MakeLinearPanel(o, RngStream(19, 0, "panel"));
  const EstimateResult r = EstimateDml(lp.panel, RidgeDml(DmlVariant::kWg, 1e-8), RngStream(19, 0, "dml"));
  EXPECT_NEAR(r.att_hat, 500.0, 1e-6);
}

TEST(EstimateDml, WithinGeoAndTwfeAgreeWithoutUnitHeterogeneity) {
  // Held-out geos have all-zero dummy columns in training, so TWFE can only
  // match WG when no unit effect has to be predicted for them.
  for (std::uint64_t seed : {20u, 21u, 22u}) {
    LinearPanelOptions o;
    o.static_loadings = {0.0, 0.0};
    const Panel panel = MakeLinearPanel(o, RngStream(seed, 0, "panel")).panel;
    const EstimateResult wg = EstimateDml(panel, RidgeDml(DmlVariant::kWg, 1e-4), RngStream(seed, 0, "dml"));
    const EstimateResult twfe = EstimateDml(panel, RidgeDml(DmlVariant::kTwfe, 1e-4), RngStream(seed, 0, "dml"));
    EXPECT_NEAR(wg.att_hat, twfe.att_hat, 1e-6);
    EXPECT_NEAR(twfe.att_hat, 500.0, 1e-6);
  }
}

TEST(EstimateDml, TwfeStaysNearThetaOnNoisyLinearPanel) {
  LinearPanelOptions o;
  o.noise_sd = 250.0;
  const Panel panel = MakeLinearPanel(o, RngStream(21, 0, "panel")).panel;
  const EstimateResult r = EstimateDml(panel, RidgeDml(DmlVariant::kTwfe, 1e-4), RngStream(21, 0, "dml"));
  EXPECT_TRUE(std::isfinite(r.se));
  EXPECT_LT(std::abs(r.att_hat - 500.0), 5.0 * r.se);
}

TEST(EstimateDml, WithinGeoIntervalsCalibratedOnLinearPanels) {
  int covered = 0;
  for (int rep = 0; rep < 100; ++rep) {
    LinearPanelOptions o;
    o.noise_sd = 300.0;
    const Panel panel = MakeLinearPanel(o, RngStream(23, rep, "panel")).panel;
    const EstimateResult r = EstimateDml(panel, RidgeDml(DmlVariant::kWg), RngStream(23, rep, "dml"));
    covered += std::abs(r.att_hat - 500.0) <= 2.0 * r.se ? 1 : 0;
  }
  EXPECT_GE(covered, 93);
}

TEST(EstimateDml, TreatmentResidualOrthogonalToFeatures) {
  LinearPanelOptions o;
  o.noise_sd = 300.0;
  const Panel panel = MakeLinearPanel(o, RngStream(24, 0, "panel")).panel;
  DmlFit fit;
  EstimateDml(panel, RidgeDml(DmlVariant::kWg, 1e-8), RngStream(24, 0, "dml"), &fit);
  for (Eigen::Index c = 0; c < fit.transformed.x_dagger.cols(); ++c)
    EXPECT_LT(std::abs(Correlation(fit.crossfit.eps_d, fit.transformed.x_dagger.col(c))), 0.05)
        << fit.transformed.feature_names[c];
}

TEST(EstimateDml, DiagnosticsAndDeterminism) {
  const Panel panel = SmallPanel(25);
  DmlSpec spec = RidgeDml(DmlVariant::kCre, 1.0);
  spec.bootstrap_reps = 30;
  DmlFit fit;
  const EstimateResult a = EstimateDml(panel, spec, RngStream(25, 0, "dml"), &fit);
  const EstimateResult b = EstimateDml(panel, spec, RngStream(25, 0, "dml"));
  EXPECT_EQ(a.att_hat, b.att_hat);
  EXPECT_EQ(a.se, b.se);
  EXPECT_EQ(a.diagnostics, b.diagnostics);
  EXPECT_EQ(a.estimator_id, EstimatorId::kCreDml);
  EXPECT_EQ(a.diagnostics.at("n_folds"), 5);
  EXPECT_EQ(a.diagnostics.at("n_rows"), 40 * 14);
  EXPECT_EQ(a.diagnostics.at("n_clusters"), 40);
  EXPECT_EQ(a.diagnostics.at("bootstrap_reps"), 30);
  EXPECT_EQ(a.diagnostics.at("bootstrap_failures"), 0);
  EXPECT_LT(a.diagnostics.at("bootstrap_ci_low"), a.diagnostics.at("bootstrap_ci_high"));
  EXPECT_EQ(a.series.at("fold_of_geo").size(), 40u);
  EXPECT_EQ(a.series.at("fold_outcome_test_rmse").size(), 5u);
  EXPECT_EQ(fit.weights.weights.size(), 40 * 14);
  EXPECT_NE(EstimateDml(panel, spec, RngStream(25, 1, "dml")).att_hat, a.att_hat);
}

TEST(EstimateDml, SpecValidation) {
  const Panel panel = SmallPanel(26);
  DmlSpec spec = RidgeDml(DmlVariant::kWg);
  spec.n_folds = 1;
  EXPECT_THROW(EstimateDml(panel, spec, RngStream(0, 0, "x")), Error);
  spec = RidgeDml(DmlVariant::kWg);
  spec.trim_quantile = 0.5;
  EXPECT_THROW(EstimateDml(panel, spec, RngStream(0, 0, "x")), Error);
  spec = RidgeDml(DmlVariant::kWg);
  spec.outcome_learner.kind = LearnerKind::kLogistic;
  EXPECT_THROW(EstimateDml(panel, spec, RngStream(0, 0, "x")), Error);
  spec = RidgeDml(DmlVariant::kWg);
  spec.n_folds = 11;  // only 10 treated geos
  try {
    EstimateDml(panel, spec, RngStream(0, 0, "x"));
    FAIL() << "expected a fold error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("folds"), std::string::npos);
  }
}

}  // namespace
}  // namespace geolift

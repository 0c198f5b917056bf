#include "dml/transform.hpp"

#include <algorithm>
#include <cctype>
#include <string>

#include "core/error.hpp"

namespace geolift {

std::string_view ToString(DmlVariant v) {
  switch (v) {
    case DmlVariant::kTwfe: return "TWFE";
    case DmlVariant::kWg: return "WG";
    case DmlVariant::kFd: return "FD";
    case DmlVariant::kCre: return "CRE";
  }
  return "?";
}

DmlVariant ParseDmlVariant(std::string_view text) {
  std::string upper(text);
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  if (upper.size() > 4 && upper.substr(upper.size() - 4) == "-DML") {
    upper.resize(upper.size() - 4);
  }
  for (DmlVariant v : {DmlVariant::kTwfe, DmlVariant::kWg, DmlVariant::kFd, DmlVariant::kCre}) {
    if (upper == ToString(v)) return v;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown DML variant '" + std::string(text) + "'");
}

EstimatorId ToEstimatorId(DmlVariant v) {
  switch (v) {
    case DmlVariant::kTwfe: return EstimatorId::kTwfeDml;
    case DmlVariant::kWg: return EstimatorId::kWgDml;
    case DmlVariant::kFd: return EstimatorId::kFdDml;
    case DmlVariant::kCre: return EstimatorId::kCreDml;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown DML variant");
}

namespace {

// Columns appended one at a time into a preallocated matrix.
class FeatureWriter {
 public:
  FeatureWriter(TransformedPanel& tp, Eigen::Index rows, Eigen::Index cols) : tp_(tp) {
    tp_.x_dagger.setZero(rows, cols);
  }
  Eigen::Ref<Eigen::VectorXd> Next(std::string name) {
    tp_.feature_names.push_back(std::move(name));
    return tp_.x_dagger.col(col_++);
  }
  Eigen::Index written() const { return col_; }

 private:
  TransformedPanel& tp_;
  Eigen::Index col_ = 0;
};

std::string Indexed(const char* prefix, int k) { return prefix + std::to_string(k); }

}  // namespace

TransformedPanel Transform(const Panel& panel, DmlVariant variant,
                           const TransformOptions& options) {
  panel.Validate();
  const int n = panel.n_units;
  const int t = panel.n_weeks;
  const int p = panel.n_static();
  const int q = panel.n_dynamic();
  const bool fd = variant == DmlVariant::kFd;
  Require(!fd || t >= 2, ErrorCode::kInvalidArgument, "first differences need >= 2 weeks");
  const int first_week = fd ? 1 : 0;
  const int tw = t - first_week;
  const Eigen::Index rows = static_cast<Eigen::Index>(n) * tw;

  TransformedPanel tp;
  tp.variant = variant;
  tp.n_geos = n;
  tp.weeks_per_geo = tw;
  tp.rows_dropped = fd ? n : 0;
  tp.y_dagger.resize(rows);
  tp.d_dagger.resize(rows);
  tp.d_raw.resize(rows);
  tp.geo_of_row.resize(static_cast<size_t>(rows));
  tp.week_of_row.resize(static_cast<size_t>(rows));

  const Eigen::MatrixXd d = panel.treat_active.cast<double>();
  auto row_of = [&](int i, int week) {
    return static_cast<Eigen::Index>(i) * tw + (week - first_week);
  };
  for (int i = 0; i < n; ++i) {
    for (int week = first_week; week < t; ++week) {
      const Eigen::Index r = row_of(i, week);
      tp.geo_of_row[static_cast<size_t>(r)] = i;
      tp.week_of_row[static_cast<size_t>(r)] = week;
      tp.d_raw[r] = d(i, week);
    }
  }

  // Long-format column of an N x T matrix after the variant's operation.
  enum class Op { kRaw, kDemean, kDiff, kGeoMean };
  auto fill = [&](Eigen::Ref<Eigen::VectorXd> out, const Eigen::MatrixXd& m, Op op) {
    for (int i = 0; i < n; ++i) {
      const double mean = m.row(i).mean();
      for (int week = first_week; week < t; ++week) {
        double v = m(i, week);
        switch (op) {
          case Op::kRaw: break;
          case Op::kDemean: v -= mean; break;
          case Op::kDiff: v -= m(i, week - 1); break;
          case Op::kGeoMean: v = mean; break;
        }
        out[row_of(i, week)] = v;
      }
    }
  };

  Eigen::MatrixXd week_index(n, t);
  for (int week = 0; week < t; ++week) week_index.col(week).setConstant(week);

  switch (variant) {
    case DmlVariant::kTwfe: {
      FeatureWriter w(tp, rows, p + q + 1 + (n - 1) + (t - 1));
      for (int k = 0; k < p; ++k) {
        auto col = w.Next(Indexed("static_", k));
        for (Eigen::Index r = 0; r < rows; ++r) {
          col[r] = panel.static_covariates(tp.geo_of_row[static_cast<size_t>(r)], k);
        }
      }
      for (int k = 0; k < q; ++k) fill(w.Next(Indexed("dynamic_", k)), panel.dynamic_covariates[k], Op::kRaw);
      fill(w.Next("week"), week_index, Op::kRaw);
      for (int i = 1; i < n; ++i) {
        auto col = w.Next(Indexed("geo_", i));
        col.segment(row_of(i, 0), tw).setOnes();
      }
      for (int week = 1; week < t; ++week) {
        auto col = w.Next(Indexed("week_", week));
        for (int i = 0; i < n; ++i) col[row_of(i, week)] = 1.0;
      }
      fill(tp.y_dagger, panel.outcome, Op::kRaw);
      fill(tp.d_dagger, d, Op::kRaw);
      break;
    }
    case DmlVariant::kWg: {
      FeatureWriter w(tp, rows, q + 1);
      for (int k = 0; k < q; ++k) fill(w.Next(Indexed("dynamic_", k)), panel.dynamic_covariates[k], Op::kDemean);
      fill(w.Next("week"), week_index, Op::kDemean);
      fill(tp.y_dagger, panel.outcome, Op::kDemean);
      fill(tp.d_dagger, d, Op::kDemean);
      break;
    }
    case DmlVariant::kFd: {
      FeatureWriter w(tp, rows, q + 1);
      for (int k = 0; k < q; ++k) fill(w.Next(Indexed("dynamic_", k)), panel.dynamic_covariates[k], Op::kDiff);
      fill(w.Next("week"), week_index, Op::kRaw);
      fill(tp.y_dagger, panel.outcome, Op::kDiff);
      fill(tp.d_dagger, d, Op::kDiff);
      break;
    }
    case DmlVariant::kCre: {
      const bool with_week = options.cre_include_week;
      const bool with_mean_d = options.cre_include_treatment_mean;
      FeatureWriter w(tp, rows, p + 2 * q + (with_mean_d ? 1 : 0) + (with_week ? 1 : 0));
      for (int k = 0; k < p; ++k) {
        auto col = w.Next(Indexed("static_", k));
        for (Eigen::Index r = 0; r < rows; ++r) {
          col[r] = panel.static_covariates(tp.geo_of_row[static_cast<size_t>(r)], k);
        }
      }
      for (int k = 0; k < q; ++k) fill(w.Next(Indexed("dynamic_", k)), panel.dynamic_covariates[k], Op::kRaw);
      for (int k = 0; k < q; ++k) fill(w.Next(Indexed("mean_dynamic_", k)), panel.dynamic_covariates[k], Op::kGeoMean);
      if (with_mean_d) fill(w.Next("mean_d"), d, Op::kGeoMean);
      if (with_week) fill(w.Next("week"), week_index, Op::kRaw);
      fill(tp.y_dagger, panel.outcome, Op::kRaw);
      fill(tp.d_dagger, d, Op::kRaw);
      break;
    }
  }
  return tp;
}

Eigen::VectorXd TransformTreatmentSurface(const TransformedPanel& tp,
                                          const Eigen::VectorXd& surface) {
  Require(surface.size() == tp.rows(), ErrorCode::kDimensionMismatch,
          "surface length differs from transformed row count");
  switch (tp.variant) {
    case DmlVariant::kTwfe:
    case DmlVariant::kCre:
      return surface;
    case DmlVariant::kWg: {
      Eigen::VectorXd out(surface.size());
      for (int i = 0; i < tp.n_geos; ++i) {
        auto block = surface.segment(static_cast<Eigen::Index>(i) * tp.weeks_per_geo, tp.weeks_per_geo);
        out.segment(static_cast<Eigen::Index>(i) * tp.weeks_per_geo, tp.weeks_per_geo) =
            block.array() - block.mean();
      }
      return out;
    }
    case DmlVariant::kFd: {
      Eigen::VectorXd out(surface.size());
      for (int i = 0; i < tp.n_geos; ++i) {
        const Eigen::Index start = static_cast<Eigen::Index>(i) * tp.weeks_per_geo;
        out[start] = 0.0;
        for (int k = 1; k < tp.weeks_per_geo; ++k) {
          out[start + k] = surface[start + k] - surface[start + k - 1];
        }
      }
      return out;
    }
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown DML variant");
}

}  // namespace geolift

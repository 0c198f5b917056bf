#include "dml/folds.hpp"

#include <string>

#include "core/error.hpp"

namespace geolift {

FoldAssignment MakeFolds(const std::vector<int>& ever_treated, int n_folds, RngStream& rng) {
  Require(n_folds >= 2, ErrorCode::kInvalidArgument, "n_folds must be >= 2");
  std::vector<int> treated;
  std::vector<int> control;
  for (size_t i = 0; i < ever_treated.size(); ++i) {
    (ever_treated[i] != 0 ? treated : control).push_back(static_cast<int>(i));
  }
  Require(static_cast<int>(treated.size()) >= n_folds, ErrorCode::kInvalidArgument,
          "need at least n_folds treated geos (" + std::to_string(treated.size()) + " < " +
              std::to_string(n_folds) + ")");
  Require(static_cast<int>(control.size()) >= n_folds, ErrorCode::kInvalidArgument,
          "need at least n_folds control geos (" + std::to_string(control.size()) + " < " +
              std::to_string(n_folds) + ")");
  FoldAssignment out;
  out.n_folds = n_folds;
  out.fold_of_geo.assign(ever_treated.size(), -1);
  for (std::vector<int>* stratum : {&treated, &control}) {
    rng.Shuffle(*stratum);
    for (size_t k = 0; k < stratum->size(); ++k) {
      out.fold_of_geo[static_cast<size_t>((*stratum)[k])] = static_cast<int>(k % static_cast<size_t>(n_folds));
    }
  }
  return out;
}

FoldAssignment MakeFolds(const Panel& panel, int n_folds, RngStream& rng) {
  return MakeFolds(panel.ever_treated, n_folds, rng);
}

void ValidateFolds(const std::vector<int>& ever_treated, const FoldAssignment& folds) {
  Require(folds.fold_of_geo.size() == ever_treated.size(), ErrorCode::kDimensionMismatch,
          "fold map length differs from geo count");
  std::vector<int> treated(static_cast<size_t>(folds.n_folds), 0);
  std::vector<int> control(static_cast<size_t>(folds.n_folds), 0);
  for (size_t i = 0; i < ever_treated.size(); ++i) {
    const int f = folds.fold_of_geo[i];
    Require(f >= 0 && f < folds.n_folds, ErrorCode::kInvalidArgument, "fold id out of range");
    ++(ever_treated[i] != 0 ? treated : control)[static_cast<size_t>(f)];
  }
  for (int f = 0; f < folds.n_folds; ++f) {
    Require(treated[static_cast<size_t>(f)] > 0 && control[static_cast<size_t>(f)] > 0,
            ErrorCode::kInvalidArgument,
            "fold " + std::to_string(f) + " lacks a treated or a control geo");
  }
}

}  // namespace geolift

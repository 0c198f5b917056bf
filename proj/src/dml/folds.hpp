#pragma once

#include <vector>

#include "core/panel.hpp"
#include "core/rng.hpp"

namespace geolift {

struct FoldAssignment {
  int n_folds = 0;
  std::vector<int> fold_of_geo;
};

// Shuffles treated and control geos separately, then deals each stratum
// round-robin into the folds.
FoldAssignment MakeFolds(const std::vector<int>& ever_treated, int n_folds, RngStream& rng);
FoldAssignment MakeFolds(const Panel& panel, int n_folds, RngStream& rng);

// Throws unless every fold holds at least one treated and one control geo.
void ValidateFolds(const std::vector<int>& ever_treated, const FoldAssignment& folds);

}  // namespace geolift

#pragma once

#include "core/estimate_result.hpp"
#include "core/panel.hpp"
#include "core/rng.hpp"
#include "dml/crossfit.hpp"
#include "dml/dml_spec.hpp"
#include "dml/folds.hpp"
#include "dml/second_stage.hpp"
#include "dml/transform.hpp"

namespace geolift {

struct DmlFit {
  TransformedPanel transformed;
  FoldAssignment folds;
  CrossfitResult crossfit;
  IptwWeights weights;
};

// transform -> folds -> cross-fit -> IPTW -> weighted second stage, with an
// optional stratified geo bootstrap (percentile CI in the diagnostics).
EstimateResult EstimateDml(const Panel& panel, const DmlSpec& spec, const RngStream& rng,
                           DmlFit* fit_out = nullptr);

}  // namespace geolift

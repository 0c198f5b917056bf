#pragma once

#include <cstdint>

#include "core/panel.hpp"
#include "sim/config.hpp"

namespace geolift {

struct SimOutput {
  Panel panel;
  GroundTruth truth;
};

// Pure function of its arguments: baseline, scenario mechanism, noise,
// assignment, impact curve and covariates, each from its own keyed stream.
SimOutput Generate(const SimConfig& cfg, const ScenarioSpec& spec, std::uint64_t master_seed,
                   std::uint64_t replication);

}  // namespace geolift

#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "core/panel.hpp"

namespace geolift {

// Long-format panel export, one row per (geo, week):
//   geo,week,y,d,g,static_0..static_{P-1},dynamic_0..dynamic_{Q-1}
// Ground truth goes to a sibling file:
//   geo,week,y0,y1,tau
// Values are written with 12 significant digits.
void WritePanelCsv(const Panel& panel, std::ostream& out);
void WriteTruthCsv(const GroundTruth& truth, const Panel& panel, std::ostream& out);
void WritePanelCsv(const Panel& panel, const std::string& path);
void WriteTruthCsv(const GroundTruth& truth, const Panel& panel, const std::string& path);

// t_pre is recovered as the first week with d = 1, so at least one treated geo
// is required.
Panel ReadPanelCsv(std::istream& in);
Panel ReadPanelCsv(const std::string& path);

// Recomputes true_att from the grids.
GroundTruth ReadTruthCsv(std::istream& in, const Panel& panel);
GroundTruth ReadTruthCsv(const std::string& path, const Panel& panel);

std::string FormatCsvNumber(double value);

}  // namespace geolift

#pragma once

#include <string>

#include "harness/study.hpp"

namespace geolift {

// Model | Abs. Bias | Coverage | Power | Avg. CI Width, plus signed bias and
// success counts.
std::string ReportToMarkdown(const StudyReport& report);
std::string ReportToCsv(const StudyReport& report);
// Long format: one row per (replication, estimator).
std::string ReplicationsToCsv(const StudyReport& report);

// Writes report.md, report.csv and replications.csv into `out_dir`
// (created if missing).
void WriteStudyArtifacts(const StudyReport& report, const std::string& out_dir);

}  // namespace geolift

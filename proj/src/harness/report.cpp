#include "harness/report.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "core/error.hpp"

namespace geolift {

namespace {

std::string Fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

std::string Exact(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

// Error messages may contain commas or quotes.
std::string CsvQuote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

void WriteFile(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  Require(static_cast<bool>(out), ErrorCode::kIo, "cannot open " + path.string() + " for writing");
  out << text;
  Require(static_cast<bool>(out), ErrorCode::kIo, "failed writing " + path.string());
}

}  // namespace

std::string ReportToMarkdown(const StudyReport& report) {
  std::ostringstream md;
  md << "# Scenario " << ToString(report.scenario) << "\n\n";
  md << "Replications: " << report.replications << ", master seed: " << report.master_seed
     << "\n\n";
  md << "| Model | Abs. Bias | Coverage | Power | Avg. CI Width | Signed Bias | Successes |\n";
  md << "|---|---:|---:|---:|---:|---:|---:|\n";
  for (const EstimatorSummary& s : report.rows) {
    md << "| " << DisplayName(s.estimator_id) << " | ";
    if (!s.available) {
      md << "n/a | n/a | n/a | n/a | n/a | 0/" << report.replications << " |\n";
      continue;
    }
    md << Fixed(s.abs_bias, 1) << " | " << Fixed(s.coverage, 2) << " | " << Fixed(s.power, 2)
       << " | " << Fixed(s.avg_ci_width, 1) << " | " << Fixed(s.signed_bias, 1) << " | "
       << s.n_success << "/" << report.replications << " |\n";
  }
  md << "\nAbs. Bias is the mean absolute error against the true ATT; Signed Bias is the mean "
        "error. Coverage and power use 95% normal intervals.\n"
        "ASC intervals come from a leave-one-treated-geo-out jackknife over per-geo gaps.\n"
        "DML intervals use geo-clustered sandwich standard errors. FD-DML reports the "
        "differenced-treatment coefficient directly on the level scale, which weights the "
        "launch week heavily.\n";
  return md.str();
}

std::string ReportToCsv(const StudyReport& report) {
  std::ostringstream csv;
  csv << "model,abs_bias,signed_bias,coverage,power,avg_ci_width,n_success,n_failed,available\n";
  for (const EstimatorSummary& s : report.rows) {
    csv << DisplayName(s.estimator_id) << ',' << Exact(s.abs_bias) << ',' << Exact(s.signed_bias)
        << ',' << Exact(s.coverage) << ',' << Exact(s.power) << ',' << Exact(s.avg_ci_width)
        << ',' << s.n_success << ',' << s.n_failed << ',' << (s.available ? 1 : 0) << '\n';
  }
  return csv.str();
}

std::string ReplicationsToCsv(const StudyReport& report) {
  std::ostringstream csv;
  csv << "replication,model,true_att,att_hat,se,ci_low,ci_high,converged,status,error\n";
  for (const ReplicationResult& rep : report.per_replication) {
    for (const EstimatorOutcome& o : rep.outcomes) {
      csv << rep.replication << ',' << DisplayName(o.estimator_id) << ',' << Exact(rep.true_att);
      if (o.ok) {
        const EstimateResult& r = o.result;
        csv << ',' << Exact(r.att_hat) << ',' << Exact(r.se) << ',' << Exact(r.ci_low) << ','
            << Exact(r.ci_high) << ',' << (r.converged ? 1 : 0) << ",ok,\n";
      } else {
        csv << ",,,,,,failed," << CsvQuote(o.error) << '\n';
      }
    }
  }
  return csv.str();
}

void WriteStudyArtifacts(const StudyReport& report, const std::string& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  Require(!ec, ErrorCode::kIo, "cannot create output directory " + out_dir + ": " + ec.message());
  const std::filesystem::path dir(out_dir);
  WriteFile(dir / "report.md", ReportToMarkdown(report));
  WriteFile(dir / "report.csv", ReportToCsv(report));
  WriteFile(dir / "replications.csv", ReplicationsToCsv(report));
}

}  // namespace geolift

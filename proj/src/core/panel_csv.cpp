#include "core/panel_csv.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <vector>

#include "core/error.hpp"

namespace geolift {

namespace {

std::vector<std::string> SplitLine(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream stream(line);
  while (std::getline(stream, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double ParseDouble(const std::string& text, int line_no) {
  const char* begin = text.c_str();
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(begin, &end);
  Require(end != begin && *end == '\0' && errno != ERANGE, ErrorCode::kIo,
          "bad number '" + text + "' on line " + std::to_string(line_no));
  return v;
}

int ParseInt(const std::string& text, int line_no) {
  const double v = ParseDouble(text, line_no);
  const int i = static_cast<int>(v);
  Require(static_cast<double>(i) == v, ErrorCode::kIo,
          "expected integer, got '" + text + "' on line " + std::to_string(line_no));
  return i;
}

std::string StripCr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

std::ofstream OpenOut(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  Require(out.good(), ErrorCode::kIo, "cannot open '" + path + "' for writing");
  return out;
}

std::ifstream OpenIn(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  Require(in.good(), ErrorCode::kIo, "cannot open '" + path + "' for reading");
  return in;
}

}  // namespace

std::string FormatCsvNumber(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", value);
  return buf;
}

void WritePanelCsv(const Panel& panel, std::ostream& out) {
  out << "geo,week,y,d,g";
  for (int p = 0; p < panel.n_static(); ++p) out << ",static_" << p;
  for (int q = 0; q < panel.n_dynamic(); ++q) out << ",dynamic_" << q;
  out << '\n';
  for (int i = 0; i < panel.n_units; ++i) {
    for (int t = 0; t < panel.n_weeks; ++t) {
      out << i << ',' << t << ',' << FormatCsvNumber(panel.outcome(i, t)) << ','
          << panel.treat_active(i, t) << ',' << panel.ever_treated[i];
      for (int p = 0; p < panel.n_static(); ++p)
        out << ',' << FormatCsvNumber(panel.static_covariates(i, p));
      for (int q = 0; q < panel.n_dynamic(); ++q)
        out << ',' << FormatCsvNumber(panel.dynamic_covariates[q](i, t));
      out << '\n';
    }
  }
  Require(out.good(), ErrorCode::kIo, "failed writing panel csv");
}

void WriteTruthCsv(const GroundTruth& truth, const Panel& panel, std::ostream& out) {
  Require(truth.y0.rows() == panel.n_units && truth.y0.cols() == panel.n_weeks,
          ErrorCode::kDimensionMismatch, "truth/panel shape");
  out << "geo,week,y0,y1,tau\n";
  for (int i = 0; i < panel.n_units; ++i)
    for (int t = 0; t < panel.n_weeks; ++t)
      out << i << ',' << t << ',' << FormatCsvNumber(truth.y0(i, t)) << ','
          << FormatCsvNumber(truth.y1(i, t)) << ',' << FormatCsvNumber(truth.tau(i, t)) << '\n';
  Require(out.good(), ErrorCode::kIo, "failed writing truth csv");
}

void WritePanelCsv(const Panel& panel, const std::string& path) {
  auto out = OpenOut(path);
  WritePanelCsv(panel, out);
}

void WriteTruthCsv(const GroundTruth& truth, const Panel& panel, const std::string& path) {
  auto out = OpenOut(path);
  WriteTruthCsv(truth, panel, out);
}

Panel ReadPanelCsv(std::istream& in) {
  std::string line;
  Require(static_cast<bool>(std::getline(in, line)), ErrorCode::kIo, "empty panel csv");
  const auto header = SplitLine(StripCr(line));
  Require(header.size() >= 5 && header[0] == "geo" && header[1] == "week" && header[2] == "y" &&
              header[3] == "d" && header[4] == "g",
          ErrorCode::kIo, "panel csv header must start with geo,week,y,d,g");
  int n_static = 0;
  int n_dynamic = 0;
  for (std::size_t c = 5; c < header.size(); ++c) {
    if (header[c] == "static_" + std::to_string(n_static) && n_dynamic == 0) {
      ++n_static;
    } else if (header[c] == "dynamic_" + std::to_string(n_dynamic)) {
      ++n_dynamic;
    } else {
      throw Error(ErrorCode::kIo, "unexpected panel column '" + header[c] + "'");
    }
  }

  struct Row {
    int geo, week, d, g;
    std::vector<double> values;  // y, static..., dynamic...
  };
  std::vector<Row> rows;
  int max_geo = -1;
  int max_week = -1;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = StripCr(line);
    if (line.empty()) continue;
    const auto f = SplitLine(line);
    Require(f.size() == header.size(), ErrorCode::kIo,
            "wrong field count on line " + std::to_string(line_no));
    Row row{ParseInt(f[0], line_no), ParseInt(f[1], line_no), ParseInt(f[3], line_no),
            ParseInt(f[4], line_no), {}};
    row.values.push_back(ParseDouble(f[2], line_no));
    for (std::size_t c = 5; c < f.size(); ++c) row.values.push_back(ParseDouble(f[c], line_no));
    Require(row.geo >= 0 && row.week >= 0, ErrorCode::kIo, "negative geo/week index");
    max_geo = std::max(max_geo, row.geo);
    max_week = std::max(max_week, row.week);
    rows.push_back(std::move(row));
  }
  const int n = max_geo + 1;
  const int t = max_week + 1;
  Require(n > 0 && static_cast<long>(rows.size()) == static_cast<long>(n) * t, ErrorCode::kIo,
          "panel csv must be balanced with one row per (geo, week)");

  Panel p;
  p.n_units = n;
  p.n_weeks = t;
  p.outcome = Eigen::MatrixXd::Zero(n, t);
  p.treat_active = Eigen::MatrixXi::Zero(n, t);
  p.ever_treated.assign(n, -1);
  p.static_covariates = Eigen::MatrixXd::Zero(n, n_static);
  p.dynamic_covariates.assign(n_dynamic, Eigen::MatrixXd::Zero(n, t));
  Eigen::MatrixXi seen = Eigen::MatrixXi::Zero(n, t);
  std::vector<bool> static_seen(n, false);
  int first_treated_week = t;
  for (const auto& r : rows) {
    Require(seen(r.geo, r.week) == 0, ErrorCode::kIo, "duplicate (geo, week) row");
    seen(r.geo, r.week) = 1;
    p.outcome(r.geo, r.week) = r.values[0];
    p.treat_active(r.geo, r.week) = r.d;
    if (p.ever_treated[r.geo] == -1) p.ever_treated[r.geo] = r.g;
    Require(p.ever_treated[r.geo] == r.g, ErrorCode::kIo, "g must be constant within geo");
    for (int s = 0; s < n_static; ++s) {
      const double v = r.values[1 + s];
      if (!static_seen[r.geo]) {
        p.static_covariates(r.geo, s) = v;
      } else {
        Require(p.static_covariates(r.geo, s) == v, ErrorCode::kIo,
                "static covariate varies within geo " + std::to_string(r.geo));
      }
    }
    static_seen[r.geo] = true;
    for (int q = 0; q < n_dynamic; ++q) p.dynamic_covariates[q](r.geo, r.week) = r.values[1 + n_static + q];
    if (r.d == 1) first_treated_week = std::min(first_treated_week, r.week);
  }
  Require(first_treated_week < t, ErrorCode::kIo,
          "panel csv has no treated cells; cannot recover t_pre");
  p.t_pre = first_treated_week;
  p.t_post = t - first_treated_week;
  p.Validate();
  return p;
}

Panel ReadPanelCsv(const std::string& path) {
  auto in = OpenIn(path);
  return ReadPanelCsv(in);
}

GroundTruth ReadTruthCsv(std::istream& in, const Panel& panel) {
  std::string line;
  Require(static_cast<bool>(std::getline(in, line)), ErrorCode::kIo, "empty truth csv");
  Require(StripCr(line) == "geo,week,y0,y1,tau", ErrorCode::kIo,
          "truth csv header must be geo,week,y0,y1,tau");
  const int n = panel.n_units;
  const int t = panel.n_weeks;
  GroundTruth truth;
  truth.y0 = Eigen::MatrixXd::Zero(n, t);
  truth.y1 = Eigen::MatrixXd::Zero(n, t);
  truth.tau = Eigen::MatrixXd::Zero(n, t);
  Eigen::MatrixXi seen = Eigen::MatrixXi::Zero(n, t);
  int line_no = 1;
  long count = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = StripCr(line);
    if (line.empty()) continue;
    const auto f = SplitLine(line);
    Require(f.size() == 5, ErrorCode::kIo, "truth csv needs 5 fields per row");
    const int geo = ParseInt(f[0], line_no);
    const int week = ParseInt(f[1], line_no);
    Require(geo >= 0 && geo < n && week >= 0 && week < t, ErrorCode::kDimensionMismatch,
            "truth row outside panel dimensions");
    Require(seen(geo, week) == 0, ErrorCode::kIo, "duplicate truth row");
    seen(geo, week) = 1;
    truth.y0(geo, week) = ParseDouble(f[2], line_no);
    truth.y1(geo, week) = ParseDouble(f[3], line_no);
    truth.tau(geo, week) = ParseDouble(f[4], line_no);
    ++count;
  }
  Require(count == static_cast<long>(n) * t, ErrorCode::kDimensionMismatch,
          "truth csv does not cover the panel");
  truth.true_att = TrueAtt(truth, panel);
  return truth;
}

GroundTruth ReadTruthCsv(const std::string& path, const Panel& panel) {
  auto in = OpenIn(path);
  return ReadTruthCsv(in, panel);
}

}  // namespace geolift

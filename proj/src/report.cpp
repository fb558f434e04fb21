#include "orbitspace/report.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace orbitspace {
namespace {

std::string number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os << std::setprecision(12) << x;
  return os.str();
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

}  // namespace

nlohmann::json report_json(const RunReport& report, bool with_timings) {
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : report.checks) {
    nlohmann::json j = {{"name", c.name}, {"pass", c.pass}, {"vacuous", c.vacuous}};
    // Non-finite deviations are not valid JSON numbers.
    if (std::isfinite(c.deviation))
      j["deviation"] = c.deviation;
    else
      j["deviation"] = number(c.deviation);
    j["tolerance"] = c.tolerance;
    j["witness"] = c.witness;
    if (!c.note.empty()) j["note"] = c.note;
    checks.push_back(std::move(j));
  }
  nlohmann::json out = {{"scenario", report.scenario},
                        {"suite", report.suite},
                        {"seed", report.seed},
                        {"checks", checks},
                        {"overall", report.overall()}};
  if (with_timings) {
    nlohmann::json t = nlohmann::json::object();
    for (const auto& [stage, seconds] : report.timings) t[stage] = seconds;
    out["timings"] = t;
  }
  return out;
}

std::string summary_csv(const RunReport& report) {
  std::ostringstream os;
  os << "scenario,check,pass,vacuous,deviation,tolerance,note\n";
  for (const auto& c : report.checks)
    os << csv_field(report.scenario) << ',' << csv_field(c.name) << ',' << (c.pass ? "true" : "false") << ','
       << (c.vacuous ? "true" : "false") << ',' << number(c.deviation) << ',' << number(c.tolerance) << ','
       << csv_field(c.note) << '\n';
  return os.str();
}

std::string matrix_csv(const Mat& m) {
  std::ostringstream os;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) os << (j ? "," : "") << number(m(i, j));
    os << '\n';
  }
  return os.str();
}

std::string summary_text(const RunReport& report) {
  std::ostringstream os;
  for (const auto& c : report.checks) {
    os << (c.pass ? (c.vacuous ? "PASS (vacuous) " : "PASS ") : "FAIL ") << c.name << " deviation=" << number(c.deviation)
       << " tolerance=" << number(c.tolerance);
    if (!c.note.empty()) os << "  [" << c.note << "]";
    os << '\n';
  }
  os << "overall: " << (report.overall() ? "PASS" : "FAIL") << '\n';
  return os.str();
}

std::vector<std::string> write_outputs(const RunReport& report, const std::string& dir) {
  namespace fs = std::filesystem;
  const fs::path root(dir);
  fs::create_directories(root);
  std::vector<std::string> written;
  auto put = [&](const std::string& name, const std::string& text) {
    write_file(root / name, text);
    written.push_back((root / name).string());
  };
  put("report.json", report_json(report).dump(2) + "\n");
  put("summary.csv", summary_csv(report));
  for (const auto& a : report.artifacts)
    put(a.file, a.kind == Artifact::Kind::MatrixCsv ? matrix_csv(a.matrix) : a.json.dump(2) + "\n");
  return written;
}

}  // namespace orbitspace

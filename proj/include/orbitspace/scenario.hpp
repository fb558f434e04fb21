#pragma once

// Builtin scenarios, JSON configs and the verification suites.

#include "orbitspace/basic_cohomology.hpp"
#include "orbitspace/complexes.hpp"
#include "orbitspace/quotient.hpp"
#include "orbitspace/stratification.hpp"

#include <nlohmann/json.hpp>

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace orbitspace {

using QuotientOracle = std::function<double(const Point&, const Point&)>;

/// Sample designs and reference data attached to a scenario.
struct ScenarioPlan {
  explicit ScenarioPlan(ActionScenario s) : scn(std::move(s)) {}

  ActionScenario scn;
  /// Canonical builtin name, or "inline".
  std::string builtin;
  /// Closed-form quotient distance, when known.
  QuotientOracle oracle;
  /// Exact finite-group distances (tolerance 1e-9) rather than quadrature (2h).
  bool exact = false;
  /// dbar equals the one-step distance (Z_n linear actions on the plane).
  bool one_step_optimal = false;

  std::vector<Point> random_bases;
  /// Grid over a fundamental domain, for submetry, length space and Alexandrov.
  std::vector<Point> dense_bases;
  double dense_pitch = 0.0;
  std::size_t submetry_index = 0;
  std::vector<double> submetry_radii;
  std::optional<double> kappa;

  Point tube_base;
  double tube_radius = 0.0;
  std::vector<Point> tube_probes;

  std::vector<Point> strat_sample;
  double strat_pitch = 0.0;
  std::vector<Point> slice_probes;
  std::vector<double> slice_radii;

  /// Velocity for the perpendicularity check (normal to the orbit).
  std::optional<std::pair<Point, Vec>> srf_start;
  /// Metric used by the foliation checks (defaults to the working metric).
  std::optional<MetricField> foliation_metric;

  CoefficientSpace space;
  bool cone_surrogate = false;
  std::vector<Point> rips_sample;
  double rips_scale = 0.0;
  /// Top degree compared between the basic and Rips Betti numbers.
  int quotient_dimension = 0;
  std::optional<std::vector<long>> expected_betti;
};

/// Names accepted by make_builtin, with "(n)" for parametrised families.
std::vector<std::string> builtin_names();

struct Resolution {
  std::size_t haar = kDefaultHaarResolution;
  std::size_t base_points = 40;
  std::uint64_t seed = 0;
};

/// Throws ValidationError for unknown names.
ScenarioPlan make_builtin(const std::string& name, const Resolution& res);

struct RunConfig {
  Resolution resolution;
  std::map<std::string, double> tolerances;
  std::string outputs;
  std::optional<int> cutoff;
  std::optional<double> rips_scale;

  double tol(const std::string& key) const;
};

/// Named tolerances and their defaults.
const std::map<std::string, double>& default_tolerances();

struct LoadedScenario {
  ScenarioPlan plan;
  RunConfig config;
};

/// Parses a JSON config. Unknown fields, nonpositive tolerances and a missing
/// seed are ValidationErrors, as are group validation failures.
LoadedScenario load_config(const nlohmann::json& config);
LoadedScenario load_config_file(const std::string& path);

/// Inline scenario spec {group, manifold, base_metric}.
ScenarioPlan make_inline(const nlohmann::json& spec, const Resolution& res);

std::vector<std::string> suite_names();

/// A distance matrix, complex or table to be written next to the report.
struct Artifact {
  std::string file;
  enum class Kind { MatrixCsv, Json } kind = Kind::Json;
  Mat matrix;
  nlohmann::json json;
};

struct RunReport {
  std::string scenario;
  std::string suite;
  std::uint64_t seed = 0;
  std::vector<VerificationReport> checks;
  std::vector<Artifact> artifacts;
  /// Seconds per stage, reported under a separate key.
  std::vector<std::pair<std::string, double>> timings;

  /// Every non-vacuous check passes.
  bool overall() const;
};

/// Runs the checks of one suite (or "all"). Check errors become failed
/// entries; an unknown or empty suite name throws ValidationError listing
/// the valid suites.
RunReport run_suite(const ScenarioPlan& plan, const RunConfig& config, const std::string& suite);

}  // namespace orbitspace

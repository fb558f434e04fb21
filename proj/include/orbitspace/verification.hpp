#pragma once

#include <nlohmann/json.hpp>

#include <limits>
#include <string>

namespace orbitspace {

/// Outcome of one numerical certificate. pass is always deviation <= tolerance.
struct VerificationReport {
  std::string name;
  bool pass = false;
  double deviation = 0.0;
  double tolerance = 0.0;
  /// The check had nothing to test (empty probe set, discrete orbits, ...).
  bool vacuous = false;
  std::string note;
  nlohmann::json witness = nlohmann::json::object();

  static VerificationReport make(std::string name, double deviation, double tolerance) {
    VerificationReport r;
    r.name = std::move(name);
    r.deviation = deviation;
    r.tolerance = tolerance;
    r.pass = deviation <= tolerance;
    return r;
  }

  static VerificationReport vacuous_pass(std::string name, double tolerance, std::string note) {
    VerificationReport r = make(std::move(name), 0.0, tolerance);
    r.vacuous = true;
    r.note = std::move(note);
    return r;
  }

  /// Failure that is not a numeric deviation (structural mismatch, error).
  static VerificationReport failure(std::string name, std::string note) {
    VerificationReport r;
    r.name = std::move(name);
    r.deviation = std::numeric_limits<double>::infinity();
    r.tolerance = 0.0;
    r.pass = false;
    r.note = std::move(note);
    return r;
  }
};

}  // namespace orbitspace

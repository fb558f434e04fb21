#pragma once

// Orbit-type labels (conjugacy, weak, normal), sample-relative connected
// components and their dimensions, and the decomposition checks.

#include "orbitspace/group.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace orbitspace {

enum class Relation { Conjugacy, Weak, Normal };

std::string to_string(Relation r);

/// Cap on the isotropy order for the isomorphism search.
inline constexpr std::size_t kIsomorphismOrderCap = 64;

/// Every bijection phi with phi(a b) = phi(a) phi(b), found by assigning
/// images to the generators of t1. Throws UnsupportedError above the cap.
std::vector<std::vector<std::size_t>> group_isomorphisms(const CayleyTable& t1, const CayleyTable& t2);

bool conjugacy_equal(const ActionScenario& scn, const IsotropyDescriptor& h1, const IsotropyDescriptor& h2);
bool weak_type_equal(const IsotropyDescriptor& h1, const IsotropyDescriptor& h2);
bool normal_type_equal(const NormalRepresentation& r1, const NormalRepresentation& r2, double tol = 1e-6);

struct OrbitTypeLabel {
  Relation relation = Relation::Weak;
  std::size_t class_id = 0;
  IsotropyDescriptor isotropy;
  /// Normal labels only: trace per isotropy element, in local order.
  std::vector<double> characters;
  std::string describe() const;
};

struct StratificationReport {
  Relation relation = Relation::Weak;
  double epsilon = 0.0;
  std::vector<Point> sample;
  /// Class id per point; -1 marks excluded (ambiguous) points.
  std::vector<int> labels;
  /// Witness per class id.
  std::vector<OrbitTypeLabel> classes;
  std::vector<std::vector<std::size_t>> components;
  std::vector<int> component_label;
  std::vector<int> component_dimension;
  /// Component pairs (R, S) with R within epsilon of S and dim R < dim S.
  std::vector<std::pair<std::size_t, std::size_t>> frontier;
  std::vector<std::size_t> excluded;
  std::vector<std::string> violations;

  std::size_t class_count() const { return classes.size(); }
  /// Component index per point (-1 for excluded points).
  std::vector<int> component_of() const;
};

/// Labels, components (union-find over the epsilon-proximity graph within a
/// label) and per-component dimensions (mode of local PCA dimensions in
/// tangent coordinates over neighbours within 2 epsilon).
StratificationReport stratify(const ActionScenario& scn, const std::vector<Point>& sample, Relation relation,
                              double epsilon, std::size_t N = kDefaultHaarResolution);

/// Rebuilds components, dimensions and frontier after labels were edited.
void rebuild_components(const ActionScenario& scn, StratificationReport& report);

/// For component pairs (R, S) with dim R < dim S and some R point within
/// delta of S, every R point must be within delta of S.
std::vector<std::string> verify_frontier(const ActionScenario& scn, const StratificationReport& report, double delta);

/// Every component of every weak class carries a single normal label.
VerificationReport verify_normal_open_closed(const StratificationReport& weak, const StratificationReport& normal);

/// Stratifies a ball of the slice representation at p and its exp_map image
/// in the scenario, at radius and radius / 2, and compares the label
/// partitions for the weak and normal relations.
VerificationReport verify_slice_consistency(const ActionScenario& scn, const Point& p, double radius, int resolution,
                                            std::size_t N = kDefaultHaarResolution);

/// Canonical relabelling of a label vector by first occurrence.
std::vector<int> canonical_partition(const std::vector<int>& labels);

}  // namespace orbitspace

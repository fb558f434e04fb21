#pragma once

// The quotient metric on sampled orbits: one-step orbit set distances, their
// shortest-path closure, and the metric certificates built on top of it.

#include "orbitspace/group.hpp"
#include "orbitspace/kernels.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace orbitspace {

struct QuotientGraph {
  std::vector<OrbitSample> orbits;
  /// One-step orbit set distances.
  Mat w;
  /// Shortest-path closure of w. Empty when built without closure; use
  /// distances_from() in that case.
  Mat dbar;
  /// Sampling pitch: max(declared base pitch, orbit point spacing).
  double h = 0.0;
  /// Bias bound of the underlying point distances (0 for closed forms).
  double distance_error = 0.0;

  std::size_t size() const { return orbits.size(); }
  bool has_closure() const { return dbar.rows() == w.rows() && w.rows() > 0; }
  /// Row i of dbar (single-source Dijkstra when no closure is stored).
  Vec distances_from(std::size_t i) const;
};

struct QuotientOptions {
  std::size_t resolution = kDefaultHaarResolution;
  /// Spacing of the base points, folded into h.
  double base_pitch = 0.0;
  bool closure = true;
  kernels::Backend backend = kernels::Backend::Parallel;
};

/// min over point pairs of the geodesic distance.
double orbit_set_distance(const ActionScenario& scn, const OrbitSample& a, const OrbitSample& b);

/// Largest gap between neighbouring points of a sampled orbit (0 for
/// finite groups, whose orbits are sampled exactly).
double orbit_spacing(const ActionScenario& scn, const Point& p, std::size_t N);

QuotientGraph build_quotient_graph(const ActionScenario& scn, const std::vector<Point>& bases,
                                   const QuotientOptions& options = {});

double quotient_distance(const QuotientGraph& g, std::size_t i, std::size_t j);

/// Largest triangle-inequality excess over `trials` random triples of m.
struct TriangleCheck {
  double worst = 0.0;
  std::size_t i = 0, j = 0, k = 0;
};
TriangleCheck triangle_excess(const Mat& m, std::size_t trials, std::uint64_t seed);

/// Symmetry, triangle inequality over random triples, and the local formula
/// |dbar - w| on node pairs with w < tube_radius (skipped when tube_radius <= 0).
VerificationReport verify_metric_axioms(const QuotientGraph& g, std::size_t trials, std::uint64_t seed, double tol,
                                        double tube_radius = 0.0);

/// dbar <= w entrywise; with require_equality also |dbar - w| <= tol.
VerificationReport verify_closure_dominance(const QuotientGraph& g, double tol, bool require_equality);

/// Both submetry inclusions for the balls around base point `p_index`.
VerificationReport verify_submetry(const ActionScenario& scn, const QuotientGraph& g, std::size_t p_index,
                                   const std::vector<double>& radii, double tol);

/// Spread of d(q, O) over the points q of every probe orbit meeting the tube.
VerificationReport verify_equidistance(const ActionScenario& scn, const OrbitSample& orbit,
                                       const std::vector<OrbitSample>& probes, double eps, double tol);

/// Probe orbits that meet the tube must lie inside it.
VerificationReport verify_tube_invariance(const ActionScenario& scn, const OrbitSample& orbit,
                                          const std::vector<OrbitSample>& probes, double eps);

/// Approximate midpoints for every pair.
VerificationReport verify_length_space(const QuotientGraph& g, const std::vector<std::pair<std::size_t, std::size_t>>& pairs,
                                       double tol);

/// Distance from a vertex to a point on the opposite side of a model
/// triangle with curvature kappa; the point sits at distance s from b on
/// the side of length a_len. b_len = |ac| and c_len = |ab|.
double comparison_distance(double kappa, double a_len, double b_len, double c_len, double s);

VerificationReport verify_alexandrov(const QuotientGraph& g, double kappa, std::size_t triangles, std::uint64_t seed,
                                     double tol);

}  // namespace orbitspace

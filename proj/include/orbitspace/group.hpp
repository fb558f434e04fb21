#pragma once

// Compact matrix groups acting isometrically on model manifolds: Haar
// quadrature, isotropy, orbits, averaged invariant metrics, normal
// representations and foliation checks.

#include "orbitspace/geometry.hpp"
#include "orbitspace/verification.hpp"

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace orbitspace {

/// Multiplication table of a finite group on local indices 0..order-1.
/// Index 0 is always the identity.
struct CayleyTable {
  std::vector<std::vector<std::size_t>> product;
  std::vector<std::size_t> inverse;

  std::size_t order() const { return product.size(); }
  std::size_t mul(std::size_t a, std::size_t b) const { return product[a][b]; }
  std::size_t element_order(std::size_t a) const;
  bool is_abelian() const;

  static CayleyTable cyclic(std::size_t k);
  /// Table of the subgroup on `members` (members[0] must be the identity),
  /// reindexed in the order given.
  CayleyTable restrict_to(const std::vector<std::size_t>& members) const;
  /// Greedy generating set in index order.
  std::vector<std::size_t> generators() const;
};

struct FiniteGroup {
  std::vector<GroupElement> elements;  // elements[0] is the identity
  CayleyTable table;
};

/// t -> exp(t A) for t in [0, 2pi); exp(2 pi A) = I is validated.
struct CircleGroup {
  Mat generator;
};

/// t -> x + t d (mod 2pi) on a torus; d has integer entries.
struct CircleTranslation {
  Vec direction;
};

class GroupModel;

/// Factors act block-diagonally on the concatenated coordinates.
struct ProductGroup {
  std::vector<GroupModel> factors;
};

class GroupModel {
 public:
  using Variant = std::variant<FiniteGroup, CircleGroup, CircleTranslation, ProductGroup>;

  /// Validates orthogonality (1e-12), presence of the identity and closure
  /// (1e-10); closure errors name the offending product.
  static GroupModel finite(std::vector<GroupElement> elements);
  static GroupModel finite_from_matrices(const std::vector<Mat>& matrices);
  /// Closure of the generators, up to max_order elements.
  static GroupModel generated_by(const std::vector<GroupElement>& generators, std::size_t max_order = 1024);
  static GroupModel circle(const Mat& generator);
  static GroupModel circle_translation(const Vec& direction);
  static GroupModel product(std::vector<GroupModel> factors);

  static GroupModel trivial(int n);
  /// Rotations by 2 pi k / n of the plane.
  static GroupModel cyclic_rotations(int n);
  /// Rotations and reflections of the regular n-gon, order 2n.
  static GroupModel dihedral(int n);
  /// {I, diag(1, -1)}
  static GroupModel reflection();
  /// {I, -I} on R^n
  static GroupModel antipodal(int n);
  /// {0, pi} translations of the circle T^1.
  static GroupModel half_turn_translation();
  static GroupModel plane_rotation_circle();
  /// Rotations of R^3 about the z-axis.
  static GroupModel z_axis_circle();

  const Variant& variant() const { return v_; }
  int dimension() const { return dim_; }
  bool is_finite() const { return flat_.has_value(); }
  /// Finite groups (including products of finite factors) as one element list.
  const FiniteGroup& finite_group() const;
  /// Infinitesimal generators as affine vector fields x -> linear x + shift
  /// (block embedded for products). Empty for finite groups.
  std::vector<GroupElement> lie_algebra() const;
  std::string describe() const;

 private:
  GroupModel(Variant v, int dim) : v_(std::move(v)), dim_(dim) {}
  Variant v_;
  int dim_;
  std::optional<FiniteGroup> flat_;
};

struct HaarNode {
  GroupElement element;
  double weight = 0.0;
};

struct HaarQuadrature {
  std::vector<HaarNode> nodes;

  std::vector<WeightedElement> weighted() const;
  double total_weight() const;
};

/// Finite groups: every element with weight 1/|G| (N ignored). Circles: N
/// equispaced parameters with weight 1/N, exact on trigonometric polynomials
/// of frequency < N. Products: tensor product of the factor rules.
HaarQuadrature haar_quadrature(const GroupModel& group, std::size_t N);

inline constexpr std::size_t kDefaultHaarResolution = 360;

struct ActionScenario {
  std::string name;
  GroupModel group;
  /// Carries the working (invariant) metric.
  ManifoldModel manifold;
  MetricField base_metric;

  /// Checks dimensions and that group elements map probe points onto the
  /// manifold within 1e-9. Throws ValidationError.
  void validate() const;
};

ActionScenario make_scenario(std::string name, GroupModel group, ManifoldModel manifold);

Point act(const ActionScenario& scn, const GroupElement& g, const Point& p);

enum class IsotropyKind { FiniteSubgroup, FullCircle, FiniteCyclicInCircle };

struct IsotropyDescriptor {
  IsotropyKind kind = IsotropyKind::FiniteSubgroup;
  /// FiniteSubgroup: indices into the parent finite group, identity first.
  std::vector<std::size_t> members;
  /// Local element list (empty for FullCircle).
  std::vector<GroupElement> elements;
  /// Local multiplication table (empty for FullCircle).
  CayleyTable table;
  /// FullCircle: infinitesimal generator acting on the ambient chart.
  Mat circle_generator;
  /// Detection landed inside the ambiguity band.
  bool ambiguous = false;

  /// Zero means infinite (FullCircle).
  std::size_t order() const { return kind == IsotropyKind::FullCircle ? 0 : table.order(); }
  bool is_trivial() const { return kind != IsotropyKind::FullCircle && table.order() == 1; }
  std::string describe() const;
};

inline constexpr double kIsotropyTolerance = 1e-8;

IsotropyDescriptor isotropy(const ActionScenario& scn, const Point& p, double tol = kIsotropyTolerance,
                            std::size_t N = kDefaultHaarResolution);

struct OrbitSample {
  Point base;
  std::vector<Point> points;
  IsotropyDescriptor isotropy;
  std::size_t resolution = 0;
};

/// Images of p under the Haar nodes, deduplicated at 1e-9.
OrbitSample orbit_sample(const ActionScenario& scn, const Point& p, std::size_t N = kDefaultHaarResolution);

/// Images only, without isotropy detection.
std::vector<Point> orbit_points(const ActionScenario& scn, const Point& p, const HaarQuadrature& quad);

/// Haar average of `base` pulled back through the group differentials.
/// Flat bases stay Flat (the action is orthogonal), constant bases give a
/// constant result; anything else is averaged lazily at evaluation time.
MetricField average_metric(const ActionScenario& scn, const MetricField& base, std::size_t N = kDefaultHaarResolution);

/// (1 + |grad f|^2_metric)^{-1} metric, pointwise.
MetricField completeness_rescale(const MetricField& metric, const ScalarField& f);

/// Largest |f(g x) - f(x)| over the Haar nodes and probe points.
double invariance_defect(const ActionScenario& scn, const ScalarField& f, const std::vector<Point>& probes,
                         std::size_t N = kDefaultHaarResolution);

/// Fundamental vector fields X.p, one per infinitesimal generator.
std::vector<Vec> fundamental_field(const ActionScenario& scn, const Point& p);

struct NormalRepresentation {
  IsotropyDescriptor isotropy;
  /// Ambient columns, orthonormal for the metric at p.
  Mat normal_basis;
  /// Matrices of the isotropy generators (CayleyTable::generators()).
  std::vector<Mat> matrices;
  /// Matrices of every isotropy element in local order. FullCircle: the
  /// rotations by 2 pi j / kCircleCharacterSamples.
  std::vector<Mat> element_matrices;
  /// FullCircle: the generator restricted to the normal space.
  Mat infinitesimal;

  int dimension() const { return static_cast<int>(normal_basis.cols()); }
  /// Trace of every element matrix, in local order.
  std::vector<double> characters() const;
};

inline constexpr std::size_t kCircleCharacterSamples = 12;

NormalRepresentation normal_representation(const ActionScenario& scn, const Point& p, const MetricField& metric,
                                           double tol = kIsotropyTolerance);

/// Max deviation between the metric on N_pO and its pullback from N_{gp}O
/// over probe orbits and Haar nodes.
VerificationReport verify_transversal_invariance(const ActionScenario& scn, const MetricField& metric,
                                                 const std::vector<OrbitSample>& probes, double tol,
                                                 std::size_t N = kDefaultHaarResolution);

struct SrfResult {
  double max_deviation = 0.0;
  /// Discrete orbits: nothing to measure.
  bool vacuous = false;
  bool truncated = false;
  std::size_t samples = 0;
};

/// Traces the geodesic from (p, v) and measures the normalised angle
/// |eta(gamma', X.gamma)| / (|gamma'| |X.gamma|) against every fundamental field.
SrfResult srf_perpendicularity(const ActionScenario& scn, const MetricField& metric, const Point& p, const Vec& v,
                               double T, double h, double tol);

}  // namespace orbitspace

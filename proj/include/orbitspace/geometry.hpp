#pragma once

// Model Riemannian manifolds: metric fields, geodesic distance, exponential
// map and a fourth-order geodesic integrator.

#include "orbitspace/types.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace orbitspace {

/// Affine map x -> linear * x + shift.
///
/// Linear actions have a zero shift. Angle translations on tori have an
/// identity linear part; shifts are always compared modulo 2*pi.
struct GroupElement {
  Mat linear;
  Vec shift;

  static GroupElement identity(int n);
  static GroupElement from_matrix(Mat m);
  static GroupElement translation(Vec s);

  int dimension() const { return static_cast<int>(linear.rows()); }
  Vec apply(const Vec& x) const { return linear * x + shift; }
  /// (*this) o rhs
  GroupElement compose(const GroupElement& rhs) const;
  GroupElement inverse() const;
  bool approx_equal(const GroupElement& other, double tol) const;
  bool has_shift() const;
};

struct WeightedElement {
  GroupElement element;
  double weight = 0.0;
};

/// Smooth scalar function with an optional analytic gradient. Without one,
/// gradients come from central differences with step 1e-6.
struct ScalarField {
  std::string name;
  std::function<double(const Point&)> value;
  std::function<Vec(const Point&)> gradient;

  double operator()(const Point& p) const { return value(p); }
  Vec grad(const Point& p) const;
};

ScalarField constant_field(double c);
/// |x|^2 with analytic gradient 2x.
ScalarField radius_squared_field();
/// exp(|x|^2) with analytic gradient.
ScalarField exp_radius_squared_field();

enum class MetricKind { Flat, ConstantMatrix, Conformal, Averaged, Rescaled };

std::string to_string(MetricKind k);

/// Riemannian metric on the ambient chart, evaluated lazily.
///
/// Copies share the immutable definition. at() validates symmetry (1e-12,
/// relative to the largest entry) and positive definiteness of every value
/// it returns and throws DomainError otherwise.
class MetricField {
 public:
  static MetricField flat(int n);
  static MetricField constant(const Mat& s);
  static MetricField conformal(MetricField base, ScalarField factor);
  /// sum_i w_i L_i^T base(g_i x) L_i. `periodic` wraps images into [0, 2pi).
  static MetricField averaged(MetricField base, std::vector<WeightedElement> nodes, bool periodic);
  /// (1 + |grad f|^2_base)^{-1} base
  static MetricField rescaled(MetricField base, ScalarField f);

  MetricKind kind() const;
  int dimension() const;
  Mat at(const Point& x) const;

  bool is_flat() const { return kind() == MetricKind::Flat; }
  /// Flat or ConstantMatrix.
  bool is_constant() const;
  /// Matrix of a constant field (identity for Flat). Throws otherwise.
  Mat constant_matrix() const;
  std::string describe() const;

 private:
  struct Node;
  explicit MetricField(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  Mat evaluate(const Point& x) const;
  std::shared_ptr<const Node> node_;
};

enum class ManifoldKind { Euclidean, Sphere, Torus, Sampled };

std::string to_string(ManifoldKind k);

/// Symmetric adjacency lists for sampled manifolds.
struct NeighborGraph {
  std::vector<std::vector<std::size_t>> adjacency;
};

/// Symmetrised k-nearest-neighbour graph under the Euclidean chord.
NeighborGraph knn_graph(const std::vector<Point>& points, int k);

class ManifoldModel {
 public:
  static ManifoldModel euclidean(int n, std::optional<MetricField> metric = std::nullopt);
  /// The unit sphere S^n embedded in R^{n+1}. The metric lives on R^{n+1}.
  static ManifoldModel sphere(int n, std::optional<MetricField> metric = std::nullopt);
  /// T^k with angle coordinates in [0, 2pi).
  static ManifoldModel torus(int k, std::optional<MetricField> metric = std::nullopt);
  /// Point cloud with a neighbour graph; the graph must be symmetric and connected.
  static ManifoldModel sampled(std::vector<Point> points, NeighborGraph graph,
                               std::optional<MetricField> metric = std::nullopt);

  ManifoldKind kind() const { return kind_; }
  /// Intrinsic dimension.
  int dimension() const { return dim_; }
  /// Length of the coordinate vectors.
  int ambient_dimension() const { return kind_ == ManifoldKind::Sphere ? dim_ + 1 : dim_; }
  const MetricField& metric() const { return metric_; }
  ManifoldModel with_metric(MetricField metric) const;

  bool contains(const Point& p, double tol = 1e-9) const;
  /// Throws DomainError naming `what` if p is not on the model.
  void require_contains(const Point& p, const char* what) const;
  /// Wraps torus angles and renormalises sphere points.
  Point canonical(const Point& p) const;
  /// Chart difference q - p (minimal representative on the torus).
  Vec difference(const Point& p, const Point& q) const;
  /// Columns form a Euclidean-orthonormal basis of T_p in ambient coordinates.
  Mat tangent_basis(const Point& p) const;
  /// Orthogonal projection of an ambient vector onto T_p.
  Vec project_tangent(const Point& p, const Vec& v) const;

  bool is_round_sphere() const;
  /// Closed-form geodesic distances are available.
  bool has_closed_form_distance() const;
  /// Sphere: pi. Flat torus: pi times the smallest metric scale. Otherwise infinity.
  double injectivity_bound() const;

  const std::vector<Point>& samples() const { return samples_; }
  const NeighborGraph& graph() const { return graph_; }
  /// Index of the sample within tol of p, if any.
  std::optional<std::size_t> find_sample(const Point& p, double tol = 1e-9) const;

 private:
  ManifoldModel(ManifoldKind kind, int dim, MetricField metric) : kind_(kind), dim_(dim), metric_(std::move(metric)) {}

  ManifoldKind kind_;
  int dim_;
  MetricField metric_;
  std::vector<Point> samples_;
  NeighborGraph graph_;
};

/// Metric tensor at p. Sphere models report an n x n matrix in the basis
/// returned by tangent_basis(p).
Mat metric_at(const ManifoldModel& model, const Point& p);

struct DistanceResult {
  double length = 0.0;
  bool graph_based = false;
  /// Zero for closed forms; documented O(h) bias bound for graph results.
  double error_bound = 0.0;
};

DistanceResult geodesic_distance(const ManifoldModel& model, const Point& p, const Point& q);

/// Dijkstra over a neighbour graph with midpoint-metric chord weights
/// (k = 12 nearest neighbours). Sampled models use their own graph; other
/// models get a jittered probe lattice around p and q. Always graph based.
DistanceResult graph_geodesic_distance(const ManifoldModel& model, const Point& p, const Point& q);

struct ExpResult {
  Point point;
  /// |v| exceeded the model's injectivity bound; the point is still valid.
  bool beyond_injectivity = false;
};

ExpResult exp_map(const ManifoldModel& model, const Point& p, const Vec& v);

struct GeodesicSample {
  double t = 0.0;
  Point point;
  Vec velocity;
};

struct GeodesicPath {
  std::vector<GeodesicSample> samples;
  double step = 0.0;
  bool truncated = false;
  std::string error;

  const Point& end() const { return samples.back().point; }
};

/// Christoffel symbols at p: result[k](i, j) = Gamma^k_ij, from central
/// differences (step 1e-5) of the chart metric. Euclidean and torus charts only.
std::vector<Mat> christoffel(const ManifoldModel& model, const Point& p);

/// Classical RK4 on the geodesic equation from (p, v) over [0, T] with step h.
GeodesicPath geodesic_trace(const ManifoldModel& model, const Point& p, const Vec& v, double T, double h);

/// Largest relative deviation of |velocity|_metric from its initial value.
double speed_drift(const ManifoldModel& model, const GeodesicPath& path);
/// Largest |second difference / h^2 + Gamma(v, v)| over interior samples.
double geodesic_residual(const ManifoldModel& model, const GeodesicPath& path);

struct Annulus {
  double r_min = 0.0;
  double r_max = 1.0;
};
struct Box {
  Vec lo;
  Vec hi;
};
/// Polar-angle band on S^2, angles measured from +z.
struct Band {
  double phi_min = 0.0;
  double phi_max = kPi;
};
using Region = std::variant<Annulus, Box, Band>;

/// Deterministic uniform sample of `count` points in the region.
std::vector<Point> sample_points(const ManifoldModel& model, const Region& region, std::size_t count,
                                 std::uint64_t seed);

/// Tensor grid with `per_axis` points per coordinate, endpoints included.
std::vector<Point> grid_points(const Vec& lo, const Vec& hi, int per_axis);

}  // namespace orbitspace

#include "orbitspace/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>

namespace orbitspace {

// ---------------------------------------------------------------------------
// GroupElement

GroupElement GroupElement::identity(int n) { return {Mat::Identity(n, n), Vec::Zero(n)}; }

GroupElement GroupElement::from_matrix(Mat m) {
  const auto n = m.rows();
  return {std::move(m), Vec::Zero(n)};
}

GroupElement GroupElement::translation(Vec s) {
  const auto n = s.size();
  for (Eigen::Index i = 0; i < n; ++i) s(i) = wrap_angle(s(i));
  return {Mat::Identity(n, n), std::move(s)};
}

GroupElement GroupElement::compose(const GroupElement& rhs) const {
  GroupElement out{linear * rhs.linear, linear * rhs.shift + shift};
  if (out.has_shift())
    for (Eigen::Index i = 0; i < out.shift.size(); ++i) out.shift(i) = wrap_angle(out.shift(i));
  return out;
}

GroupElement GroupElement::inverse() const {
  // Elements are orthogonal, so the transpose is the inverse.
  GroupElement out{linear.transpose(), -(linear.transpose() * shift)};
  if (out.has_shift())
    for (Eigen::Index i = 0; i < out.shift.size(); ++i) out.shift(i) = wrap_angle(out.shift(i));
  return out;
}

bool GroupElement::approx_equal(const GroupElement& other, double tol) const {
  if (linear.rows() != other.linear.rows()) return false;
  if ((linear - other.linear).cwiseAbs().maxCoeff() > tol) return false;
  for (Eigen::Index i = 0; i < shift.size(); ++i)
    if (std::abs(angle_delta(shift(i), other.shift(i))) > tol) return false;
  return true;
}

bool GroupElement::has_shift() const { return shift.size() > 0 && shift.cwiseAbs().maxCoeff() > 0.0; }

// ---------------------------------------------------------------------------
// ScalarField

Vec ScalarField::grad(const Point& p) const {
  if (gradient) return gradient(p);
  constexpr double h = 1e-6;
  Vec g(p.size());
  Point x = p;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    x(i) = p(i) + h;
    const double fp = value(x);
    x(i) = p(i) - h;
    const double fm = value(x);
    x(i) = p(i);
    g(i) = (fp - fm) / (2 * h);
  }
  return g;
}

ScalarField constant_field(double c) {
  return {"constant", [c](const Point&) { return c; }, [](const Point& p) { return Vec(Vec::Zero(p.size())); }};
}

ScalarField radius_squared_field() {
  return {"radius_squared", [](const Point& p) { return p.squaredNorm(); }, [](const Point& p) { return Vec(2.0 * p); }};
}

ScalarField exp_radius_squared_field() {
  return {"exp_radius_squared", [](const Point& p) { return std::exp(p.squaredNorm()); },
          [](const Point& p) { return Vec(2.0 * std::exp(p.squaredNorm()) * p); }};
}

// ---------------------------------------------------------------------------
// MetricField

struct MetricField::Node {
  MetricKind kind = MetricKind::Flat;
  int dim = 0;
  Mat matrix;
  std::shared_ptr<const Node> base;
  ScalarField field;
  std::vector<WeightedElement> nodes;
  bool periodic = false;
};

std::string to_string(MetricKind k) {
  switch (k) {
    case MetricKind::Flat: return "flat";
    case MetricKind::ConstantMatrix: return "constant";
    case MetricKind::Conformal: return "conformal";
    case MetricKind::Averaged: return "averaged";
    case MetricKind::Rescaled: return "rescaled";
  }
  return "?";
}

MetricField MetricField::flat(int n) {
  if (n < 1) throw DomainError("flat metric needs dimension >= 1");
  auto node = std::make_shared<Node>();
  node->kind = MetricKind::Flat;
  node->dim = n;
  return MetricField(std::move(node));
}

MetricField MetricField::constant(const Mat& s) {
  if (s.rows() != s.cols() || s.rows() < 1) throw DomainError("constant metric must be square");
  const double scale = std::max(1.0, s.cwiseAbs().maxCoeff());
  if ((s - s.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) throw DomainError("constant metric not symmetric");
  Eigen::LLT<Mat> llt(s);
  if (llt.info() != Eigen::Success) throw DomainError("constant metric not positive definite");
  auto node = std::make_shared<Node>();
  node->kind = MetricKind::ConstantMatrix;
  node->dim = static_cast<int>(s.rows());
  node->matrix = 0.5 * (s + s.transpose());
  return MetricField(std::move(node));
}

MetricField MetricField::conformal(MetricField base, ScalarField factor) {
  auto node = std::make_shared<Node>();
  node->kind = MetricKind::Conformal;
  node->dim = base.dimension();
  node->base = base.node_;
  node->field = std::move(factor);
  return MetricField(std::move(node));
}

MetricField MetricField::averaged(MetricField base, std::vector<WeightedElement> nodes, bool periodic) {
  if (nodes.empty()) throw DomainError("averaging needs at least one quadrature node");
  for (const auto& n : nodes)
    if (n.element.dimension() != base.dimension()) throw DomainError("quadrature element dimension mismatch");
  auto node = std::make_shared<Node>();
  node->kind = MetricKind::Averaged;
  node->dim = base.dimension();
  node->base = base.node_;
  node->nodes = std::move(nodes);
  node->periodic = periodic;
  return MetricField(std::move(node));
}

MetricField MetricField::rescaled(MetricField base, ScalarField f) {
  auto node = std::make_shared<Node>();
  node->kind = MetricKind::Rescaled;
  node->dim = base.dimension();
  node->base = base.node_;
  node->field = std::move(f);
  return MetricField(std::move(node));
}

MetricKind MetricField::kind() const { return node_->kind; }
int MetricField::dimension() const { return node_->dim; }
bool MetricField::is_constant() const { return kind() == MetricKind::Flat || kind() == MetricKind::ConstantMatrix; }

Mat MetricField::constant_matrix() const {
  if (kind() == MetricKind::Flat) return Mat::Identity(dimension(), dimension());
  if (kind() == MetricKind::ConstantMatrix) return node_->matrix;
  throw UnsupportedError("metric field is not constant");
}

std::string MetricField::describe() const {
  std::ostringstream os;
  os << to_string(kind()) << "(" << dimension();
  if (node_->base) os << ", " << MetricField(node_->base).describe();
  if (!node_->field.name.empty()) os << ", " << node_->field.name;
  if (kind() == MetricKind::Averaged) os << ", " << node_->nodes.size() << " nodes";
  os << ")";
  return os.str();
}

Mat MetricField::evaluate(const Point& x) const {
  const Node& n = *node_;
  switch (n.kind) {
    case MetricKind::Flat: return Mat::Identity(n.dim, n.dim);
    case MetricKind::ConstantMatrix: return n.matrix;
    case MetricKind::Conformal: return n.field(x) * MetricField(n.base).at(x);
    case MetricKind::Averaged: {
      const MetricField base(n.base);
      Mat acc = Mat::Zero(n.dim, n.dim);
      for (const auto& node : n.nodes) {
        Point y = node.element.apply(x);
        if (n.periodic)
          for (Eigen::Index i = 0; i < y.size(); ++i) y(i) = wrap_angle(y(i));
        const Mat& l = node.element.linear;
        acc.noalias() += node.weight * (l.transpose() * base.at(y) * l);
      }
      return 0.5 * (acc + acc.transpose());
    }
    case MetricKind::Rescaled: {
      const Mat g = MetricField(n.base).at(x);
      const Vec df = n.field.grad(x);
      const double grad_sq = df.dot(g.llt().solve(df));
      return g / (1.0 + grad_sq);
    }
  }
  throw Error("unreachable metric kind");
}

Mat MetricField::at(const Point& x) const {
  if (x.size() != dimension()) throw DomainError("metric evaluated at a point of the wrong dimension");
  if (!x.allFinite()) throw DomainError("metric evaluated at a non-finite point");
  Mat g = evaluate(x);
  if (!g.allFinite()) throw DomainError("metric value is not finite");
  const double scale = std::max(1.0, g.cwiseAbs().maxCoeff());
  if ((g - g.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) throw DomainError("metric value not symmetric");
  Eigen::LLT<Mat> llt(g);
  if (llt.info() != Eigen::Success) throw DomainError("metric value not positive definite");
  return g;
}

// ---------------------------------------------------------------------------
// Neighbour graphs and Dijkstra

namespace {

using DiffFn = std::function<Vec(const Point&, const Point&)>;

NeighborGraph knn_graph_with(const std::vector<Point>& pts, int k, const DiffFn& diff) {
  const std::size_t n = pts.size();
  NeighborGraph g;
  g.adjacency.assign(n, {});
  const std::size_t kk = std::min<std::size_t>(static_cast<std::size_t>(std::max(k, 1)), n > 0 ? n - 1 : 0);
  std::vector<std::pair<double, std::size_t>> cand;
  for (std::size_t i = 0; i < n; ++i) {
    cand.clear();
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) cand.emplace_back(diff(pts[i], pts[j]).squaredNorm(), j);
    std::partial_sort(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(kk), cand.end());
    for (std::size_t r = 0; r < kk; ++r) {
      g.adjacency[i].push_back(cand[r].second);
      g.adjacency[cand[r].second].push_back(i);
    }
  }
  for (auto& adj : g.adjacency) {
    std::sort(adj.begin(), adj.end());
    adj.erase(std::unique(adj.begin(), adj.end()), adj.end());
  }
  return g;
}

bool graph_connected(const NeighborGraph& g) {
  const std::size_t n = g.adjacency.size();
  if (n == 0) return true;
  std::vector<char> seen(n, 0);
  std::vector<std::size_t> stack{0};
  seen[0] = 1;
  std::size_t count = 1;
  while (!stack.empty()) {
    const auto v = stack.back();
    stack.pop_back();
    for (auto w : g.adjacency[v])
      if (!seen[w]) {
        seen[w] = 1;
        ++count;
        stack.push_back(w);
      }
  }
  return count == n;
}

double chord_length(const ManifoldModel& model, const Point& a, const Point& b) {
  const Vec d = model.difference(a, b);
  const Point mid = model.canonical(a + 0.5 * d);
  const Mat g = model.metric().at(mid);
  return std::sqrt(d.dot(g * d));
}

double dijkstra(const ManifoldModel& model, const std::vector<Point>& pts, const NeighborGraph& g, std::size_t s,
                std::size_t t) {
  const std::size_t n = pts.size();
  std::vector<double> dist(n, std::numeric_limits<double>::infinity());
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  dist[s] = 0.0;
  pq.emplace(0.0, s);
  while (!pq.empty()) {
    auto [d, v] = pq.top();
    pq.pop();
    if (d > dist[v]) continue;
    if (v == t) return d;
    for (auto w : g.adjacency[v]) {
      const double nd = d + chord_length(model, pts[v], pts[w]);
      if (nd < dist[w]) {
        dist[w] = nd;
        pq.emplace(nd, w);
      }
    }
  }
  throw UnreachableError("no path between the two points in the neighbour graph");
}

std::vector<Point> fibonacci_sphere(std::size_t count) {
  std::vector<Point> pts;
  pts.reserve(count);
  const double golden = kPi * (3.0 - std::sqrt(5.0));
  for (std::size_t i = 0; i < count; ++i) {
    const double z = 1.0 - (2.0 * static_cast<double>(i) + 1.0) / static_cast<double>(count);
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden * static_cast<double>(i);
    Point p(3);
    p << r * std::cos(phi), r * std::sin(phi), z;
    pts.push_back(p);
  }
  return pts;
}

}  // namespace

NeighborGraph knn_graph(const std::vector<Point>& points, int k) {
  return knn_graph_with(points, k, [](const Point& a, const Point& b) { return Vec(b - a); });
}

// ---------------------------------------------------------------------------
// ManifoldModel

std::string to_string(ManifoldKind k) {
  switch (k) {
    case ManifoldKind::Euclidean: return "euclidean";
    case ManifoldKind::Sphere: return "sphere";
    case ManifoldKind::Torus: return "torus";
    case ManifoldKind::Sampled: return "sampled";
  }
  return "?";
}

ManifoldModel ManifoldModel::euclidean(int n, std::optional<MetricField> metric) {
  if (n < 1) throw DomainError("euclidean model needs n >= 1");
  MetricField m = metric ? *metric : MetricField::flat(n);
  if (m.dimension() != n) throw DomainError("metric dimension does not match the model");
  return ManifoldModel(ManifoldKind::Euclidean, n, std::move(m));
}

ManifoldModel ManifoldModel::sphere(int n, std::optional<MetricField> metric) {
  if (n < 1) throw DomainError("sphere model needs n >= 1");
  MetricField m = metric ? *metric : MetricField::flat(n + 1);
  if (m.dimension() != n + 1) throw DomainError("sphere metric must live on the ambient space");
  return ManifoldModel(ManifoldKind::Sphere, n, std::move(m));
}

ManifoldModel ManifoldModel::torus(int k, std::optional<MetricField> metric) {
  if (k < 1) throw DomainError("torus model needs k >= 1");
  MetricField m = metric ? *metric : MetricField::flat(k);
  if (m.dimension() != k) throw DomainError("metric dimension does not match the model");
  return ManifoldModel(ManifoldKind::Torus, k, std::move(m));
}

ManifoldModel ManifoldModel::sampled(std::vector<Point> points, NeighborGraph graph, std::optional<MetricField> metric) {
  if (points.empty()) throw DomainError("sampled model needs points");
  const int n = static_cast<int>(points.front().size());
  for (const auto& p : points)
    if (p.size() != n || !p.allFinite()) throw ValidationError("sampled model points must be finite and equal length");
  if (graph.adjacency.size() != points.size()) throw ValidationError("neighbour graph size does not match points");
  for (std::size_t i = 0; i < graph.adjacency.size(); ++i)
    for (auto j : graph.adjacency[i]) {
      if (j >= points.size()) throw ValidationError("neighbour index out of range");
      const auto& back = graph.adjacency[j];
      if (std::find(back.begin(), back.end(), i) == back.end())
        throw ValidationError("neighbour graph is not symmetric");
    }
  if (!graph_connected(graph)) throw ValidationError("neighbour graph is not connected");
  MetricField m = metric ? *metric : MetricField::flat(n);
  ManifoldModel model(ManifoldKind::Sampled, n, std::move(m));
  model.samples_ = std::move(points);
  model.graph_ = std::move(graph);
  return model;
}

ManifoldModel ManifoldModel::with_metric(MetricField metric) const {
  if (metric.dimension() != ambient_dimension()) throw DomainError("metric dimension does not match the model");
  ManifoldModel copy = *this;
  copy.metric_ = std::move(metric);
  return copy;
}

bool ManifoldModel::contains(const Point& p, double tol) const {
  if (p.size() != ambient_dimension() || !p.allFinite()) return false;
  switch (kind_) {
    case ManifoldKind::Euclidean: return true;
    case ManifoldKind::Sphere: return std::abs(p.norm() - 1.0) <= tol;
    case ManifoldKind::Torus:
      for (Eigen::Index i = 0; i < p.size(); ++i)
        if (p(i) < -tol || p(i) >= kTwoPi + tol) return false;
      return true;
    case ManifoldKind::Sampled: return find_sample(p, tol).has_value();
  }
  return false;
}

void ManifoldModel::require_contains(const Point& p, const char* what) const {
  if (!contains(p)) throw DomainError(std::string(what) + ": point is not on the " + to_string(kind_) + " model");
}

Point ManifoldModel::canonical(const Point& p) const {
  Point q = p;
  if (kind_ == ManifoldKind::Torus)
    for (Eigen::Index i = 0; i < q.size(); ++i) q(i) = wrap_angle(q(i));
  else if (kind_ == ManifoldKind::Sphere)
    q /= q.norm();
  return q;
}

Vec ManifoldModel::difference(const Point& p, const Point& q) const {
  if (kind_ != ManifoldKind::Torus) return q - p;
  Vec d(p.size());
  for (Eigen::Index i = 0; i < p.size(); ++i) d(i) = angle_delta(q(i), p(i));
  return d;
}

Mat ManifoldModel::tangent_basis(const Point& p) const {
  if (kind_ != ManifoldKind::Sphere) return Mat::Identity(dim_, dim_);
  const Eigen::Index m = p.size();
  Eigen::HouseholderQR<Mat> qr(Mat(p.normalized()));
  const Mat q = qr.householderQ() * Mat::Identity(m, m);
  return q.rightCols(m - 1);
}

Vec ManifoldModel::project_tangent(const Point& p, const Vec& v) const {
  if (kind_ != ManifoldKind::Sphere) return v;
  const Vec u = p.normalized();
  return v - u.dot(v) * u;
}

bool ManifoldModel::is_round_sphere() const { return kind_ == ManifoldKind::Sphere && metric_.is_flat(); }

bool ManifoldModel::has_closed_form_distance() const {
  switch (kind_) {
    case ManifoldKind::Euclidean:
    case ManifoldKind::Torus: return metric_.is_constant();
    case ManifoldKind::Sphere: return metric_.is_flat();
    case ManifoldKind::Sampled: return false;
  }
  return false;
}

double ManifoldModel::injectivity_bound() const {
  switch (kind_) {
    case ManifoldKind::Sphere: return kPi;
    case ManifoldKind::Torus:
      if (metric_.is_constant()) {
        Eigen::SelfAdjointEigenSolver<Mat> es(metric_.constant_matrix());
        return kPi * std::sqrt(es.eigenvalues().minCoeff());
      }
      return kPi;
    default: return std::numeric_limits<double>::infinity();
  }
}

std::optional<std::size_t> ManifoldModel::find_sample(const Point& p, double tol) const {
  for (std::size_t i = 0; i < samples_.size(); ++i)
    if (samples_[i].size() == p.size() && (samples_[i] - p).norm() <= tol) return i;
  return std::nullopt;
}

Mat metric_at(const ManifoldModel& model, const Point& p) {
  model.require_contains(p, "metric_at");
  const Mat g = model.metric().at(model.canonical(p));
  if (model.kind() != ManifoldKind::Sphere) return g;
  const Mat t = model.tangent_basis(p);
  Mat r = t.transpose() * g * t;
  return 0.5 * (r + r.transpose());
}

// ---------------------------------------------------------------------------
// Distances

DistanceResult graph_geodesic_distance(const ManifoldModel& model, const Point& p, const Point& q) {
  model.require_contains(p, "geodesic_distance");
  model.require_contains(q, "geodesic_distance");

  if (model.kind() == ManifoldKind::Sampled) {
    const auto& pts = model.samples();
    const auto s = *model.find_sample(p);
    const auto t = *model.find_sample(q);
    double pitch = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i)
      for (auto j : model.graph().adjacency[i]) pitch = std::max(pitch, chord_length(model, pts[i], pts[j]));
    const double len = dijkstra(model, pts, model.graph(), s, t);
    return {len, true, 2.0 * pitch + 0.1 * len};
  }

  // Probe lattice around p and q.
  std::vector<Point> pts;
  double pitch = 0.0;
  Rng rng(0x9e3779b97f4a7c15ULL);
  const int n = model.ambient_dimension();
  if (model.kind() == ManifoldKind::Sphere) {
    if (model.dimension() != 2) throw UnsupportedError("graph distances on spheres are implemented for S^2 only");
    constexpr std::size_t count = 2000;
    pts = fibonacci_sphere(count);
    pitch = std::sqrt(4.0 * kPi / static_cast<double>(count));
  } else {
    if (n > 3) throw UnsupportedError("graph distances are implemented up to dimension 3");
    const int per_axis = n == 1 ? 400 : (n == 2 ? 48 : 16);
    Vec lo(n), hi(n);
    if (model.kind() == ManifoldKind::Torus) {
      lo.setZero();
      hi.setConstant(kTwoPi);
    } else {
      const Vec d = q - p;
      const double margin = std::max(0.5 * d.norm(), 0.25);
      lo = p.cwiseMin(q).array() - margin;
      hi = p.cwiseMax(q).array() + margin;
    }
    const Vec step = (hi - lo) / per_axis;
    pitch = step.maxCoeff();
    std::vector<int> idx(n, 0);
    while (true) {
      Point x(n);
      for (int i = 0; i < n; ++i) x(i) = lo(i) + step(i) * (idx[i] + 0.5 + 0.5 * rng.uniform(-0.5, 0.5));
      pts.push_back(model.canonical(x));
      int a = 0;
      while (a < n && ++idx[a] == per_axis) idx[a++] = 0;
      if (a == n) break;
    }
  }
  const std::size_t s = pts.size();
  pts.push_back(p);
  pts.push_back(q);
  const int k = n == 1 ? 4 : 12;
  const auto graph =
      knn_graph_with(pts, k, [&model](const Point& a, const Point& b) { return model.difference(a, b); });
  const double len = dijkstra(model, pts, graph, s, s + 1);
  const double scale = std::sqrt(model.metric().at(model.canonical(p)).eigenvalues().real().maxCoeff());
  return {len, true, 2.0 * pitch * scale + 0.1 * len};
}

DistanceResult geodesic_distance(const ManifoldModel& model, const Point& p, const Point& q) {
  if (!model.has_closed_form_distance()) return graph_geodesic_distance(model, p, q);
  model.require_contains(p, "geodesic_distance");
  model.require_contains(q, "geodesic_distance");
  switch (model.kind()) {
    case ManifoldKind::Euclidean: {
      const Vec d = q - p;
      if (model.metric().is_flat()) return {d.norm()};
      return {std::sqrt(d.dot(model.metric().constant_matrix() * d))};
    }
    case ManifoldKind::Sphere: {
      const Vec u = p.normalized();
      const Vec w = q.normalized();
      const double c = u.dot(w);
      return {std::atan2((w - c * u).norm(), c)};
    }
    case ManifoldKind::Torus: {
      const Vec d = model.difference(p, q);
      if (model.metric().is_flat()) return {d.norm()};
      // Shortest lattice representative among the 3^k neighbouring images.
      const Mat s = model.metric().constant_matrix();
      const auto k = d.size();
      double best = std::numeric_limits<double>::infinity();
      std::vector<int> off(static_cast<std::size_t>(k), -1);
      while (true) {
        Vec e = d;
        for (Eigen::Index i = 0; i < k; ++i) e(i) += kTwoPi * off[static_cast<std::size_t>(i)];
        best = std::min(best, e.dot(s * e));
        Eigen::Index a = 0;
        while (a < k && ++off[static_cast<std::size_t>(a)] == 2) off[static_cast<std::size_t>(a++)] = -1;
        if (a == k) break;
      }
      return {std::sqrt(best)};
    }
    case ManifoldKind::Sampled: break;
  }
  return graph_geodesic_distance(model, p, q);
}

// ---------------------------------------------------------------------------
// Geodesics

std::vector<Mat> christoffel(const ManifoldModel& model, const Point& p) {
  if (model.kind() != ManifoldKind::Euclidean && model.kind() != ManifoldKind::Torus)
    throw UnsupportedError("christoffel symbols are computed in euclidean and torus charts only");
  const int n = model.dimension();
  std::vector<Mat> gamma(static_cast<std::size_t>(n), Mat::Zero(n, n));
  if (model.metric().is_constant()) return gamma;

  constexpr double h = 1e-5;
  const MetricField& metric = model.metric();
  const Mat g = metric.at(model.canonical(p));
  const Mat ginv = g.inverse();
  std::vector<Mat> dg(static_cast<std::size_t>(n));
  Point x = p;
  for (int l = 0; l < n; ++l) {
    x(l) = p(l) + h;
    const Mat gp = metric.at(model.canonical(x));
    x(l) = p(l) - h;
    const Mat gm = metric.at(model.canonical(x));
    x(l) = p(l);
    dg[static_cast<std::size_t>(l)] = (gp - gm) / (2 * h);
  }
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (int m = 0; m < n; ++m)
          s += ginv(k, m) * (dg[static_cast<std::size_t>(i)](j, m) + dg[static_cast<std::size_t>(j)](i, m) -
                             dg[static_cast<std::size_t>(m)](i, j));
        gamma[static_cast<std::size_t>(k)](i, j) = 0.5 * s;
      }
  return gamma;
}

namespace {

Vec geodesic_acceleration(const ManifoldModel& model, const Point& x, const Vec& v) {
  if (model.kind() == ManifoldKind::Sphere) return -v.squaredNorm() * x;
  const auto gamma = christoffel(model, x);
  Vec a(v.size());
  for (Eigen::Index k = 0; k < v.size(); ++k) a(k) = -v.dot(gamma[static_cast<std::size_t>(k)] * v);
  return a;
}

}  // namespace

GeodesicPath geodesic_trace(const ManifoldModel& model, const Point& p, const Vec& v, double T, double h) {
  model.require_contains(p, "geodesic_trace");
  if (!(h > 0)) throw DomainError("geodesic_trace: step must be positive");
  if (!(T >= 0)) throw DomainError("geodesic_trace: T must be nonnegative");
  if (v.size() != model.ambient_dimension()) throw DomainError("geodesic_trace: velocity has the wrong dimension");
  if (v.norm() == 0.0) throw DomainError("geodesic_trace: zero initial velocity");
  if (model.kind() == ManifoldKind::Sampled) throw UnsupportedError("geodesic_trace is not defined on sampled models");
  if (model.kind() == ManifoldKind::Sphere) {
    if (!model.is_round_sphere()) throw UnsupportedError("geodesic_trace on spheres needs the round metric");
    if (std::abs(p.normalized().dot(v)) > 1e-9 * std::max(1.0, v.norm()))
      throw DomainError("geodesic_trace: velocity is not tangent to the sphere");
  }

  const auto steps = static_cast<std::size_t>(std::max(1.0, std::ceil(T / h - 1e-9)));
  const double dt = T / static_cast<double>(steps);

  GeodesicPath path;
  path.step = dt;
  path.samples.reserve(steps + 1);
  Point x = p;
  Vec u = v;
  path.samples.push_back({0.0, model.canonical(x), u});
  try {
    for (std::size_t s = 0; s < steps; ++s) {
      const Vec k1x = u;
      const Vec k1v = geodesic_acceleration(model, x, u);
      const Vec k2x = u + 0.5 * dt * k1v;
      const Vec k2v = geodesic_acceleration(model, x + 0.5 * dt * k1x, k2x);
      const Vec k3x = u + 0.5 * dt * k2v;
      const Vec k3v = geodesic_acceleration(model, x + 0.5 * dt * k2x, k3x);
      const Vec k4x = u + dt * k3v;
      const Vec k4v = geodesic_acceleration(model, x + dt * k3x, k4x);
      x += dt / 6.0 * (k1x + 2 * k2x + 2 * k3x + k4x);
      u += dt / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v);
      if (!x.allFinite() || !u.allFinite()) throw DomainError("non-finite state");
      path.samples.push_back({dt * static_cast<double>(s + 1), model.canonical(x), u});
    }
  } catch (const DomainError& e) {
    path.truncated = true;
    path.error = e.what();
  }
  return path;
}

double speed_drift(const ManifoldModel& model, const GeodesicPath& path) {
  auto speed = [&](const GeodesicSample& s) {
    const Mat g = model.metric().at(model.canonical(s.point));
    return std::sqrt(s.velocity.dot(g * s.velocity));
  };
  const double s0 = speed(path.samples.front());
  double worst = 0.0;
  for (const auto& s : path.samples) worst = std::max(worst, std::abs(speed(s) / s0 - 1.0));
  return worst;
}

double geodesic_residual(const ManifoldModel& model, const GeodesicPath& path) {
  const double h = path.step;
  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < path.samples.size(); ++i) {
    const auto& prev = path.samples[i - 1];
    const auto& cur = path.samples[i];
    const auto& next = path.samples[i + 1];
    const Vec second = (model.difference(cur.point, next.point) - model.difference(prev.point, cur.point)) / (h * h);
    const Vec res = second - geodesic_acceleration(model, cur.point, cur.velocity);
    worst = std::max(worst, res.cwiseAbs().maxCoeff());
  }
  return worst;
}

ExpResult exp_map(const ManifoldModel& model, const Point& p, const Vec& v) {
  model.require_contains(p, "exp_map");
  if (v.size() != model.ambient_dimension()) throw DomainError("exp_map: tangent vector has the wrong dimension");
  if (v.norm() == 0.0) return {p, false};

  const double speed = std::sqrt(v.dot(model.metric().at(model.canonical(p)) * v));
  const bool beyond = speed > model.injectivity_bound();
  switch (model.kind()) {
    case ManifoldKind::Euclidean:
      if (model.metric().is_constant()) return {p + v, beyond};
      break;
    case ManifoldKind::Torus:
      if (model.metric().is_constant()) return {model.canonical(p + v), beyond};
      break;
    case ManifoldKind::Sphere:
      if (model.is_round_sphere()) {
        if (std::abs(p.dot(v)) > 1e-9 * std::max(1.0, v.norm()))
          throw DomainError("exp_map: vector is not tangent to the sphere");
        const double len = v.norm();
        return {model.canonical(std::cos(len) * p + std::sin(len) * (v / len)), beyond};
      }
      break;
    case ManifoldKind::Sampled: throw UnsupportedError("exp_map is not defined on sampled models");
  }
  const auto path = geodesic_trace(model, p, v, 1.0, 1e-3);
  if (path.truncated) throw DomainError("exp_map: geodesic integration failed: " + path.error);
  return {path.end(), beyond};
}

// ---------------------------------------------------------------------------
// Sampling

std::vector<Point> sample_points(const ManifoldModel& model, const Region& region, std::size_t count,
                                 std::uint64_t seed) {
  if (count < 1) throw DomainError("sample_points: count must be >= 1");
  Rng rng(seed);
  std::vector<Point> out;
  out.reserve(count);

  if (const auto* ann = std::get_if<Annulus>(&region)) {
    if (model.kind() != ManifoldKind::Euclidean) throw UnsupportedError("annulus regions need a euclidean model");
    if (!(ann->r_min >= 0.0) || !(ann->r_max >= ann->r_min) || !(ann->r_max > 0.0))
      throw DomainError("sample_points: empty annulus");
    const int n = model.dimension();
    const double a = std::pow(ann->r_min, n), b = std::pow(ann->r_max, n);
    for (std::size_t i = 0; i < count; ++i) {
      Vec dir(n);
      do {
        for (int j = 0; j < n; ++j) dir(j) = rng.normal();
      } while (dir.norm() < 1e-12);
      const double r = std::clamp(std::pow(rng.uniform(a, b), 1.0 / n), ann->r_min, ann->r_max);
      out.push_back(r * dir.normalized());
    }
    return out;
  }
  if (const auto* box = std::get_if<Box>(&region)) {
    if (model.kind() != ManifoldKind::Euclidean && model.kind() != ManifoldKind::Torus)
      throw UnsupportedError("box regions need a euclidean or torus model");
    const int n = model.dimension();
    if (box->lo.size() != n || box->hi.size() != n) throw DomainError("sample_points: box has the wrong dimension");
    for (int j = 0; j < n; ++j) {
      if (!(box->hi(j) >= box->lo(j))) throw DomainError("sample_points: empty box");
      if (model.kind() == ManifoldKind::Torus && (box->lo(j) < 0.0 || box->hi(j) > kTwoPi))
        throw DomainError("sample_points: torus box must lie in [0, 2pi]");
    }
    for (std::size_t i = 0; i < count; ++i) {
      Point x(n);
      for (int j = 0; j < n; ++j) x(j) = rng.uniform(box->lo(j), box->hi(j));
      out.push_back(model.canonical(x));
    }
    return out;
  }
  const auto& band = std::get<Band>(region);
  if (model.kind() != ManifoldKind::Sphere || model.dimension() != 2)
    throw UnsupportedError("band regions need the 2-sphere");
  if (!(band.phi_min >= 0.0) || !(band.phi_max <= kPi) || !(band.phi_max >= band.phi_min))
    throw DomainError("sample_points: empty band");
  const double z_hi = std::cos(band.phi_min), z_lo = std::cos(band.phi_max);
  for (std::size_t i = 0; i < count; ++i) {
    const double z = rng.uniform(z_lo, z_hi);
    const double az = rng.uniform(0.0, kTwoPi);
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    Point x(3);
    x << r * std::cos(az), r * std::sin(az), z;
    out.push_back(x);
  }
  return out;
}

std::vector<Point> grid_points(const Vec& lo, const Vec& hi, int per_axis) {
  if (per_axis < 1 || lo.size() != hi.size() || lo.size() == 0) throw DomainError("grid_points: bad arguments");
  const auto n = lo.size();
  std::vector<Point> out;
  std::vector<int> idx(static_cast<std::size_t>(n), 0);
  while (true) {
    Point x(n);
    for (Eigen::Index i = 0; i < n; ++i)
      x(i) = per_axis == 1 ? 0.5 * (lo(i) + hi(i))
                           : lo(i) + (hi(i) - lo(i)) * idx[static_cast<std::size_t>(i)] / (per_axis - 1.0);
    out.push_back(x);
    Eigen::Index a = 0;
    while (a < n && ++idx[static_cast<std::size_t>(a)] == per_axis) idx[static_cast<std::size_t>(a++)] = 0;
    if (a == n) break;
  }
  return out;
}

}  // namespace orbitspace

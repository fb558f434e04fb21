#include "orbitspace/group.hpp"

#include "orbitspace/kernels.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace orbitspace {

// ---------------------------------------------------------------------------
// CayleyTable

std::size_t CayleyTable::element_order(std::size_t a) const {
  std::size_t x = a, k = 1;
  while (x != 0) {
    x = product[x][a];
    ++k;
  }
  return k;
}

bool CayleyTable::is_abelian() const {
  for (std::size_t a = 0; a < order(); ++a)
    for (std::size_t b = a + 1; b < order(); ++b)
      if (product[a][b] != product[b][a]) return false;
  return true;
}

CayleyTable CayleyTable::cyclic(std::size_t k) {
  CayleyTable t;
  t.product.assign(k, std::vector<std::size_t>(k));
  t.inverse.resize(k);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) t.product[i][j] = (i + j) % k;
    t.inverse[i] = (k - i) % k;
  }
  return t;
}

CayleyTable CayleyTable::restrict_to(const std::vector<std::size_t>& members) const {
  if (members.empty() || members.front() != 0) throw Error("subgroup members must start with the identity");
  std::vector<std::size_t> local(order(), order());
  for (std::size_t i = 0; i < members.size(); ++i) local[members[i]] = i;
  CayleyTable t;
  const std::size_t m = members.size();
  t.product.assign(m, std::vector<std::size_t>(m));
  t.inverse.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const std::size_t l = local[product[members[i]][members[j]]];
      if (l == order()) throw Error("subgroup is not closed under multiplication");
      t.product[i][j] = l;
    }
    const std::size_t inv = local[inverse[members[i]]];
    if (inv == order()) throw Error("subgroup is not closed under inversion");
    t.inverse[i] = inv;
  }
  return t;
}

std::vector<std::size_t> CayleyTable::generators() const {
  std::vector<std::size_t> gens;
  std::vector<char> in(order(), 0);
  in[0] = 1;
  for (std::size_t a = 1; a < order(); ++a) {
    if (in[a]) continue;
    gens.push_back(a);
    std::vector<std::size_t> frontier;
    for (std::size_t x = 0; x < order(); ++x)
      if (in[x]) frontier.push_back(x);
    while (!frontier.empty()) {
      const auto x = frontier.back();
      frontier.pop_back();
      for (auto g : gens) {
        const auto y = product[x][g];
        if (!in[y]) {
          in[y] = 1;
          frontier.push_back(y);
        }
      }
    }
  }
  return gens;
}

// ---------------------------------------------------------------------------
// GroupModel

namespace {

GroupElement block_diag(const std::vector<GroupElement>& parts) {
  int n = 0;
  for (const auto& p : parts) n += p.dimension();
  GroupElement out{Mat::Zero(n, n), Vec::Zero(n)};
  int off = 0;
  for (const auto& p : parts) {
    const int d = p.dimension();
    out.linear.block(off, off, d, d) = p.linear;
    out.shift.segment(off, d) = p.shift;
    off += d;
  }
  return out;
}

Mat plane_rotation(double angle) {
  Mat r(2, 2);
  r << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
  return r;
}

}  // namespace

GroupModel GroupModel::finite(std::vector<GroupElement> elements) {
  if (elements.empty()) throw ValidationError("finite group: no elements");
  const int n = elements.front().dimension();
  for (std::size_t i = 0; i < elements.size(); ++i) {
    const auto& e = elements[i];
    if (e.dimension() != n || e.linear.cols() != n || e.shift.size() != n)
      throw ValidationError("finite group: element " + std::to_string(i) + " has the wrong dimension");
    if ((e.linear.transpose() * e.linear - Mat::Identity(n, n)).cwiseAbs().maxCoeff() > 1e-12)
      throw ValidationError("finite group: element " + std::to_string(i) + " is not orthogonal");
  }
  const auto id = GroupElement::identity(n);
  auto it = std::find_if(elements.begin(), elements.end(), [&](const GroupElement& e) { return e.approx_equal(id, 1e-12); });
  if (it == elements.end()) throw ValidationError("finite group: the identity is missing");
  std::rotate(elements.begin(), it, it + 1);
  for (std::size_t i = 0; i < elements.size(); ++i)
    for (std::size_t j = i + 1; j < elements.size(); ++j)
      if (elements[i].approx_equal(elements[j], 1e-10))
        throw ValidationError("finite group: elements " + std::to_string(i) + " and " + std::to_string(j) +
                              " coincide");

  const std::size_t m = elements.size();
  CayleyTable table;
  table.product.assign(m, std::vector<std::size_t>(m));
  table.inverse.assign(m, m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      const GroupElement prod = elements[i].compose(elements[j]);
      std::size_t k = 0;
      while (k < m && !elements[k].approx_equal(prod, 1e-10)) ++k;
      if (k == m)
        throw ValidationError("finite group: closure fails, element " + std::to_string(i) + " * element " +
                              std::to_string(j) + " is not in the set");
      table.product[i][j] = k;
      if (k == 0) table.inverse[i] = j;
    }
  FiniteGroup g{std::move(elements), std::move(table)};
  GroupModel model(g, n);
  model.flat_ = std::move(g);
  return model;
}

GroupModel GroupModel::finite_from_matrices(const std::vector<Mat>& matrices) {
  std::vector<GroupElement> els;
  els.reserve(matrices.size());
  for (const auto& m : matrices) {
    if (m.rows() != m.cols()) throw ValidationError("finite group: matrices must be square");
    els.push_back(GroupElement::from_matrix(m));
  }
  return finite(std::move(els));
}

GroupModel GroupModel::generated_by(const std::vector<GroupElement>& generators, std::size_t max_order) {
  if (generators.empty()) throw ValidationError("generated group: no generators");
  const int n = generators.front().dimension();
  std::vector<GroupElement> els{GroupElement::identity(n)};
  for (std::size_t head = 0; head < els.size(); ++head)
    for (const auto& g : generators) {
      if (g.dimension() != n) throw ValidationError("generated group: generator dimension mismatch");
      GroupElement c = g.compose(els[head]);
      if (std::none_of(els.begin(), els.end(), [&](const GroupElement& e) { return e.approx_equal(c, 1e-9); })) {
        els.push_back(std::move(c));
        if (els.size() > max_order) throw ValidationError("generated group exceeds the order cap");
      }
    }
  return finite(std::move(els));
}

GroupModel GroupModel::circle(const Mat& generator) {
  const auto n = generator.rows();
  if (n < 1 || generator.cols() != n) throw ValidationError("circle group: generator must be square");
  if ((generator + generator.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    throw ValidationError("circle group: generator is not skew-symmetric");
  if (generator.cwiseAbs().maxCoeff() == 0.0) throw ValidationError("circle group: generator is zero");
  const Mat full = (kTwoPi * generator).exp();
  if ((full - Mat::Identity(n, n)).cwiseAbs().maxCoeff() > 1e-9)
    throw ValidationError("circle group: exp(2 pi A) is not the identity");
  return GroupModel(CircleGroup{generator}, static_cast<int>(n));
}

GroupModel GroupModel::circle_translation(const Vec& direction) {
  if (direction.size() < 1) throw ValidationError("circle translation: empty direction");
  for (Eigen::Index i = 0; i < direction.size(); ++i)
    if (std::abs(direction(i) - std::round(direction(i))) > 1e-12)
      throw ValidationError("circle translation: direction must have integer entries");
  if (direction.cwiseAbs().maxCoeff() == 0.0) throw ValidationError("circle translation: zero direction");
  return GroupModel(CircleTranslation{direction.array().round().matrix()}, static_cast<int>(direction.size()));
}

GroupModel GroupModel::product(std::vector<GroupModel> factors) {
  if (factors.empty()) throw ValidationError("product group: no factors");
  int n = 0;
  bool all_finite = true;
  for (const auto& f : factors) {
    n += f.dimension();
    all_finite = all_finite && f.is_finite();
  }
  std::optional<FiniteGroup> flat;
  if (all_finite) {
    // Mixed-radix enumeration; the first factor varies fastest.
    std::vector<std::size_t> radix;
    std::size_t total = 1;
    for (const auto& f : factors) {
      radix.push_back(f.finite_group().elements.size());
      total *= radix.back();
    }
    auto digits = [&](std::size_t idx) {
      std::vector<std::size_t> d(radix.size());
      for (std::size_t i = 0; i < radix.size(); ++i) {
        d[i] = idx % radix[i];
        idx /= radix[i];
      }
      return d;
    };
    auto compose_index = [&](const std::vector<std::size_t>& d) {
      std::size_t idx = 0, mul = 1;
      for (std::size_t i = 0; i < radix.size(); ++i) {
        idx += d[i] * mul;
        mul *= radix[i];
      }
      return idx;
    };
    FiniteGroup g;
    g.table.product.assign(total, std::vector<std::size_t>(total));
    g.table.inverse.resize(total);
    for (std::size_t a = 0; a < total; ++a) {
      const auto da = digits(a);
      std::vector<GroupElement> parts;
      std::vector<std::size_t> inv(radix.size());
      for (std::size_t i = 0; i < radix.size(); ++i) {
        const auto& fg = factors[i].finite_group();
        parts.push_back(fg.elements[da[i]]);
        inv[i] = fg.table.inverse[da[i]];
      }
      g.elements.push_back(block_diag(parts));
      g.table.inverse[a] = compose_index(inv);
      for (std::size_t b = 0; b < total; ++b) {
        const auto db = digits(b);
        std::vector<std::size_t> dc(radix.size());
        for (std::size_t i = 0; i < radix.size(); ++i) dc[i] = factors[i].finite_group().table.product[da[i]][db[i]];
        g.table.product[a][b] = compose_index(dc);
      }
    }
    flat = std::move(g);
  }
  GroupModel model(ProductGroup{std::move(factors)}, n);
  model.flat_ = std::move(flat);
  return model;
}

GroupModel GroupModel::trivial(int n) { return finite({GroupElement::identity(n)}); }

GroupModel GroupModel::cyclic_rotations(int n) {
  if (n < 1) throw ValidationError("cyclic group order must be >= 1");
  std::vector<Mat> mats;
  for (int k = 0; k < n; ++k) {
    Mat r = plane_rotation(kTwoPi * k / n);
    // Snap exact zeros and unit entries so Z_2 and Z_4 tables are exact.
    for (Eigen::Index i = 0; i < r.size(); ++i)
      if (std::abs(r(i)) < 1e-15) r(i) = 0.0;
    mats.push_back(r);
  }
  return finite_from_matrices(mats);
}

GroupModel GroupModel::dihedral(int n) {
  if (n < 1) throw ValidationError("dihedral group order must be >= 1");
  std::vector<Mat> mats;
  Mat s(2, 2);
  s << 1, 0, 0, -1;
  for (int k = 0; k < n; ++k) {
    Mat r = plane_rotation(kTwoPi * k / n);
    for (Eigen::Index i = 0; i < r.size(); ++i)
      if (std::abs(r(i)) < 1e-15) r(i) = 0.0;
    mats.push_back(r);
  }
  for (int k = 0; k < n; ++k) mats.push_back(mats[static_cast<std::size_t>(k)] * s);
  return finite_from_matrices(mats);
}

GroupModel GroupModel::reflection() {
  Mat s(2, 2);
  s << 1, 0, 0, -1;
  return finite_from_matrices({Mat::Identity(2, 2), s});
}

GroupModel GroupModel::antipodal(int n) { return finite_from_matrices({Mat::Identity(n, n), -Mat::Identity(n, n)}); }

GroupModel GroupModel::half_turn_translation() {
  return finite({GroupElement::identity(1), GroupElement::translation(Vec::Constant(1, kPi))});
}

GroupModel GroupModel::plane_rotation_circle() {
  Mat a(2, 2);
  a << 0, -1, 1, 0;
  return circle(a);
}

GroupModel GroupModel::z_axis_circle() {
  Mat a = Mat::Zero(3, 3);
  a(0, 1) = -1;
  a(1, 0) = 1;
  return circle(a);
}

const FiniteGroup& GroupModel::finite_group() const {
  if (!flat_) throw UnsupportedError("group is not finite");
  return *flat_;
}

std::vector<GroupElement> GroupModel::lie_algebra() const {
  if (const auto* c = std::get_if<CircleGroup>(&v_)) return {GroupElement{c->generator, Vec::Zero(dim_)}};
  if (const auto* t = std::get_if<CircleTranslation>(&v_)) return {GroupElement{Mat::Zero(dim_, dim_), t->direction}};
  std::vector<GroupElement> out;
  if (const auto* p = std::get_if<ProductGroup>(&v_)) {
    int off = 0;
    for (const auto& f : p->factors) {
      for (const auto& x : f.lie_algebra()) {
        GroupElement e{Mat::Zero(dim_, dim_), Vec::Zero(dim_)};
        e.linear.block(off, off, f.dimension(), f.dimension()) = x.linear;
        e.shift.segment(off, f.dimension()) = x.shift;
        out.push_back(std::move(e));
      }
      off += f.dimension();
    }
  }
  return out;
}

std::string GroupModel::describe() const {
  std::ostringstream os;
  if (std::holds_alternative<FiniteGroup>(v_))
    os << "finite(order " << flat_->elements.size() << ", dim " << dim_ << ")";
  else if (std::holds_alternative<CircleGroup>(v_))
    os << "circle(dim " << dim_ << ")";
  else if (std::holds_alternative<CircleTranslation>(v_))
    os << "circle_translation(dim " << dim_ << ")";
  else {
    os << "product(";
    const auto& p = std::get<ProductGroup>(v_);
    for (std::size_t i = 0; i < p.factors.size(); ++i) os << (i ? ", " : "") << p.factors[i].describe();
    os << ")";
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Haar quadrature

std::vector<WeightedElement> HaarQuadrature::weighted() const {
  std::vector<WeightedElement> out;
  out.reserve(nodes.size());
  for (const auto& n : nodes) out.push_back({n.element, n.weight});
  return out;
}

double HaarQuadrature::total_weight() const {
  double s = 0.0;
  for (const auto& n : nodes) s += n.weight;
  return s;
}

HaarQuadrature haar_quadrature(const GroupModel& group, std::size_t N) {
  HaarQuadrature q;
  if (const auto* f = std::get_if<FiniteGroup>(&group.variant())) {
    const double w = 1.0 / static_cast<double>(f->elements.size());
    for (const auto& e : f->elements) q.nodes.push_back({e, w});
    return q;
  }
  if (N < 1) throw DomainError("haar_quadrature: N must be >= 1");
  const double w = 1.0 / static_cast<double>(N);
  if (const auto* c = std::get_if<CircleGroup>(&group.variant())) {
    for (std::size_t k = 0; k < N; ++k) {
      const double t = kTwoPi * static_cast<double>(k) / static_cast<double>(N);
      q.nodes.push_back({GroupElement::from_matrix((t * c->generator).exp()), w});
    }
    return q;
  }
  if (const auto* t = std::get_if<CircleTranslation>(&group.variant())) {
    for (std::size_t k = 0; k < N; ++k) {
      const double s = kTwoPi * static_cast<double>(k) / static_cast<double>(N);
      q.nodes.push_back({GroupElement::translation(s * t->direction), w});
    }
    return q;
  }
  const auto& p = std::get<ProductGroup>(group.variant());
  std::vector<HaarQuadrature> parts;
  for (const auto& f : p.factors) parts.push_back(haar_quadrature(f, N));
  std::vector<std::size_t> idx(parts.size(), 0);
  while (true) {
    std::vector<GroupElement> els;
    double weight = 1.0;
    for (std::size_t i = 0; i < parts.size(); ++i) {
      els.push_back(parts[i].nodes[idx[i]].element);
      weight *= parts[i].nodes[idx[i]].weight;
    }
    q.nodes.push_back({block_diag(els), weight});
    std::size_t a = 0;
    while (a < parts.size() && ++idx[a] == parts[a].nodes.size()) idx[a++] = 0;
    if (a == parts.size()) break;
  }
  return q;
}

// ---------------------------------------------------------------------------
// Scenario

ActionScenario make_scenario(std::string name, GroupModel group, ManifoldModel manifold) {
  MetricField base = manifold.metric();
  ActionScenario scn{std::move(name), std::move(group), std::move(manifold), std::move(base)};
  scn.validate();
  return scn;
}

void ActionScenario::validate() const {
  const int n = manifold.ambient_dimension();
  if (group.dimension() != n)
    throw ValidationError("scenario " + name + ": group acts on dimension " + std::to_string(group.dimension()) +
                          " but the manifold chart has dimension " + std::to_string(n));
  if (base_metric.dimension() != n) throw ValidationError("scenario " + name + ": base metric dimension mismatch");

  std::vector<Point> probes;
  for (int k = 0; k < 4; ++k) {
    Point p(n);
    for (int i = 0; i < n; ++i) p(i) = 0.3 + 0.7 * std::sin(1.3 * (k + 1) + 2.1 * i);
    if (manifold.kind() == ManifoldKind::Sphere) p.normalize();
    if (manifold.kind() == ManifoldKind::Torus) p = manifold.canonical(p * 3.0);
    probes.push_back(p);
  }
  if (manifold.kind() == ManifoldKind::Sampled) probes = {manifold.samples().front()};

  const auto quad = haar_quadrature(group, 16);
  for (std::size_t k = 0; k < quad.nodes.size(); ++k) {
    const auto& g = quad.nodes[k].element;
    if (manifold.kind() == ManifoldKind::Torus) {
      const Mat& l = g.linear;
      if ((l - l.array().round().matrix()).cwiseAbs().maxCoeff() > 1e-12)
        throw ValidationError("scenario " + name + ": torus actions need integer linear parts");
    } else if (g.has_shift()) {
      throw ValidationError("scenario " + name + ": translations only act on torus models");
    }
    for (const auto& p : probes) {
      const Point img = manifold.kind() == ManifoldKind::Torus ? manifold.canonical(g.apply(p)) : g.apply(p);
      if (!manifold.contains(img, 1e-9))
        throw ValidationError("scenario " + name + ": group element " + std::to_string(k) +
                              " does not preserve the manifold");
    }
  }
}

Point act(const ActionScenario& scn, const GroupElement& g, const Point& p) {
  scn.manifold.require_contains(p, "act");
  return scn.manifold.canonical(g.apply(p));
}

// ---------------------------------------------------------------------------
// Isotropy

std::string IsotropyDescriptor::describe() const {
  std::ostringstream os;
  switch (kind) {
    case IsotropyKind::FullCircle: os << "S1"; break;
    case IsotropyKind::FiniteCyclicInCircle: os << "Z" << order() << "<S1"; break;
    case IsotropyKind::FiniteSubgroup: os << "H(order " << order() << ")"; break;
  }
  if (ambiguous) os << "?";
  return os.str();
}

namespace {

IsotropyDescriptor cyclic_in_circle(const Mat& generator, std::size_t k) {
  IsotropyDescriptor d;
  d.kind = IsotropyKind::FiniteCyclicInCircle;
  for (std::size_t j = 0; j < k; ++j)
    d.elements.push_back(GroupElement::from_matrix((kTwoPi * static_cast<double>(j) / k * generator).exp()));
  d.table = CayleyTable::cyclic(k);
  return d;
}

IsotropyDescriptor circle_isotropy(const Mat& a, const Point& p, double tol, std::size_t N) {
  const double ap = (a * p).norm();
  if (ap < tol) {
    IsotropyDescriptor d;
    d.kind = IsotropyKind::FullCircle;
    d.circle_generator = a;
    return d;
  }
  // f(t) = |exp(tA)p - p|^2 and f'(t) = 2 <exp(tA)p - p, A exp(tA)p>.
  auto deriv = [&](double t) {
    const Vec y = (t * a).exp() * p;
    return 2.0 * (y - p).dot(a * y);
  };
  const std::size_t M = std::max<std::size_t>(10 * N, 64);
  const double dt = kTwoPi / static_cast<double>(M);
  const Mat step = (dt * a).exp();
  // Samples at t_j = (j + 1/2) dt keep the trivial root at t = 0 out of the scan.
  Mat r = (0.5 * dt * a).exp();
  std::vector<double> ts(M), ds(M);
  for (std::size_t j = 0; j < M; ++j) {
    ts[j] = (static_cast<double>(j) + 0.5) * dt;
    const Vec y = r * p;
    ds[j] = 2.0 * (y - p).dot(a * y);
    r = step * r;
  }
  std::size_t k = 1;
  bool ambiguous = ap < 10 * tol;
  for (std::size_t j = 0; j + 1 < M; ++j) {
    if (!(ds[j] < 0 && ds[j + 1] >= 0)) continue;
    double lo = ts[j], hi = ts[j + 1];
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      (deriv(mid) < 0 ? lo : hi) = mid;
    }
    const double t = 0.5 * (lo + hi);
    const double gap = ((t * a).exp() * p - p).norm();
    if (gap < tol)
      ++k;
    else if (gap < 10 * tol)
      ambiguous = true;
  }
  IsotropyDescriptor d = cyclic_in_circle(a, k);
  d.ambiguous = ambiguous;
  return d;
}

std::size_t gcd_of(const Vec& d) {
  std::size_t g = 0;
  for (Eigen::Index i = 0; i < d.size(); ++i) g = std::gcd(g, static_cast<std::size_t>(std::llround(std::abs(d(i)))));
  return g;
}

}  // namespace

IsotropyDescriptor isotropy(const ActionScenario& scn, const Point& p, double tol, std::size_t N) {
  scn.manifold.require_contains(p, "isotropy");
  const auto& group = scn.group;
  if (group.is_finite()) {
    const auto& fg = group.finite_group();
    IsotropyDescriptor d;
    d.kind = IsotropyKind::FiniteSubgroup;
    for (std::size_t i = 0; i < fg.elements.size(); ++i) {
      const double gap = scn.manifold.difference(p, act(scn, fg.elements[i], p)).norm();
      if (gap < tol)
        d.members.push_back(i);
      else if (gap < 10 * tol)
        d.ambiguous = true;
    }
    d.table = fg.table.restrict_to(d.members);
    for (auto i : d.members) d.elements.push_back(fg.elements[i]);
    return d;
  }
  if (const auto* c = std::get_if<CircleGroup>(&group.variant())) return circle_isotropy(c->generator, p, tol, N);
  if (const auto* t = std::get_if<CircleTranslation>(&group.variant())) {
    const std::size_t k = gcd_of(t->direction);
    IsotropyDescriptor d;
    d.kind = IsotropyKind::FiniteCyclicInCircle;
    for (std::size_t j = 0; j < k; ++j)
      d.elements.push_back(GroupElement::translation(kTwoPi * static_cast<double>(j) / k * t->direction));
    d.table = CayleyTable::cyclic(k);
    return d;
  }
  throw UnsupportedError("isotropy of products with circle factors is not implemented");
}

// ---------------------------------------------------------------------------
// Orbits

std::vector<Point> orbit_points(const ActionScenario& scn, const Point& p, const HaarQuadrature& quad) {
  scn.manifold.require_contains(p, "orbit_sample");
  std::vector<Point> pts;
  for (const auto& node : quad.nodes) {
    Point q = scn.manifold.canonical(node.element.apply(p));
    const bool dup = std::any_of(pts.begin(), pts.end(),
                                 [&](const Point& e) { return scn.manifold.difference(e, q).norm() <= 1e-9; });
    if (!dup) pts.push_back(std::move(q));
  }
  return pts;
}

OrbitSample orbit_sample(const ActionScenario& scn, const Point& p, std::size_t N) {
  OrbitSample o;
  o.base = p;
  o.points = orbit_points(scn, p, haar_quadrature(scn.group, N));
  o.isotropy = isotropy(scn, p, kIsotropyTolerance, N);
  o.resolution = N;
  return o;
}

// ---------------------------------------------------------------------------
// Metrics

MetricField average_metric(const ActionScenario& scn, const MetricField& base, std::size_t N) {
  if (base.dimension() != scn.manifold.ambient_dimension())
    throw DomainError("average_metric: base metric dimension mismatch");
  const auto quad = haar_quadrature(scn.group, N);
  if (base.is_flat()) return base;
  if (base.is_constant()) return MetricField::constant(kernels::haar_average(quad.weighted(), base.constant_matrix()));
  return MetricField::averaged(base, quad.weighted(), scn.manifold.kind() == ManifoldKind::Torus);
}

MetricField completeness_rescale(const MetricField& metric, const ScalarField& f) {
  if (!f.value) throw DomainError("completeness_rescale: scalar field has no value function");
  return MetricField::rescaled(metric, f);
}

double invariance_defect(const ActionScenario& scn, const ScalarField& f, const std::vector<Point>& probes,
                         std::size_t N) {
  const auto quad = haar_quadrature(scn.group, N);
  double worst = 0.0;
  for (const auto& x : probes) {
    const double fx = f(x);
    for (const auto& node : quad.nodes) worst = std::max(worst, std::abs(f(act(scn, node.element, x)) - fx));
  }
  return worst;
}

std::vector<Vec> fundamental_field(const ActionScenario& scn, const Point& p) {
  scn.manifold.require_contains(p, "fundamental_field");
  std::vector<Vec> out;
  for (const auto& x : scn.group.lie_algebra()) out.push_back(x.linear * p + x.shift);
  return out;
}

std::vector<double> NormalRepresentation::characters() const {
  std::vector<double> out;
  out.reserve(element_matrices.size());
  for (const auto& m : element_matrices) out.push_back(m.trace());
  return out;
}

NormalRepresentation normal_representation(const ActionScenario& scn, const Point& p, const MetricField& metric,
                                           double tol) {
  scn.manifold.require_contains(p, "normal_representation");
  const Point x = scn.manifold.canonical(p);
  const Mat g = metric.at(x);
  const Mat t = scn.manifold.tangent_basis(x);
  const Mat gt = t.transpose() * g * t;
  const Eigen::Index d = gt.rows();

  const auto fields = fundamental_field(scn, x);
  Mat y;
  if (fields.empty()) {
    y = Mat::Identity(d, d);
  } else {
    Mat xt(d, static_cast<Eigen::Index>(fields.size()));
    for (std::size_t i = 0; i < fields.size(); ++i) xt.col(static_cast<Eigen::Index>(i)) = t.transpose() * fields[i];
    const Mat c = xt.transpose() * gt;
    Eigen::JacobiSVD<Mat> svd(c, Eigen::ComputeFullV);
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
      if (svd.singularValues()(i) > tol) ++rank;
    y = svd.matrixV().rightCols(d - rank);
  }
  NormalRepresentation rep;
  rep.isotropy = isotropy(scn, x, tol);
  if (y.cols() == 0) {
    rep.normal_basis = Mat(t.rows(), 0);
  } else {
    const Mat m = y.transpose() * gt * y;
    const Eigen::LLT<Mat> llt(m);
    const Mat bt = llt.matrixL().solve(y.transpose()).transpose();
    rep.normal_basis = t * bt;
  }
  const Mat& b = rep.normal_basis;
  auto restrict = [&](const Mat& linear) { return Mat(b.transpose() * g * linear * b); };

  if (rep.isotropy.kind == IsotropyKind::FullCircle) {
    const Mat& a = rep.isotropy.circle_generator;
    rep.infinitesimal = restrict(a);
    for (std::size_t j = 0; j < kCircleCharacterSamples; ++j)
      rep.element_matrices.push_back(
          restrict((kTwoPi * static_cast<double>(j) / static_cast<double>(kCircleCharacterSamples) * a).exp()));
  } else {
    for (const auto& e : rep.isotropy.elements) rep.element_matrices.push_back(restrict(e.linear));
    for (auto gi : rep.isotropy.table.generators()) rep.matrices.push_back(rep.element_matrices[gi]);
  }
  return rep;
}

VerificationReport verify_transversal_invariance(const ActionScenario& scn, const MetricField& metric,
                                                 const std::vector<OrbitSample>& probes, double tol, std::size_t N) {
  if (probes.empty()) return VerificationReport::vacuous_pass("transversal_invariance", tol, "no probe orbits");
  const auto quad = haar_quadrature(scn.group, N);
  double worst = 0.0;
  std::size_t worst_probe = 0, worst_node = 0;
  for (std::size_t i = 0; i < probes.size(); ++i) {
    const Point x = scn.manifold.canonical(probes[i].base);
    const Mat b = normal_representation(scn, x, metric).normal_basis;
    if (b.cols() == 0) continue;
    const Mat ref = b.transpose() * metric.at(x) * b;
    for (std::size_t k = 0; k < quad.nodes.size(); ++k) {
      const auto& g = quad.nodes[k].element;
      const Point y = act(scn, g, x);
      const Mat lb = g.linear * b;
      const double dev = (lb.transpose() * metric.at(y) * lb - ref).cwiseAbs().maxCoeff();
      if (dev > worst) {
        worst = dev;
        worst_probe = i;
        worst_node = k;
      }
    }
  }
  auto r = VerificationReport::make("transversal_invariance", worst, tol);
  r.witness = {{"probe", worst_probe}, {"node", worst_node}};
  return r;
}

SrfResult srf_perpendicularity(const ActionScenario& scn, const MetricField& metric, const Point& p, const Vec& v,
                               double T, double h, double tol) {
  SrfResult out;
  const auto algebra = scn.group.lie_algebra();
  if (algebra.empty()) {
    out.vacuous = true;
    return out;
  }
  const ManifoldModel model = scn.manifold.with_metric(metric);
  const Mat g0 = metric.at(scn.manifold.canonical(p));
  for (const auto& x : algebra) {
    const Vec xp = x.linear * p + x.shift;
    const double nx = std::sqrt(xp.dot(g0 * xp));
    if (nx < 1e-12) continue;
    const double nv = std::sqrt(v.dot(g0 * v));
    if (std::abs(v.dot(g0 * xp)) > tol * nv * nx)
      throw DomainError("srf_perpendicularity: initial velocity is not normal to the orbit");
  }
  const auto path = geodesic_trace(model, p, v, T, h);
  out.truncated = path.truncated;
  out.samples = path.samples.size();
  for (const auto& s : path.samples) {
    const Mat g = metric.at(s.point);
    const double nv = std::sqrt(s.velocity.dot(g * s.velocity));
    for (const auto& x : algebra) {
      const Vec xp = x.linear * s.point + x.shift;
      const double nx = std::sqrt(xp.dot(g * xp));
      if (nx < 1e-12) continue;  // fixed point
      out.max_deviation = std::max(out.max_deviation, std::abs(s.velocity.dot(g * xp)) / (nv * nx));
    }
  }
  return out;
}

}  // namespace orbitspace

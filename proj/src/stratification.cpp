#include "orbitspace/stratification.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

namespace orbitspace {

std::string to_string(Relation r) {
  switch (r) {
    case Relation::Conjugacy: return "conjugacy";
    case Relation::Weak: return "weak";
    case Relation::Normal: return "normal";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Group isomorphisms

namespace {

std::vector<std::size_t> order_profile(const CayleyTable& t) {
  std::vector<std::size_t> p(t.order());
  for (std::size_t a = 0; a < t.order(); ++a) p[a] = t.element_order(a);
  std::sort(p.begin(), p.end());
  return p;
}

// Calls visit(phi) for each isomorphism until it returns false.
void search_isomorphisms(const CayleyTable& t1, const CayleyTable& t2,
                         const std::function<bool(const std::vector<std::size_t>&)>& visit) {
  const std::size_t n = t1.order();
  if (n != t2.order()) return;
  if (n > kIsomorphismOrderCap || t2.order() > kIsomorphismOrderCap)
    throw UnsupportedError("isomorphism search is capped at order " + std::to_string(kIsomorphismOrderCap));
  if (order_profile(t1) != order_profile(t2) || t1.is_abelian() != t2.is_abelian()) return;

  const auto gens = t1.generators();
  std::vector<std::vector<std::size_t>> candidates(gens.size());
  for (std::size_t i = 0; i < gens.size(); ++i) {
    const auto ord = t1.element_order(gens[i]);
    for (std::size_t b = 0; b < n; ++b)
      if (t2.element_order(b) == ord) candidates[i].push_back(b);
  }
  std::vector<std::size_t> image(gens.size());
  bool stop = false;

  auto extend = [&]() -> std::optional<std::vector<std::size_t>> {
    std::vector<std::size_t> phi(n, n);
    std::vector<char> used(n, 0);
    phi[0] = 0;
    used[0] = 1;
    std::vector<std::size_t> queue{0};
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const auto x = queue[head];
      for (std::size_t g = 0; g < gens.size(); ++g) {
        const auto y = t1.mul(x, gens[g]);
        const auto img = t2.mul(phi[x], image[g]);
        if (phi[y] == n) {
          if (used[img]) return std::nullopt;
          phi[y] = img;
          used[img] = 1;
          queue.push_back(y);
        } else if (phi[y] != img) {
          return std::nullopt;
        }
      }
    }
    if (queue.size() != n) return std::nullopt;
    return phi;
  };

  std::function<void(std::size_t)> assign = [&](std::size_t k) {
    if (stop) return;
    if (k == gens.size()) {
      if (auto phi = extend()) stop = !visit(*phi);
      return;
    }
    for (auto b : candidates[k]) {
      image[k] = b;
      assign(k + 1);
      if (stop) return;
    }
  };
  assign(0);
}

const CayleyTable& table_of(const IsotropyDescriptor& h) { return h.table; }

}  // namespace

std::vector<std::vector<std::size_t>> group_isomorphisms(const CayleyTable& t1, const CayleyTable& t2) {
  std::vector<std::vector<std::size_t>> out;
  search_isomorphisms(t1, t2, [&](const std::vector<std::size_t>& phi) {
    out.push_back(phi);
    return true;
  });
  return out;
}

bool conjugacy_equal(const ActionScenario& scn, const IsotropyDescriptor& h1, const IsotropyDescriptor& h2) {
  if (h1.kind != h2.kind) return false;
  if (h1.kind != IsotropyKind::FiniteSubgroup) return h1.order() == h2.order();
  if (h1.members.size() != h2.members.size()) return false;
  const auto& fg = scn.group.finite_group();
  const std::set<std::size_t> target(h2.members.begin(), h2.members.end());
  for (std::size_t g = 0; g < fg.elements.size(); ++g) {
    const auto ginv = fg.table.inverse[g];
    bool ok = true;
    for (auto h : h1.members)
      if (!target.count(fg.table.mul(fg.table.mul(g, h), ginv))) {
        ok = false;
        break;
      }
    if (ok) return true;
  }
  return false;
}

bool weak_type_equal(const IsotropyDescriptor& h1, const IsotropyDescriptor& h2) {
  const bool c1 = h1.kind == IsotropyKind::FullCircle, c2 = h2.kind == IsotropyKind::FullCircle;
  if (c1 || c2) return c1 && c2;
  bool found = false;
  search_isomorphisms(table_of(h1), table_of(h2), [&](const std::vector<std::size_t>&) {
    found = true;
    return false;
  });
  return found;
}

bool normal_type_equal(const NormalRepresentation& r1, const NormalRepresentation& r2, double tol) {
  if (r1.dimension() != r2.dimension()) return false;
  if (!weak_type_equal(r1.isotropy, r2.isotropy)) return false;
  const auto x1 = r1.characters(), x2 = r2.characters();
  if (r1.isotropy.kind == IsotropyKind::FullCircle) {
    for (std::size_t i = 0; i < x1.size(); ++i)
      if (std::abs(x1[i] - x2[i]) > tol) return false;
    return true;
  }
  bool found = false;
  search_isomorphisms(r1.isotropy.table, r2.isotropy.table, [&](const std::vector<std::size_t>& phi) {
    for (std::size_t h = 0; h < phi.size(); ++h)
      if (std::abs(x1[h] - x2[phi[h]]) > tol) return true;
    found = true;
    return false;
  });
  return found;
}

std::string OrbitTypeLabel::describe() const {
  std::ostringstream os;
  os << isotropy.describe();
  if (relation == Relation::Normal) {
    os << " chi=(";
    for (std::size_t i = 0; i < characters.size(); ++i) os << (i ? "," : "") << std::round(characters[i] * 1e6) / 1e6;
    os << ")";
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Stratification

std::vector<int> StratificationReport::component_of() const {
  std::vector<int> out(sample.size(), -1);
  for (std::size_t c = 0; c < components.size(); ++c)
    for (auto i : components[c]) out[i] = static_cast<int>(c);
  return out;
}

namespace {

struct PointType {
  IsotropyDescriptor isotropy;
  std::optional<NormalRepresentation> rep;
};

bool same_type(const ActionScenario& scn, Relation rel, const PointType& a, const PointType& b) {
  switch (rel) {
    case Relation::Conjugacy: return conjugacy_equal(scn, a.isotropy, b.isotropy);
    case Relation::Weak: return weak_type_equal(a.isotropy, b.isotropy);
    case Relation::Normal: return normal_type_equal(*a.rep, *b.rep);
  }
  return false;
}

std::size_t find_root(std::vector<std::size_t>& parent, std::size_t x) {
  while (parent[x] != x) {
    parent[x] = parent[parent[x]];
    x = parent[x];
  }
  return x;
}

int local_dimension(const ManifoldModel& m, const std::vector<Point>& sample, std::size_t center,
                    const std::vector<std::size_t>& neighbours) {
  if (neighbours.size() < 2) return 0;
  const Mat t = m.tangent_basis(sample[center]);
  Mat coords(t.cols(), static_cast<Eigen::Index>(neighbours.size()));
  for (std::size_t k = 0; k < neighbours.size(); ++k)
    coords.col(static_cast<Eigen::Index>(k)) = t.transpose() * m.difference(sample[center], sample[neighbours[k]]);
  const Vec mean = coords.rowwise().mean();
  coords.colwise() -= mean;
  const Eigen::JacobiSVD<Mat> svd(coords);
  const Vec& s = svd.singularValues();
  if (s.size() == 0 || s(0) <= 1e-12) return 0;
  int dim = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > 0.1 * s(0)) ++dim;
  return dim;
}

}  // namespace

void rebuild_components(const ActionScenario& scn, StratificationReport& r) {
  const auto& m = scn.manifold;
  const std::size_t n = r.sample.size();
  const double eps = r.epsilon;

  std::vector<std::vector<std::size_t>> near(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (m.difference(r.sample[i], r.sample[j]).norm() <= 2.0 * eps) {
        near[i].push_back(j);
        near[j].push_back(i);
      }
  auto dist = [&](std::size_t i, std::size_t j) { return m.difference(r.sample[i], r.sample[j]).norm(); };

  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (r.labels[i] < 0) continue;
    for (auto j : near[i])
      if (j > i && r.labels[j] == r.labels[i] && dist(i, j) <= eps) {
        const auto a = find_root(parent, i), b = find_root(parent, j);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
      }
  }
  r.components.clear();
  r.component_label.clear();
  std::map<std::size_t, std::size_t> index;
  for (std::size_t i = 0; i < n; ++i) {
    if (r.labels[i] < 0) continue;
    const auto root = find_root(parent, i);
    auto [it, fresh] = index.emplace(root, r.components.size());
    if (fresh) {
      r.components.emplace_back();
      r.component_label.push_back(r.labels[i]);
    }
    r.components[it->second].push_back(i);
  }
  const auto comp = r.component_of();

  r.component_dimension.assign(r.components.size(), 0);
  for (std::size_t c = 0; c < r.components.size(); ++c) {
    std::map<int, std::size_t> votes;
    for (auto i : r.components[c]) {
      std::vector<std::size_t> nb{i};
      for (auto j : near[i])
        if (comp[j] == static_cast<int>(c)) nb.push_back(j);
      ++votes[local_dimension(m, r.sample, i, nb)];
    }
    int best = 0;
    std::size_t best_votes = 0;
    for (const auto& [d, v] : votes)
      if (v >= best_votes) {
        best = d;
        best_votes = v;
      }
    r.component_dimension[c] = best;
  }

  r.frontier.clear();
  std::set<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < n; ++i) {
    if (comp[i] < 0) continue;
    for (auto j : near[i]) {
      if (comp[j] < 0 || comp[j] == comp[i] || dist(i, j) > eps) continue;
      const auto a = static_cast<std::size_t>(comp[i]), b = static_cast<std::size_t>(comp[j]);
      if (r.component_dimension[a] < r.component_dimension[b]) pairs.emplace(a, b);
    }
  }
  r.frontier.assign(pairs.begin(), pairs.end());
}

StratificationReport stratify(const ActionScenario& scn, const std::vector<Point>& sample, Relation relation,
                              double epsilon, std::size_t N) {
  if (epsilon <= 0.0) throw DomainError("stratify: epsilon must be positive");
  for (const auto& p : sample) scn.manifold.require_contains(p, "stratify");
  StratificationReport r;
  r.relation = relation;
  r.epsilon = epsilon;
  r.sample = sample;
  const auto n = static_cast<std::ptrdiff_t>(sample.size());
  std::vector<PointType> types(sample.size());
#pragma omp parallel for schedule(dynamic, 8)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    auto& t = types[static_cast<std::size_t>(i)];
    const auto& p = sample[static_cast<std::size_t>(i)];
    t.isotropy = isotropy(scn, p, kIsotropyTolerance, N);
    if (relation == Relation::Normal && !t.isotropy.ambiguous) t.rep = normal_representation(scn, p, scn.manifold.metric());
  }

  std::vector<std::size_t> witness_point;
  r.labels.assign(sample.size(), -1);
  for (std::size_t i = 0; i < sample.size(); ++i) {
    if (types[i].isotropy.ambiguous) {
      r.excluded.push_back(i);
      continue;
    }
    int label = -1;
    for (std::size_t c = 0; c < witness_point.size() && label < 0; ++c)
      if (same_type(scn, relation, types[witness_point[c]], types[i])) label = static_cast<int>(c);
    if (label < 0) {
      label = static_cast<int>(witness_point.size());
      witness_point.push_back(i);
      OrbitTypeLabel l;
      l.relation = relation;
      l.class_id = static_cast<std::size_t>(label);
      l.isotropy = types[i].isotropy;
      if (types[i].rep) l.characters = types[i].rep->characters();
      r.classes.push_back(std::move(l));
    }
    r.labels[i] = label;
  }
  rebuild_components(scn, r);
  return r;
}

std::vector<std::string> verify_frontier(const ActionScenario& scn, const StratificationReport& r, double delta) {
  std::vector<std::string> violations;
  const auto& m = scn.manifold;
  const std::size_t nc = r.components.size();
  for (std::size_t a = 0; a < nc; ++a)
    for (std::size_t b = 0; b < nc; ++b) {
      if (a == b || r.component_dimension[a] >= r.component_dimension[b]) continue;
      std::size_t close = 0;
      std::optional<std::size_t> far;
      for (auto i : r.components[a]) {
        bool near = false;
        for (auto j : r.components[b])
          if (m.difference(r.sample[i], r.sample[j]).norm() <= delta) {
            near = true;
            break;
          }
        if (near)
          ++close;
        else if (!far)
          far = i;
      }
      if (close > 0 && far) {
        std::ostringstream os;
        os << "component " << a << " meets the closure of component " << b << " but point " << *far
           << " is farther than " << delta;
        violations.push_back(os.str());
      }
    }
  return violations;
}

VerificationReport verify_normal_open_closed(const StratificationReport& weak, const StratificationReport& normal) {
  if (weak.sample.size() != normal.sample.size())
    throw DomainError("verify_normal_open_closed: labelings use different samples");
  std::vector<std::size_t> offenders;
  for (std::size_t c = 0; c < weak.components.size(); ++c) {
    std::set<int> seen;
    for (auto i : weak.components[c])
      if (normal.labels[i] >= 0) seen.insert(normal.labels[i]);
    if (seen.size() > 1) offenders.push_back(c);
  }
  auto r = VerificationReport::make("normal_type_open_closed", static_cast<double>(offenders.size()), 0.0);
  r.witness = {{"components", offenders},
               {"weak_classes", weak.class_count()},
               {"normal_classes", normal.class_count()}};
  return r;
}

std::vector<int> canonical_partition(const std::vector<int>& labels) {
  std::map<int, int> first;
  std::vector<int> out(labels.size(), -1);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0) continue;
    auto [it, fresh] = first.emplace(labels[i], static_cast<int>(first.size()));
    out[i] = it->second;
  }
  return out;
}

VerificationReport verify_slice_consistency(const ActionScenario& scn, const Point& p, double radius, int resolution,
                                            std::size_t N) {
  const std::string name = "slice_consistency";
  if (radius <= 0.0) throw DomainError("verify_slice_consistency: radius must be positive");
  if (resolution < 2) throw DomainError("verify_slice_consistency: resolution must be at least 2");
  const auto& metric = scn.manifold.metric();
  const auto rep = normal_representation(scn, p, metric);
  const int m = rep.dimension();
  if (m == 0) return VerificationReport::vacuous_pass(name, 0.0, "orbit is open: the slice is a point");

  if (radius >= scn.manifold.injectivity_bound())
    throw DomainError("verify_slice_consistency: radius exceeds the injectivity bound");
  // Finite groups: nearest other orbit point. Circles: orbit points at
  // parameters in [pi/2, 3pi/2], away from the arc through p.
  const auto quad = haar_quadrature(scn.group, N);
  const bool circle = !scn.group.is_finite();
  double separation = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < quad.nodes.size(); ++k) {
    if (circle && (4 * k < quad.nodes.size() || 4 * k > 3 * quad.nodes.size())) continue;
    const Point q = act(scn, quad.nodes[k].element, p);
    if (scn.manifold.difference(p, q).norm() > 1e-9)
      separation = std::min(separation, geodesic_distance(scn.manifold, p, q).length);
  }
  if (radius >= 0.5 * separation)
    throw DomainError("verify_slice_consistency: radius exceeds half the orbit separation");

  GroupModel slice_group = GroupModel::trivial(m);
  if (rep.isotropy.kind == IsotropyKind::FullCircle) {
    Mat a = rep.infinitesimal;
    a = 0.5 * (a - a.transpose());
    slice_group = GroupModel::circle(a);
  } else if (rep.isotropy.order() > 1) {
    slice_group = GroupModel::finite_from_matrices(rep.element_matrices);
  }
  const auto slice = make_scenario(scn.name + "/slice", slice_group, ManifoldModel::euclidean(m));

  const int res = resolution % 2 == 0 ? resolution + 1 : resolution;
  std::size_t mismatches = 0, points = 0;
  nlohmann::json detail = nlohmann::json::array();
  for (double r : {radius, 0.5 * radius}) {
    std::vector<Point> ball, image;
    for (const auto& v : grid_points(Vec::Constant(m, -r), Vec::Constant(m, r), res)) {
      if (v.norm() > r * (1.0 + 1e-12)) continue;
      ball.push_back(v);
      image.push_back(exp_map(scn.manifold, p, rep.normal_basis * v).point);
    }
    const double pitch = 2.0 * r / (res - 1);
    for (auto rel : {Relation::Weak, Relation::Normal}) {
      const auto a = canonical_partition(stratify(slice, ball, rel, 1.5 * pitch, N).labels);
      const auto b = canonical_partition(stratify(scn, image, rel, 1.5 * pitch, N).labels);
      std::size_t bad = 0;
      for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] != b[i]) ++bad;
      mismatches += bad;
      points += a.size();
      detail.push_back({{"radius", r}, {"relation", to_string(rel)}, {"points", a.size()}, {"mismatches", bad}});
    }
  }
  auto out = VerificationReport::make(name, static_cast<double>(mismatches), 0.0);
  out.witness = {{"isotropy", rep.isotropy.describe()}, {"normal_dimension", m}, {"balls", detail}};
  return out;
}

}  // namespace orbitspace

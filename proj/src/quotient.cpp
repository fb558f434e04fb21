#include "orbitspace/quotient.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace orbitspace {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::optional<kernels::ChartKind> closed_form_chart(const ManifoldModel& m) {
  if (!m.has_closed_form_distance()) return std::nullopt;
  switch (m.kind()) {
    case ManifoldKind::Euclidean: return kernels::ChartKind::Euclidean;
    case ManifoldKind::Sphere: return kernels::ChartKind::RoundSphere;
    case ManifoldKind::Torus: return kernels::ChartKind::FlatTorus;
    case ManifoldKind::Sampled: break;
  }
  return std::nullopt;
}

Mat cloud_of(const OrbitSample& o) {
  Mat c(o.base.size(), static_cast<Eigen::Index>(o.points.size()));
  for (std::size_t i = 0; i < o.points.size(); ++i) c.col(static_cast<Eigen::Index>(i)) = o.points[i];
  return c;
}

kernels::OrbitClouds clouds_for(const ManifoldModel& m, kernels::ChartKind kind, const std::vector<OrbitSample>& orbits) {
  kernels::OrbitClouds oc;
  oc.kind = kind;
  if (kind != kernels::ChartKind::RoundSphere) oc.metric = m.metric().constant_matrix();
  for (const auto& o : orbits) oc.clouds.push_back(cloud_of(o));
  return oc;
}

// Generic fallback: min over point pairs, also reporting the distance bias bound.
std::pair<double, double> generic_set_distance(const ManifoldModel& m, const OrbitSample& a, const OrbitSample& b) {
  double best = kInf, err = 0.0;
  for (const auto& p : a.points)
    for (const auto& q : b.points) {
      const auto r = geodesic_distance(m, p, q);
      if (r.length < best) best = r.length;
      err = std::max(err, r.error_bound);
    }
  return {best, err};
}

}  // namespace

Vec QuotientGraph::distances_from(std::size_t i) const {
  if (i >= size()) throw DomainError("distances_from: node index out of range");
  if (has_closure()) return dbar.row(static_cast<Eigen::Index>(i)).transpose();
  return kernels::single_source_distances(w, i);
}

double orbit_set_distance(const ActionScenario& scn, const OrbitSample& a, const OrbitSample& b) {
  if (const auto kind = closed_form_chart(scn.manifold)) {
    const auto oc = clouds_for(scn.manifold, *kind, {a, b});
    return kernels::set_distance_matrix(oc, kernels::Backend::Serial)(0, 1);
  }
  return generic_set_distance(scn.manifold, a, b).first;
}

double orbit_spacing(const ActionScenario& scn, const Point& p, std::size_t N) {
  if (scn.group.is_finite()) return 0.0;
  const Mat g = scn.manifold.metric().at(scn.manifold.canonical(p));
  double s = 0.0;
  for (const auto& x : fundamental_field(scn, p)) s += std::sqrt(x.dot(g * x));
  return kTwoPi / static_cast<double>(N) * s;
}

QuotientGraph build_quotient_graph(const ActionScenario& scn, const std::vector<Point>& bases,
                                   const QuotientOptions& options) {
  if (bases.empty()) throw DomainError("build_quotient_graph: no base points");
  for (const auto& b : bases) scn.manifold.require_contains(b, "build_quotient_graph");
  QuotientGraph g;
  const auto n = static_cast<std::ptrdiff_t>(bases.size());
  g.orbits.resize(bases.size());
  std::vector<double> spacing(bases.size(), 0.0);
#pragma omp parallel for schedule(dynamic, 1) if (options.backend == kernels::Backend::Parallel)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    g.orbits[k] = orbit_sample(scn, bases[k], options.resolution);
    spacing[k] = orbit_spacing(scn, bases[k], options.resolution);
  }
  g.h = std::max(options.base_pitch, *std::max_element(spacing.begin(), spacing.end()));

  if (const auto kind = closed_form_chart(scn.manifold)) {
    g.w = kernels::set_distance_matrix(clouds_for(scn.manifold, *kind, g.orbits), options.backend);
  } else {
    g.w = Mat::Zero(n, n);
    std::vector<double> err(bases.size(), 0.0);
#pragma omp parallel for schedule(dynamic, 1) if (options.backend == kernels::Backend::Parallel)
    for (std::ptrdiff_t i = 0; i < n; ++i)
      for (std::ptrdiff_t j = i + 1; j < n; ++j) {
        const auto [d, e] = generic_set_distance(scn.manifold, g.orbits[static_cast<std::size_t>(i)],
                                                 g.orbits[static_cast<std::size_t>(j)]);
        g.w(i, j) = d;
        g.w(j, i) = d;
        err[static_cast<std::size_t>(i)] = std::max(err[static_cast<std::size_t>(i)], e);
      }
    g.distance_error = *std::max_element(err.begin(), err.end());
  }
  if (options.closure) g.dbar = kernels::shortest_path_closure(g.w, options.backend);
  return g;
}

double quotient_distance(const QuotientGraph& g, std::size_t i, std::size_t j) {
  if (i >= g.size() || j >= g.size()) throw DomainError("quotient_distance: index out of range");
  if (i == j) return 0.0;
  if (g.has_closure()) return g.dbar(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  return g.distances_from(i)(static_cast<Eigen::Index>(j));
}

TriangleCheck triangle_excess(const Mat& m, std::size_t trials, std::uint64_t seed) {
  TriangleCheck out;
  const auto n = static_cast<std::size_t>(m.rows());
  if (n < 3) return out;
  Rng rng(seed);
  for (std::size_t t = 0; t < trials; ++t) {
    const auto a = static_cast<Eigen::Index>(rng.index(n));
    const auto b = static_cast<Eigen::Index>(rng.index(n));
    const auto c = static_cast<Eigen::Index>(rng.index(n));
    const Eigen::Index tri[3][3] = {{a, b, c}, {b, c, a}, {c, a, b}};
    for (const auto& o : tri) {
      // d(o0, o2) <= d(o0, o1) + d(o1, o2)
      const double excess = m(o[0], o[2]) - m(o[0], o[1]) - m(o[1], o[2]);
      if (excess > out.worst) {
        out.worst = excess;
        out.i = static_cast<std::size_t>(o[0]);
        out.j = static_cast<std::size_t>(o[1]);
        out.k = static_cast<std::size_t>(o[2]);
      }
    }
  }
  return out;
}

VerificationReport verify_metric_axioms(const QuotientGraph& g, std::size_t trials, std::uint64_t seed, double tol,
                                        double tube_radius) {
  if (g.size() < 2) return VerificationReport::vacuous_pass("metric_axioms", tol, "fewer than two nodes");
  if (!g.has_closure()) throw DomainError("verify_metric_axioms needs the full closure");
  const double sym = (g.dbar - g.dbar.transpose()).cwiseAbs().maxCoeff();
  const auto tri = triangle_excess(g.dbar, trials, seed);
  double local = 0.0;
  std::size_t li = 0, lj = 0;
  if (tube_radius > 0.0) {
    for (Eigen::Index i = 0; i < g.w.rows(); ++i)
      for (Eigen::Index j = 0; j < g.w.cols(); ++j)
        if (g.w(i, j) < tube_radius) {
          const double d = std::abs(g.dbar(i, j) - g.w(i, j));
          if (d > local) {
            local = d;
            li = static_cast<std::size_t>(i);
            lj = static_cast<std::size_t>(j);
          }
        }
  }
  auto r = VerificationReport::make("metric_axioms", std::max({sym, tri.worst, local}), tol);
  r.witness = {{"symmetry", sym},
               {"triangle_excess", tri.worst},
               {"triangle", {tri.i, tri.j, tri.k}},
               {"local_formula", local},
               {"local_pair", {li, lj}}};
  return r;
}

VerificationReport verify_closure_dominance(const QuotientGraph& g, double tol, bool require_equality) {
  const std::string name = require_equality ? "closure_equals_one_step" : "closure_below_one_step";
  if (!g.has_closure()) throw DomainError("verify_closure_dominance needs the full closure");
  double worst = 0.0;
  std::size_t wi = 0, wj = 0;
  for (Eigen::Index i = 0; i < g.w.rows(); ++i)
    for (Eigen::Index j = 0; j < g.w.cols(); ++j) {
      const double diff = g.dbar(i, j) - g.w(i, j);
      const double d = require_equality ? std::abs(diff) : std::max(diff, 0.0);
      if (d > worst) {
        worst = d;
        wi = static_cast<std::size_t>(i);
        wj = static_cast<std::size_t>(j);
      }
    }
  auto r = VerificationReport::make(name, worst, tol);
  r.witness = {{"pair", {wi, wj}}};
  return r;
}

VerificationReport verify_submetry(const ActionScenario& scn, const QuotientGraph& g, std::size_t p_index,
                                   const std::vector<double>& radii, double tol) {
  if (p_index >= g.size()) throw DomainError("verify_submetry: base index out of range");
  const Point& p = g.orbits[p_index].base;
  const Vec row = g.distances_from(p_index);
  const auto n = static_cast<std::ptrdiff_t>(g.size());
  Vec nearest(n);
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t j = 0; j < n; ++j) {
    double best = kInf;
    for (const auto& q : g.orbits[static_cast<std::size_t>(j)].points)
      best = std::min(best, geodesic_distance(scn.manifold, p, q).length);
    nearest(j) = best;
  }
  double worst = 0.0;
  std::size_t tested = 0;
  nlohmann::json per_radius = nlohmann::json::array();
  for (double r : radii) {
    if (r < g.h) {
      per_radius.push_back({{"radius", r}, {"vacuous", true}});
      continue;
    }
    ++tested;
    double a = 0.0, b = 0.0;
    for (std::ptrdiff_t j = 0; j < n; ++j) {
      if (nearest(j) < r) a = std::max(a, row(j) - r);
      if (row(j) < r) b = std::max(b, nearest(j) - r);
    }
    worst = std::max({worst, a, b});
    per_radius.push_back({{"radius", r}, {"ball_into_ball", a}, {"ball_onto_ball", b}});
  }
  if (tested == 0) return VerificationReport::vacuous_pass("submetry", tol, "all radii below the sampling pitch");
  auto rep = VerificationReport::make("submetry", worst, tol);
  rep.witness = {{"radii", per_radius}, {"pitch", g.h}};
  return rep;
}

namespace {

double point_to_orbit(const ManifoldModel& m, const Point& q, const OrbitSample& o) {
  double best = kInf;
  for (const auto& x : o.points) best = std::min(best, geodesic_distance(m, q, x).length);
  return best;
}

}  // namespace

VerificationReport verify_equidistance(const ActionScenario& scn, const OrbitSample& orbit,
                                       const std::vector<OrbitSample>& probes, double eps, double tol) {
  double worst = 0.0;
  std::size_t met = 0, worst_probe = 0;
  for (std::size_t i = 0; i < probes.size(); ++i) {
    double lo = kInf, hi = 0.0;
    for (const auto& q : probes[i].points) {
      const double d = point_to_orbit(scn.manifold, q, orbit);
      lo = std::min(lo, d);
      hi = std::max(hi, d);
    }
    if (lo >= eps) continue;
    ++met;
    if (hi - lo > worst) {
      worst = hi - lo;
      worst_probe = i;
    }
  }
  if (met == 0) return VerificationReport::vacuous_pass("equidistance", tol, "no probe orbit meets the tube");
  auto r = VerificationReport::make("equidistance", worst, tol);
  r.witness = {{"probe", worst_probe}, {"orbits_in_tube", met}};
  return r;
}

VerificationReport verify_tube_invariance(const ActionScenario& scn, const OrbitSample& orbit,
                                          const std::vector<OrbitSample>& probes, double eps) {
  std::size_t met = 0;
  std::vector<std::size_t> violations;
  for (std::size_t i = 0; i < probes.size(); ++i) {
    bool inside = false, outside = false;
    for (const auto& q : probes[i].points) (point_to_orbit(scn.manifold, q, orbit) < eps ? inside : outside) = true;
    if (!inside) continue;
    ++met;
    if (outside) violations.push_back(i);
  }
  if (met == 0) return VerificationReport::vacuous_pass("tube_invariance", 0.0, "no probe orbit meets the tube");
  auto r = VerificationReport::make("tube_invariance", static_cast<double>(violations.size()), 0.0);
  r.witness = {{"violations", violations}, {"orbits_in_tube", met}};
  return r;
}

VerificationReport verify_length_space(const QuotientGraph& g,
                                       const std::vector<std::pair<std::size_t, std::size_t>>& pairs, double tol) {
  if (pairs.empty()) return VerificationReport::vacuous_pass("length_space", tol, "no pairs");
  double worst = 0.0;
  std::size_t wa = 0, wb = 0;
  for (const auto& [a, b] : pairs) {
    const Vec da = g.distances_from(a), db = g.distances_from(b);
    const double half = 0.5 * da(static_cast<Eigen::Index>(b));
    double best = kInf;
    for (Eigen::Index m = 0; m < da.size(); ++m)
      best = std::min(best, std::max(std::abs(da(m) - half), std::abs(db(m) - half)));
    if (best > worst) {
      worst = best;
      wa = a;
      wb = b;
    }
  }
  auto r = VerificationReport::make("length_space", worst, tol);
  r.witness = {{"pair", {wa, wb}}};
  if (!r.pass && g.size() <= 2) r.note = "under-sampled: no interior nodes to serve as midpoints";
  return r;
}

double comparison_distance(double kappa, double a, double b, double c, double s) {
  if (a <= 0.0) return c;
  s = std::clamp(s, 0.0, a);
  if (kappa == 0.0) {
    const double d2 = (b * b * s + c * c * (a - s)) / a - s * (a - s);
    return std::sqrt(std::max(d2, 0.0));
  }
  const double t = std::sqrt(std::abs(kappa));
  if (kappa > 0.0) {
    const double cd = (std::cos(t * c) * std::sin(t * (a - s)) + std::cos(t * b) * std::sin(t * s)) / std::sin(t * a);
    return std::acos(std::clamp(cd, -1.0, 1.0)) / t;
  }
  const double chd = (std::cosh(t * c) * std::sinh(t * (a - s)) + std::cosh(t * b) * std::sinh(t * s)) / std::sinh(t * a);
  return std::acosh(std::max(chd, 1.0)) / t;
}

VerificationReport verify_alexandrov(const QuotientGraph& g, double kappa, std::size_t triangles, std::uint64_t seed,
                                     double tol) {
  if (!g.has_closure()) throw DomainError("verify_alexandrov needs the full closure");
  const auto n = g.size();
  if (n < 3) return VerificationReport::vacuous_pass("alexandrov", tol, "fewer than three nodes");
  const Mat& d = g.dbar;
  Rng rng(seed);
  const double near = 2.0 * g.h;
  double worst = 0.0;
  std::size_t tested = 0, skipped_perimeter = 0, skipped_midpoint = 0, attempts = 0;
  nlohmann::json witness = nlohmann::json::object();
  while (tested < triangles && attempts < 50 * triangles) {
    ++attempts;
    const auto a = static_cast<Eigen::Index>(rng.index(n));
    const auto b = static_cast<Eigen::Index>(rng.index(n));
    const auto c = static_cast<Eigen::Index>(rng.index(n));
    if (a == b || b == c || a == c) continue;
    const double la = d(b, c), lb = d(a, c), lc = d(a, b);
    if (la < near) continue;
    if (kappa > 0.0 && la + lb + lc >= kTwoPi / std::sqrt(kappa)) {
      ++skipped_perimeter;
      continue;
    }
    Eigen::Index best = -1;
    double best_excess = kInf;
    for (Eigen::Index m = 0; m < d.rows(); ++m) {
      const double excess = d(b, m) + d(m, c) - la;
      if (excess <= near && std::abs(d(b, m) - d(m, c)) <= near && excess < best_excess) {
        best_excess = excess;
        best = m;
      }
    }
    if (best < 0) {
      ++skipped_midpoint;
      continue;
    }
    ++tested;
    const double s = la * d(b, best) / (d(b, best) + d(best, c));
    const double excess = comparison_distance(kappa, la, lb, lc, s) - d(a, best);
    if (excess > worst) {
      worst = excess;
      witness = {{"triangle", {a, b, c}}, {"midpoint", best}};
    }
  }
  if (tested == 0) return VerificationReport::vacuous_pass("alexandrov", tol, "no testable triangle");
  auto r = VerificationReport::make("alexandrov", worst, tol);
  witness["tested"] = tested;
  witness["skipped_perimeter"] = skipped_perimeter;
  witness["skipped_no_midpoint"] = skipped_midpoint;
  r.witness = witness;
  return r;
}

}  // namespace orbitspace

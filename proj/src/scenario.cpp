#include "orbitspace/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

namespace orbitspace {
namespace {

using Json = nlohmann::json;

Point pt(std::initializer_list<double> xs) {
  Point p(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) p(i++) = x;
  return p;
}

std::size_t nearest(const std::vector<Point>& pts, const Point& target) {
  std::size_t best = 0;
  double bd = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double d = (pts[i] - target).norm();
    if (d < bd) bd = d, best = i;
  }
  return best;
}

/// Cartesian grid points of the disc r <= r_max with polar angle in
/// [0, angle) (or [0, angle] when closed).
std::vector<Point> sector_grid(double r_max, double angle, double pitch, bool closed) {
  std::vector<Point> out;
  const int m = static_cast<int>(std::ceil(r_max / pitch));
  for (int i = -m; i <= m; ++i)
    for (int j = -m; j <= m; ++j) {
      const Point p = pt({i * pitch, j * pitch});
      const double r = p.norm();
      if (r > r_max + 1e-12) continue;
      if (r > 1e-12) {
        double a = wrap_angle(std::atan2(p(1), p(0)));
        if (a > kTwoPi - 1e-12) a = 0.0;
        if (closed ? a > angle + 1e-12 : a >= angle - 1e-12) continue;
      }
      out.push_back(p);
    }
  return out;
}

/// Pitch that keeps a sector grid under max_nodes points.
double sector_pitch(double r_max, double angle, double pitch, double max_nodes) {
  const double area = 0.5 * angle * r_max * r_max;
  return std::max(pitch, std::sqrt(area / max_nodes));
}

/// Rings of a polar sample of the sector, ring spacing `step`.
std::vector<Point> polar_sample(double r_max, double angle, double step, bool closed) {
  std::vector<Point> out{pt({0.0, 0.0})};
  const int rings = static_cast<int>(std::round(r_max / step));
  for (int i = 1; i <= rings; ++i) {
    const double r = i * step;
    const int m = std::max(2, static_cast<int>(std::ceil(r * angle / step)));
    for (int j = 0; j < m + (closed ? 1 : 0); ++j) {
      const double a = angle * j / m;
      out.push_back(pt({r * std::cos(a), r * std::sin(a)}));
    }
  }
  return out;
}

std::vector<Point> plane_grid() { return grid_points(Vec::Constant(2, -1.0), Vec::Constant(2, 1.0), 21); }

Point sphere_point(double phi, double theta) {
  return pt({std::sin(phi) * std::cos(theta), std::sin(phi) * std::sin(theta), std::cos(phi)});
}

/// Latitude-longitude grid with both poles, pitch pi / lat.
std::vector<Point> sphere_grid(int lat, int lon) {
  std::vector<Point> out{sphere_point(0.0, 0.0)};
  for (int i = 1; i < lat; ++i)
    for (int j = 0; j < lon; ++j) out.push_back(sphere_point(kPi * i / lat, kTwoPi * j / lon));
  out.push_back(sphere_point(kPi, 0.0));
  return out;
}

std::vector<Point> torus_grid(int k, int m) {
  return grid_points(Vec::Zero(k), Vec::Constant(k, kTwoPi * (m - 1) / m), m);
}

std::vector<Point> tube_probes(const ManifoldModel& model, const Point& p0, double eps) {
  const Mat t = model.tangent_basis(p0);
  std::vector<Point> out;
  for (double f : {0.3, 0.6, 0.9, 1.5})
    for (int a = 0; a < 6; ++a) {
      Vec c = Vec::Zero(t.cols());
      if (t.cols() == 1) {
        c(0) = (a % 2 == 0 ? 1.0 : -1.0) * f * eps;
      } else {
        c(0) = std::cos(a + 0.4) * f * eps;
        c(1) = std::sin(a + 0.4) * f * eps;
      }
      out.push_back(exp_map(model, p0, t * c).point);
    }
  return out;
}

double cone_distance(const Point& p, const Point& q, int n) {
  const double r1 = p.norm(), r2 = q.norm();
  const double wedge = kTwoPi / n;
  double delta = std::fmod(std::abs(std::atan2(p(1), p(0)) - std::atan2(q(1), q(0))), wedge);
  delta = std::min(delta, wedge - delta);
  return std::sqrt(std::max(0.0, r1 * r1 + r2 * r2 - 2.0 * r1 * r2 * std::cos(delta)));
}

Point dihedral_fold(const Point& p, int n) {
  const double wedge = kTwoPi / n;
  double a = std::fmod(wrap_angle(std::atan2(p(1), p(0))), wedge);
  if (a > 0.5 * wedge) a = wedge - a;
  const double r = p.norm();
  return pt({r * std::cos(a), r * std::sin(a)});
}

double polar_angle(const Point& p) { return std::acos(std::clamp(p(2), -1.0, 1.0)); }

std::size_t orbit_dimension(const GroupModel& g) {
  if (g.is_finite()) return 0;
  return g.lie_algebra().size();
}

/// Defaults shared by every plan; the builtin constructors override them.
void fill_generic(ScenarioPlan& plan, const Resolution& res) {
  const auto& m = plan.scn.manifold;
  const int n = m.ambient_dimension();
  switch (m.kind()) {
    case ManifoldKind::Euclidean:
      plan.random_bases = sample_points(m, Box{Vec::Constant(n, -1.5), Vec::Constant(n, 1.5)}, res.base_points, res.seed);
      if (n <= 2) {
        const int per = n == 1 ? 41 : 21;
        plan.dense_bases = grid_points(Vec::Constant(n, -1.0), Vec::Constant(n, 1.0), per);
        plan.dense_pitch = 2.0 / (per - 1);
        plan.strat_sample = plan.dense_bases;
        plan.strat_pitch = plan.dense_pitch;
      } else {
        plan.dense_bases = grid_points(Vec::Constant(n, -1.0), Vec::Constant(n, 1.0), 7);
        plan.dense_pitch = 2.0 / 6;
        plan.strat_sample = plan.dense_bases;
        plan.strat_pitch = plan.dense_pitch;
      }
      break;
    case ManifoldKind::Sphere:
      plan.random_bases = sample_points(m, Band{0.0, kPi}, res.base_points, res.seed);
      plan.dense_bases = sphere_grid(12, 24);
      plan.dense_pitch = kPi / 12;
      plan.strat_sample = plan.dense_bases;
      plan.strat_pitch = plan.dense_pitch;
      break;
    case ManifoldKind::Torus:
      plan.random_bases = sample_points(m, Box{Vec::Zero(n), Vec::Constant(n, kTwoPi)}, res.base_points, res.seed);
      plan.dense_bases = torus_grid(n, n == 1 ? 32 : 16);
      plan.dense_pitch = kTwoPi / (n == 1 ? 32 : 16);
      plan.strat_sample = plan.dense_bases;
      plan.strat_pitch = plan.dense_pitch;
      break;
    case ManifoldKind::Sampled:
      plan.random_bases = m.samples();
      plan.dense_bases = m.samples();
      plan.strat_sample = m.samples();
      break;
  }
  plan.exact = plan.scn.group.is_finite();
  plan.submetry_index = 0;
  plan.submetry_radii = {0.2, 0.3, 0.5};
  const bool flat = m.metric().is_constant() && m.kind() != ManifoldKind::Sphere;
  if (flat) plan.kappa = 0.0;
  if (m.is_round_sphere()) plan.kappa = 1.0;

  plan.tube_base = plan.random_bases.front();
  plan.tube_radius = 0.1;
  plan.tube_probes = tube_probes(m, plan.tube_base, plan.tube_radius);
  for (std::size_t i = 0; i < 3 && i < plan.random_bases.size(); ++i) {
    plan.slice_probes.push_back(plan.random_bases[i]);
    plan.slice_radii.push_back(0.1);
  }
  if (m.kind() == ManifoldKind::Torus)
    plan.space = CoefficientSpace::trig(n, 8);
  else
    plan.space = CoefficientSpace::polynomial(n, n <= 2 ? 8 : 6);
  plan.rips_sample = plan.random_bases;
  plan.quotient_dimension =
      std::max(0, m.dimension() - static_cast<int>(orbit_dimension(plan.scn.group)));
}

ScenarioPlan plan_for(ActionScenario scn, std::string builtin, const Resolution& res) {
  ScenarioPlan plan(std::move(scn));
  plan.builtin = std::move(builtin);
  fill_generic(plan, res);
  return plan;
}

ScenarioPlan zn_plane(int n, const Resolution& res) {
  auto plan = plan_for(make_scenario("zn_plane(" + std::to_string(n) + ")", GroupModel::cyclic_rotations(n),
                                     ManifoldModel::euclidean(2)),
                       "zn_plane(" + std::to_string(n) + ")", res);
  const double wedge = kTwoPi / n;
  plan.oracle = [n](const Point& p, const Point& q) { return cone_distance(p, q, n); };
  plan.one_step_optimal = true;
  plan.random_bases = sample_points(plan.scn.manifold, Annulus{0.5, 1.5}, res.base_points, res.seed);
  plan.dense_pitch = sector_pitch(1.6, wedge, 0.05, 600);
  plan.dense_bases = sector_grid(1.6, wedge, plan.dense_pitch, false);
  plan.submetry_index = nearest(plan.dense_bases, pt({1.0, 0.0}));
  plan.strat_sample = plane_grid();
  plan.strat_pitch = 0.1;
  const double sep = std::sin(kPi / n);
  plan.tube_base = pt({1.0, 0.0});
  plan.tube_radius = 0.5 * sep;
  plan.tube_probes = tube_probes(plan.scn.manifold, plan.tube_base, plan.tube_radius);
  plan.slice_probes = {pt({0.0, 0.0}), pt({1.0, 0.0}), pt({0.6 * std::cos(0.5 * wedge), 0.6 * std::sin(0.5 * wedge)})};
  plan.slice_radii = {0.3, std::min(0.3, 0.45 * sep), std::min(0.1, 0.25 * sep)};
  if (n == 1) plan.slice_radii = {0.3, 0.3, 0.1};
  plan.rips_sample = polar_sample(1.0, wedge, 0.2, false);
  plan.rips_scale = 0.3;
  plan.quotient_dimension = 2;
  plan.expected_betti = std::vector<long>{1, 0, 0};
  return plan;
}

ScenarioPlan dihedral_plane(int n, const Resolution& res) {
  const std::string name = "dihedral_plane(" + std::to_string(n) + ")";
  auto plan = plan_for(make_scenario(name, GroupModel::dihedral(n), ManifoldModel::euclidean(2)), name, res);
  const double wedge = kPi / n;
  plan.oracle = [n](const Point& p, const Point& q) { return (dihedral_fold(p, n) - dihedral_fold(q, n)).norm(); };
  plan.random_bases = sample_points(plan.scn.manifold, Annulus{0.5, 1.5}, res.base_points, res.seed);
  plan.dense_pitch = sector_pitch(1.6, wedge, 0.05, 600);
  plan.dense_bases = sector_grid(1.6, wedge, plan.dense_pitch, true);
  plan.submetry_index = nearest(plan.dense_bases, pt({1.0, 0.0}));
  plan.strat_sample = plane_grid();
  plan.strat_pitch = 0.1;
  const double sep = std::sin(kPi / n);
  plan.tube_base = pt({1.0, 0.0});
  plan.tube_radius = 0.5 * sep;
  plan.tube_probes = tube_probes(plan.scn.manifold, plan.tube_base, plan.tube_radius);
  const double half = 0.5 * wedge;
  plan.slice_probes = {pt({0.0, 0.0}), pt({1.0, 0.0}), pt({0.7 * std::cos(half), 0.7 * std::sin(half)})};
  plan.slice_radii = {0.3, std::min(0.3, 0.45 * sep), std::min(0.1, 0.3 * std::sin(half))};
  plan.rips_sample = polar_sample(1.0, wedge, 0.2, true);
  plan.rips_scale = 0.3;
  plan.quotient_dimension = 2;
  plan.expected_betti = std::vector<long>{1, 0, 0};
  return plan;
}

ScenarioPlan z2_reflection_plane(const Resolution& res) {
  auto plan = plan_for(make_scenario("z2_reflection_plane", GroupModel::reflection(), ManifoldModel::euclidean(2)),
                       "z2_reflection_plane", res);
  plan.oracle = [](const Point& p, const Point& q) {
    return std::hypot(p(0) - q(0), std::abs(p(1)) - std::abs(q(1)));
  };
  plan.dense_pitch = 0.05;
  plan.dense_bases.clear();
  for (int i = 0; i <= 40; ++i)
    for (int j = 0; j <= 20; ++j) plan.dense_bases.push_back(pt({-1.0 + 0.05 * i, 0.05 * j}));
  plan.submetry_index = nearest(plan.dense_bases, pt({0.0, 0.3}));
  plan.strat_sample = plane_grid();
  plan.strat_pitch = 0.1;
  plan.tube_base = pt({0.0, 1.0});
  plan.tube_radius = 0.5;
  plan.tube_probes = tube_probes(plan.scn.manifold, plan.tube_base, plan.tube_radius);
  plan.slice_probes = {pt({1.0, 0.0}), pt({0.0, 0.5}), pt({-0.5, 0.0})};
  plan.slice_radii = {0.3, 0.2, 0.3};
  plan.rips_sample.clear();
  for (int i = 0; i <= 8; ++i)
    for (int j = 0; j <= 4; ++j) plan.rips_sample.push_back(pt({-1.0 + 0.25 * i, 0.25 * j}));
  plan.rips_scale = 0.4;
  plan.quotient_dimension = 2;
  plan.expected_betti = std::vector<long>{1, 0, 0};
  return plan;
}

ScenarioPlan circle_plane(const Resolution& res) {
  auto plan = plan_for(make_scenario("circle_plane", GroupModel::plane_rotation_circle(), ManifoldModel::euclidean(2)),
                       "circle_plane", res);
  plan.oracle = [](const Point& p, const Point& q) { return std::abs(p.norm() - q.norm()); };
  plan.random_bases = sample_points(plan.scn.manifold, Annulus{0.0, 1.5}, res.base_points, res.seed);
  plan.dense_pitch = 0.02;
  plan.dense_bases.clear();
  for (int i = 0; i <= 80; ++i) plan.dense_bases.push_back(pt({0.02 * i, 0.0}));
  plan.submetry_index = 50;
  plan.strat_sample = plane_grid();
  plan.strat_pitch = 0.1;
  plan.tube_base = pt({1.0, 0.0});
  plan.tube_radius = 0.5;
  plan.tube_probes = tube_probes(plan.scn.manifold, plan.tube_base, plan.tube_radius);
  plan.slice_probes = {pt({0.0, 0.0}), pt({1.0, 0.0}), pt({0.0, -0.7})};
  plan.slice_radii = {0.4, 0.3, 0.3};
  plan.foliation_metric = MetricField::conformal(MetricField::flat(2), exp_radius_squared_field());
  plan.srf_start = std::make_pair(pt({1.0, 0.0}), Vec(pt({1.0, 0.0})));
  plan.rips_sample.clear();
  for (int i = 0; i <= 10; ++i) plan.rips_sample.push_back(pt({0.1 * i, 0.0}));
  plan.rips_scale = 0.15;
  plan.quotient_dimension = 1;
  plan.expected_betti = std::vector<long>{1, 0, 0};
  return plan;
}

ScenarioPlan circle_on_sphere(const Resolution& res) {
  auto plan = plan_for(make_scenario("circle_on_sphere", GroupModel::z_axis_circle(), ManifoldModel::sphere(2)),
                       "circle_on_sphere", res);
  plan.oracle = [](const Point& p, const Point& q) { return std::abs(polar_angle(p) - polar_angle(q)); };
  plan.dense_bases.clear();
  for (int i = 0; i <= 60; ++i) plan.dense_bases.push_back(sphere_point(kPi * i / 60, 0.0));
  plan.dense_pitch = kPi / 60;
  plan.submetry_index = 30;
  plan.tube_base = sphere_point(kPi / 3, 0.0);
  plan.tube_radius = 0.3;
  plan.tube_probes = tube_probes(plan.scn.manifold, plan.tube_base, plan.tube_radius);
  plan.slice_probes = {sphere_point(0.0, 0.0), sphere_point(0.5 * kPi, 0.0), sphere_point(1.0, 0.0)};
  plan.slice_radii = {0.3, 0.3, 0.3};
  plan.srf_start = std::make_pair(sphere_point(1.0, 0.0), Vec(pt({std::cos(1.0), 0.0, -std::sin(1.0)})));
  plan.cone_surrogate = true;
  plan.rips_sample.clear();
  for (int i = 0; i <= 12; ++i) plan.rips_sample.push_back(sphere_point(kPi * i / 12, 0.0));
  plan.rips_scale = 1.5 * kPi / 12;
  plan.quotient_dimension = 1;
  plan.expected_betti = std::vector<long>{1, 0, 0, 0};
  return plan;
}

ScenarioPlan z2_antipodal_circle(const Resolution& res) {
  auto plan = plan_for(make_scenario("z2_antipodal_circle", GroupModel::half_turn_translation(), ManifoldModel::torus(1)),
                       "z2_antipodal_circle", res);
  plan.oracle = [](const Point& p, const Point& q) {
    const double d = std::abs(angle_delta(p(0), q(0)));
    return std::min(d, kPi - d);
  };
  plan.dense_bases.clear();
  for (int i = 0; i < 60; ++i) plan.dense_bases.push_back(pt({kPi * i / 60}));
  plan.dense_pitch = kPi / 60;
  plan.submetry_index = 0;
  plan.tube_base = pt({0.5});
  plan.tube_radius = 0.6;
  plan.tube_probes = tube_probes(plan.scn.manifold, plan.tube_base, plan.tube_radius);
  plan.slice_probes = {pt({0.0}), pt({1.0}), pt({2.5})};
  plan.slice_radii = {0.3, 0.3, 0.3};
  plan.rips_sample.clear();
  for (int i = 0; i < 20; ++i) plan.rips_sample.push_back(pt({kPi * i / 20}));
  plan.rips_scale = 1.5 * kPi / 20;
  plan.quotient_dimension = 1;
  plan.expected_betti = std::vector<long>{1, 1};
  return plan;
}

ScenarioPlan z2_antipodal_sphere(const Resolution& res) {
  auto plan = plan_for(make_scenario("z2_antipodal_sphere", GroupModel::antipodal(3), ManifoldModel::sphere(2)),
                       "z2_antipodal_sphere", res);
  plan.oracle = [](const Point& p, const Point& q) {
    const double a = std::acos(std::clamp(p.dot(q), -1.0, 1.0));
    return std::min(a, kPi - a);
  };
  plan.dense_bases.clear();
  for (int i = 0; i <= 15; ++i) {
    const double phi = 0.5 * kPi * i / 15;
    const int m = i == 0 ? 1 : std::max(1, static_cast<int>(std::round(kTwoPi * std::sin(phi) / (0.5 * kPi / 15))));
    for (int j = 0; j < m; ++j) plan.dense_bases.push_back(sphere_point(phi, kTwoPi * j / m));
  }
  plan.dense_pitch = 0.5 * kPi / 15;
  plan.submetry_index = 0;
  plan.tube_base = sphere_point(0.0, 0.0);
  plan.tube_radius = 0.6;
  plan.tube_probes = tube_probes(plan.scn.manifold, plan.tube_base, plan.tube_radius);
  plan.slice_probes = {sphere_point(0.0, 0.0), sphere_point(0.5 * kPi, 0.0), sphere_point(1.0, 2.0)};
  plan.slice_radii = {0.3, 0.3, 0.3};
  plan.cone_surrogate = true;
  plan.rips_sample.clear();
  for (int i = 0; i <= 5; ++i) {
    const double phi = kPi * i / 10;
    const int m = i == 0 ? 1 : std::max(1, static_cast<int>(std::round(kTwoPi * std::sin(phi) / (kPi / 10))));
    for (int j = 0; j < m; ++j) plan.rips_sample.push_back(sphere_point(phi, kTwoPi * j / m));
  }
  plan.rips_scale = 0.5;
  plan.quotient_dimension = 2;
  plan.expected_betti = std::vector<long>{1, 0, 0, 0};
  return plan;
}

ScenarioPlan circle_on_torus2(const Resolution& res) {
  auto plan = plan_for(
      make_scenario("circle_on_torus2", GroupModel::circle_translation(pt({1.0, 1.0})), ManifoldModel::torus(2)),
      "circle_on_torus2", res);
  plan.oracle = [](const Point& p, const Point& q) {
    return std::abs(angle_delta(p(0) - p(1), q(0) - q(1))) / std::sqrt(2.0);
  };
  plan.dense_bases.clear();
  for (int i = 0; i < 60; ++i) plan.dense_bases.push_back(pt({kTwoPi * i / 60, 0.0}));
  plan.dense_pitch = kTwoPi / 60 / std::sqrt(2.0);
  plan.submetry_index = 0;
  plan.tube_base = pt({0.5, 1.0});
  plan.tube_radius = 0.5;
  plan.tube_probes = tube_probes(plan.scn.manifold, plan.tube_base, plan.tube_radius);
  plan.slice_probes = {pt({0.0, 0.0}), pt({1.0, 2.0}), pt({4.0, 0.5})};
  plan.slice_radii = {0.3, 0.3, 0.3};
  plan.srf_start = std::make_pair(pt({0.5, 1.0}), Vec(pt({1.0, -1.0}) / std::sqrt(2.0)));
  plan.rips_sample.clear();
  for (int i = 0; i < 30; ++i) plan.rips_sample.push_back(pt({kTwoPi * i / 30, 0.0}));
  plan.rips_scale = 1.5 * kTwoPi / 30 / std::sqrt(2.0);
  plan.quotient_dimension = 1;
  plan.expected_betti = std::vector<long>{1, 1, 0};
  return plan;
}

ScenarioPlan circle_on_circle(const Resolution& res) {
  auto plan = plan_for(make_scenario("circle_on_circle", GroupModel::circle_translation(pt({1.0})), ManifoldModel::torus(1)),
                       "circle_on_circle", res);
  plan.oracle = [](const Point&, const Point&) { return 0.0; };
  plan.dense_bases = {pt({0.0}), pt({1.0}), pt({2.0}), pt({3.0}), pt({4.0})};
  plan.dense_pitch = 0.0;
  plan.submetry_index = 0;
  plan.kappa.reset();
  plan.tube_base = pt({0.0});
  plan.tube_radius = 0.5;
  plan.tube_probes = tube_probes(plan.scn.manifold, plan.tube_base, plan.tube_radius);
  plan.slice_probes = {pt({0.0}), pt({2.0}), pt({4.0})};
  plan.slice_radii = {0.3, 0.3, 0.3};
  plan.rips_sample = {pt({0.0}), pt({1.3}), pt({2.6}), pt({3.9}), pt({5.2})};
  plan.rips_scale = 0.5;
  plan.quotient_dimension = 0;
  plan.expected_betti = std::vector<long>{1, 0};
  return plan;
}

const std::map<std::string, double> kDefaults = {
    {"exact_distance", 1e-9}, {"pitch_factor", 2.0}, {"averaging", 1e-12}, {"equidistance", 1e-12},
    {"srf", 1e-6},            {"cohomology", 1e-10}, {"projector", 1e-12}, {"poincare", 1e-8},
};

const std::vector<std::string> kSuites = {"metric", "stratification", "foliation", "cohomology", "triangulate", "all"};

std::string join(const std::vector<std::string>& xs) {
  std::string out;
  for (const auto& x : xs) out += (out.empty() ? "" : ", ") + x;
  return out;
}

void require_fields(const Json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw ValidationError(where + ": expected an object");
  for (const auto& [key, _] : obj.items())
    if (!allowed.count(key)) throw ValidationError(where + ": unknown field '" + key + "'");
}

Mat parse_matrix(const Json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw ValidationError(where + ": expected a nonempty matrix");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  Mat m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
      throw ValidationError(where + ": rows have different lengths");
    for (Eigen::Index k = 0; k < cols; ++k) m(i, k) = row[static_cast<std::size_t>(k)].get<double>();
  }
  return m;
}

Vec parse_vector(const Json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw ValidationError(where + ": expected a nonempty vector");
  Vec v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  return v;
}

GroupModel parse_group(const Json& j) {
  if (!j.is_object() || !j.contains("type")) throw ValidationError("group: missing 'type'");
  const auto type = j.at("type").get<std::string>();
  if (type == "finite") {
    require_fields(j, {"type", "elements"}, "group");
    std::vector<Mat> ms;
    for (const auto& e : j.at("elements")) ms.push_back(parse_matrix(e, "group.elements"));
    return GroupModel::finite_from_matrices(ms);
  }
  if (type == "generated") {
    require_fields(j, {"type", "generators"}, "group");
    std::vector<GroupElement> gens;
    for (const auto& e : j.at("generators")) gens.push_back(GroupElement::from_matrix(parse_matrix(e, "group.generators")));
    return GroupModel::generated_by(gens);
  }
  if (type == "circle") {
    require_fields(j, {"type", "generator"}, "group");
    return GroupModel::circle(parse_matrix(j.at("generator"), "group.generator"));
  }
  if (type == "circle_translation") {
    require_fields(j, {"type", "direction"}, "group");
    return GroupModel::circle_translation(parse_vector(j.at("direction"), "group.direction"));
  }
  if (type == "product") {
    require_fields(j, {"type", "factors"}, "group");
    std::vector<GroupModel> fs;
    for (const auto& f : j.at("factors")) fs.push_back(parse_group(f));
    return GroupModel::product(std::move(fs));
  }
  throw ValidationError("group: unknown type '" + type + "' (finite, generated, circle, circle_translation, product)");
}

std::optional<MetricField> parse_metric(const Json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() == "flat") return std::nullopt;
    throw ValidationError("base_metric: unknown metric '" + j.get<std::string>() + "'");
  }
  require_fields(j, {"type", "matrix"}, "base_metric");
  const auto type = j.at("type").get<std::string>();
  if (type == "flat") return std::nullopt;
  if (type == "constant") return MetricField::constant(parse_matrix(j.at("matrix"), "base_metric.matrix"));
  throw ValidationError("base_metric: unknown type '" + type + "' (flat, constant)");
}

ManifoldModel parse_manifold(const Json& j, std::optional<MetricField> metric) {
  require_fields(j, {"type", "dimension"}, "manifold");
  const auto type = j.at("type").get<std::string>();
  const int n = j.at("dimension").get<int>();
  if (n < 1) throw ValidationError("manifold: dimension must be positive");
  if (type == "euclidean") return ManifoldModel::euclidean(n, metric);
  if (type == "sphere") return ManifoldModel::sphere(n, metric);
  if (type == "torus") return ManifoldModel::torus(n, metric);
  throw ValidationError("manifold: unknown type '" + type + "' (euclidean, sphere, torus)");
}

// ---------------------------------------------------------------------------
// Suites

using Clock = std::chrono::steady_clock;

struct SuiteRun {
  const ScenarioPlan& plan;
  const RunConfig& cfg;
  RunReport& out;
  std::string suite;

  void add(VerificationReport r) {
    r.name = suite + "." + r.name;
    out.checks.push_back(std::move(r));
  }

  /// Runs f; errors become a failed check named `name`, unsupported
  /// analyses a vacuous one.
  template <class F>
  void guard(const std::string& name, F&& f) {
    const auto t0 = Clock::now();
    try {
      f();
    } catch (const UnsupportedError& e) {
      add(VerificationReport::vacuous_pass(name, 0.0, std::string("unsupported: ") + e.what()));
    } catch (const std::exception& e) {
      add(VerificationReport::failure(name, e.what()));
    }
    out.timings.emplace_back(suite + "." + name, std::chrono::duration<double>(Clock::now() - t0).count());
  }

  std::size_t haar() const { return cfg.resolution.haar; }
  std::uint64_t seed() const { return cfg.resolution.seed; }
};

Json matrix_stats(const QuotientGraph& g) {
  return {{"nodes", g.size()}, {"h", g.h}, {"distance_error", g.distance_error}};
}

void run_metric(SuiteRun& run) {
  const auto& plan = run.plan;
  const auto& scn = plan.scn;
  std::optional<QuotientGraph> g;
  run.guard("quotient_graph", [&] {
    QuotientOptions opt;
    opt.resolution = run.haar();
    g = build_quotient_graph(scn, plan.random_bases, opt);
    run.out.artifacts.push_back({"w.csv", Artifact::Kind::MatrixCsv, g->w, {}});
    run.out.artifacts.push_back({"dbar.csv", Artifact::Kind::MatrixCsv, g->dbar, {}});
  });
  if (!g) return;
  const double tol = plan.exact ? run.cfg.tol("exact_distance")
                                : run.cfg.tol("pitch_factor") * g->h + g->distance_error;

  if (plan.oracle) {
    run.guard("quotient_oracle", [&] {
      double worst = 0.0;
      Json witness;
      for (std::size_t i = 0; i < g->size(); ++i)
        for (std::size_t j = i + 1; j < g->size(); ++j) {
          const double ref = plan.oracle(plan.random_bases[i], plan.random_bases[j]);
          const double dev = std::abs(g->dbar(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) - ref);
          if (dev > worst) worst = dev, witness = {{"i", i}, {"j", j}, {"dbar", g->dbar(i, j)}, {"oracle", ref}};
        }
      auto r = VerificationReport::make("quotient_oracle", worst, tol);
      r.witness = witness;
      run.add(std::move(r));
    });
  }
  run.guard("metric_axioms", [&] {
    auto r = verify_metric_axioms(*g, 200, run.seed(), tol, plan.tube_radius);
    r.witness["graph"] = matrix_stats(*g);
    run.add(std::move(r));
  });
  run.guard("closure", [&] {
    run.add(verify_closure_dominance(*g, run.cfg.tol("exact_distance"), plan.one_step_optimal));
  });

  std::optional<QuotientGraph> dense;
  run.guard("dense_graph", [&] {
    QuotientOptions opt;
    opt.resolution = run.haar();
    opt.base_pitch = plan.dense_pitch;
    dense = build_quotient_graph(scn, plan.dense_bases, opt);
  });
  if (dense) {
    const double dtol = run.cfg.tol("pitch_factor") * dense->h + dense->distance_error;
    run.guard("submetry", [&] {
      auto r = verify_submetry(scn, *dense, plan.submetry_index, plan.submetry_radii, dtol);
      r.witness["graph"] = matrix_stats(*dense);
      run.add(std::move(r));
    });
    run.guard("length_space", [&] {
      Rng rng(run.seed() + 17);
      std::vector<std::pair<std::size_t, std::size_t>> pairs;
      for (int k = 0; k < 20 && dense->size() > 1; ++k) {
        const auto a = rng.index(dense->size());
        auto b = rng.index(dense->size());
        if (a != b) pairs.emplace_back(a, b);
      }
      run.add(verify_length_space(*dense, pairs, dtol));
    });
    if (plan.kappa)
      run.guard("alexandrov", [&] { run.add(verify_alexandrov(*dense, *plan.kappa, 100, run.seed() + 29, dtol)); });
  }

  run.guard("tube", [&] {
    const auto orbit = orbit_sample(scn, plan.tube_base, run.haar());
    std::vector<OrbitSample> probes;
    for (const auto& p : plan.tube_probes) probes.push_back(orbit_sample(scn, p, run.haar()));
    const double etol = plan.exact ? run.cfg.tol("equidistance") : orbit_spacing(scn, plan.tube_base, run.haar());
    run.add(verify_equidistance(scn, orbit, probes, plan.tube_radius, etol));
    run.add(verify_tube_invariance(scn, orbit, probes, plan.tube_radius));
  });
}

void run_stratification(SuiteRun& run) {
  const auto& plan = run.plan;
  const auto& scn = plan.scn;
  const double eps = 1.5 * plan.strat_pitch;
  std::optional<StratificationReport> weak, normal;
  run.guard("stratify", [&] {
    weak = stratify(scn, plan.strat_sample, Relation::Weak, eps, run.haar());
    normal = stratify(scn, plan.strat_sample, Relation::Normal, eps, run.haar());
  });
  if (!weak || !normal) return;

  Json table = Json::object();
  for (const auto* rep : {&*weak, &*normal}) {
    Json classes = Json::array();
    for (const auto& c : rep->classes) classes.push_back(c.describe());
    Json comps = Json::array();
    for (std::size_t c = 0; c < rep->components.size(); ++c)
      comps.push_back({{"label", rep->component_label[c]},
                       {"dimension", rep->component_dimension[c]},
                       {"points", rep->components[c].size()}});
    table[to_string(rep->relation)] = {{"epsilon", rep->epsilon},
                                       {"classes", classes},
                                       {"components", comps},
                                       {"excluded", rep->excluded.size()}};
  }
  run.out.artifacts.push_back({"strata.json", Artifact::Kind::Json, {}, table});

  for (const auto* rep : {&*weak, &*normal}) {
    const std::string name = "frontier_" + to_string(rep->relation);
    run.guard(name, [&] {
      const auto v = verify_frontier(scn, *rep, eps);
      auto r = VerificationReport::make(name, static_cast<double>(v.size()), 0.0);
      r.witness = {{"components", rep->components.size()}, {"classes", rep->class_count()}};
      if (!v.empty()) r.witness["first"] = v.front();
      run.add(std::move(r));
    });
  }
  run.guard("normal_open_closed", [&] { run.add(verify_normal_open_closed(*weak, *normal)); });
  run.guard("orbit_invariant_labels", [&] {
    const auto quad = haar_quadrature(scn.group, 8);
    std::size_t bad = 0, tested = 0;
    Json witness;
    for (std::size_t i = 0; i < plan.strat_sample.size(); i += 7) {
      const auto& p = plan.strat_sample[i];
      const auto hp = isotropy(scn, p, kIsotropyTolerance, run.haar());
      if (hp.ambiguous) continue;
      for (const auto& node : quad.nodes) {
        const auto hq = isotropy(scn, act(scn, node.element, p), kIsotropyTolerance, run.haar());
        if (hq.ambiguous) continue;
        ++tested;
        if (!weak_type_equal(hp, hq) || !conjugacy_equal(scn, hp, hq)) {
          if (bad++ == 0) witness = {{"point", std::vector<double>(p.data(), p.data() + p.size())}};
        }
      }
    }
    if (tested == 0) {
      run.add(VerificationReport::vacuous_pass("orbit_invariant_labels", 0.0, "no unambiguous probes"));
      return;
    }
    auto r = VerificationReport::make("orbit_invariant_labels", static_cast<double>(bad), 0.0);
    r.witness = witness;
    r.witness["tested"] = tested;
    run.add(std::move(r));
  });
  run.guard("conjugacy_refines_weak", [&] {
    const auto conj = stratify(scn, plan.strat_sample, Relation::Conjugacy, eps, run.haar());
    std::map<int, int> weak_of;
    std::size_t bad = 0;
    for (std::size_t i = 0; i < conj.labels.size(); ++i) {
      if (conj.labels[i] < 0 || weak->labels[i] < 0) continue;
      const auto [it, fresh] = weak_of.emplace(conj.labels[i], weak->labels[i]);
      if (!fresh && it->second != weak->labels[i]) ++bad;
    }
    auto r = VerificationReport::make("conjugacy_refines_weak", static_cast<double>(bad), 0.0);
    r.witness = {{"conjugacy_classes", conj.class_count()}, {"weak_classes", weak->class_count()}};
    run.add(std::move(r));
  });
  for (std::size_t k = 0; k < plan.slice_probes.size(); ++k) {
    const std::string name = "slice_consistency_" + std::to_string(k);
    run.guard(name, [&] {
      auto r = verify_slice_consistency(scn, plan.slice_probes[k], plan.slice_radii[k], 9, run.haar());
      r.name = name;
      run.add(std::move(r));
    });
  }
}

/// Deliberately non-invariant constant metric used to exercise averaging.
Mat skewed_metric(int n) {
  Mat s = Mat::Identity(n, n);
  for (int i = 0; i < n; ++i) s(i, i) = 1.0 + i;
  if (n >= 2) s(0, 1) = s(1, 0) = 0.3;
  return s;
}

void run_foliation(SuiteRun& run) {
  const auto& plan = run.plan;
  const auto& scn = plan.scn;
  const int n = scn.manifold.ambient_dimension();
  std::vector<Point> probes = plan.tube_probes;
  probes.push_back(plan.tube_base);

  run.guard("averaging", [&] {
    const MetricField base = MetricField::constant(skewed_metric(n));
    const MetricField avg = average_metric(scn, base, run.haar());
    const MetricField again = average_metric(scn, avg, run.haar());
    const auto quad = haar_quadrature(scn.group, run.haar());
    double inv = 0.0, idem = 0.0;
    for (const auto& x : probes) {
      const Mat gx = avg.at(x);
      idem = std::max(idem, (again.at(x) - gx).cwiseAbs().maxCoeff());
      for (std::size_t k = 0; k < quad.nodes.size(); k += std::max<std::size_t>(1, quad.nodes.size() / 24)) {
        const auto& l = quad.nodes[k].element.linear;
        const Mat pulled = l.transpose() * avg.at(act(scn, quad.nodes[k].element, x)) * l;
        inv = std::max(inv, (pulled - gx).cwiseAbs().maxCoeff());
      }
    }
    run.add(VerificationReport::make("averaged_metric_invariance", inv, run.cfg.tol("averaging")));
    run.add(VerificationReport::make("averaging_idempotence", idem, run.cfg.tol("averaging")));
  });

  const MetricField working = plan.foliation_metric ? *plan.foliation_metric : scn.manifold.metric();
  run.guard("transversal_invariance", [&] {
    std::vector<OrbitSample> orbits;
    for (const auto& p : probes) orbits.push_back(orbit_sample(scn, p, run.haar()));
    run.add(verify_transversal_invariance(scn, working, orbits, run.cfg.tol("averaging"), run.haar()));
  });
  run.guard("proper_function_invariance", [&] {
    if (scn.manifold.kind() == ManifoldKind::Torus) {
      run.add(VerificationReport::vacuous_pass("proper_function_invariance", run.cfg.tol("averaging"),
                                               "compact manifold: constants are proper"));
      return;
    }
    const double d = invariance_defect(scn, radius_squared_field(), probes, run.haar());
    run.add(VerificationReport::make("proper_function_invariance", d, run.cfg.tol("averaging")));
  });
  run.guard("srf_perpendicularity", [&] {
    if (!plan.srf_start || scn.group.is_finite()) {
      run.add(VerificationReport::vacuous_pass("srf_perpendicularity", run.cfg.tol("srf"),
                                               scn.group.is_finite() ? "discrete orbits" : "no normal direction"));
      return;
    }
    const auto res = srf_perpendicularity(scn, working, plan.srf_start->first, plan.srf_start->second, 2.0, 1e-3,
                                          run.cfg.tol("srf"));
    if (res.vacuous) {
      run.add(VerificationReport::vacuous_pass("srf_perpendicularity", run.cfg.tol("srf"), "discrete orbits"));
      return;
    }
    auto r = VerificationReport::make("srf_perpendicularity", res.max_deviation, run.cfg.tol("srf"));
    r.witness = {{"samples", res.samples}, {"truncated", res.truncated}};
    run.add(std::move(r));
  });
}

/// Merges nodes at quotient distance <= 1e-9 (identified orbits).
Mat merged_distances(const Mat& d) {
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < d.rows(); ++i) {
    bool dup = false;
    for (auto k : keep)
      if (d(i, k) <= 1e-9) dup = true;
    if (!dup) keep.push_back(i);
  }
  Mat out(keep.size(), keep.size());
  for (std::size_t a = 0; a < keep.size(); ++a)
    for (std::size_t b = 0; b < keep.size(); ++b) out(a, b) = d(keep[a], keep[b]);
  return out;
}

struct RipsResult {
  SimplicialComplex complex;
  std::vector<long> betti;
  Mat distances;
};

RipsResult quotient_rips(const SuiteRun& run) {
  const auto& plan = run.plan;
  QuotientOptions opt;
  opt.resolution = run.haar();
  const auto g = build_quotient_graph(plan.scn, plan.rips_sample, opt);
  RipsResult out;
  out.distances = merged_distances(g.dbar);
  double scale = run.cfg.rips_scale.value_or(plan.rips_scale);
  if (scale <= 0.0) {
    // 1.5 times the largest nearest-neighbour distance.
    double worst = 0.0;
    for (Eigen::Index i = 0; i < out.distances.rows(); ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (Eigen::Index j = 0; j < out.distances.cols(); ++j)
        if (j != i) best = std::min(best, out.distances(i, j));
      if (std::isfinite(best)) worst = std::max(worst, best);
    }
    scale = 1.5 * worst + 1e-12;
  }
  out.complex = build_rips(out.distances, scale, std::min(plan.quotient_dimension + 1, 3));
  out.betti = betti_numbers(out.complex);
  out.betti.resize(static_cast<std::size_t>(plan.quotient_dimension) + 1, 0);
  return out;
}

std::vector<long> padded(std::vector<long> v, std::size_t n) {
  v.resize(std::max(v.size(), n), 0);
  return v;
}

VerificationReport compare_betti(const std::string& name, const std::vector<long>& got, const std::vector<long>& want) {
  const std::size_t n = std::max(got.size(), want.size());
  const auto a = padded(got, n), b = padded(want, n);
  long dev = 0;
  for (std::size_t k = 0; k < n; ++k) dev += std::abs(a[k] - b[k]);
  auto r = VerificationReport::make(name, static_cast<double>(dev), 0.0);
  r.witness = {{"betti", got}, {"expected", want}};
  return r;
}

void run_cohomology(SuiteRun& run) {
  const auto& plan = run.plan;
  const auto& scn = plan.scn;
  const auto space = run.cfg.cutoff ? plan.space.with_cutoff(*run.cfg.cutoff) : plan.space;
  std::optional<BasicComplex> c;
  run.guard("basic_complex", [&] { c = basic_complex(scn, space, plan.cone_surrogate); });
  if (!c) return;
  const double tol = run.cfg.tol("cohomology");
  run.add(VerificationReport::make("d_squared", c->dd_max, tol));
  run.add(VerificationReport::make("projector_idempotence", c->idempotence_max, run.cfg.tol("projector")));
  run.add(VerificationReport::make("projector_commutator", c->commutator_max, tol));
  run.add(VerificationReport::make("differential_preserves_basic", c->preservation_max, tol));
  run.guard("poincare_lemma", [&] { run.add(verify_poincare_lemma(*c, run.cfg.tol("poincare"))); });
  run.guard("betti_stability", [&] {
    const auto next = basic_betti(scn, space.with_cutoff(space.cutoff + 2), plan.cone_surrogate);
    auto r = compare_betti("betti_stability", c->betti, next);
    r.witness["cutoff"] = space.cutoff;
    run.add(std::move(r));
  });
  if (plan.expected_betti) run.add(compare_betti("expected_betti", c->betti, *plan.expected_betti));

  Json dims = Json::array();
  for (std::size_t k = 0; k < c->bases.size(); ++k)
    dims.push_back({{"degree", k}, {"forms", c->bases[k].size()}, {"basic", c->basic[k].cols()}});
  Json table = {{"space", space.describe()},
                {"betti", c->betti},
                {"betti_by_grade", c->betti_by_grade},
                {"dimensions", dims},
                {"max_grade", c->max_grade},
                {"min_nonzero_singular", c->min_nonzero_singular},
                {"warnings", c->warnings}};

  run.guard("derham_compare", [&] {
    const auto rips = quotient_rips(run);
    table["rips_betti"] = rips.betti;
    auto r = derham_compare(c->betti, rips.betti);
    r.name = "derham_compare";
    run.add(std::move(r));
  });
  run.out.artifacts.push_back({"betti.json", Artifact::Kind::Json, {}, table});
}

void run_triangulate(SuiteRun& run) {
  const auto& plan = run.plan;
  std::optional<RipsResult> rips;
  run.guard("rips", [&] { rips = quotient_rips(run); });
  if (!rips) return;
  const auto& k = rips->complex;
  run.out.artifacts.push_back({"rips_complex.json", Artifact::Kind::Json, {}, k.to_json()});
  run.out.artifacts.push_back({"rips_distances.csv", Artifact::Kind::MatrixCsv, rips->distances, {}});
  run.out.artifacts.push_back(
      {"rips_betti.json", Artifact::Kind::Json, {}, Json{{"betti", rips->betti}, {"simplices", k.size()}}});

  if (plan.expected_betti) {
    auto want = *plan.expected_betti;
    want.resize(rips->betti.size(), 0);
    run.add(compare_betti("rips_betti", rips->betti, want));
  }
  run.guard("subdivision", [&] {
    const auto sd = barycentric_subdivide(k);
    auto r = VerificationReport::make(
        "subdivision_euler", static_cast<double>(std::abs(sd.euler_characteristic() - k.euler_characteristic())), 0.0);
    r.witness = {{"chi", k.euler_characteristic()}, {"chi_subdivided", sd.euler_characteristic()}};
    run.add(std::move(r));
    auto b = betti_numbers(sd);
    b.resize(rips->betti.size(), 0);
    auto full = betti_numbers(k);
    full.resize(rips->betti.size(), 0);
    run.add(compare_betti("subdivision_betti", b, full));
  });
  run.guard("nerve_isomorphism", [&] {
    const auto n = nerve(star_cover(k));
    const auto iso = find_isomorphism(n, k);
    if (!iso) {
      run.add(VerificationReport::failure("nerve_isomorphism", "nerve of the star cover is not isomorphic to K"));
      return;
    }
    auto r = VerificationReport::make("nerve_isomorphism", 0.0, 0.0);
    r.witness = {{"vertices", k.vertex_count()}, {"simplices", k.size()}};
    run.add(std::move(r));
  });
}

}  // namespace

std::vector<std::string> builtin_names() {
  return {"zn_plane(n)",     "dihedral_plane(n)",   "z2_reflection_plane", "circle_plane",     "circle_on_sphere",
          "z2_antipodal_circle", "z2_antipodal_sphere", "circle_on_torus2", "circle_on_circle"};
}

ScenarioPlan make_builtin(const std::string& name, const Resolution& res) {
  static const std::regex family(R"(^(zn_plane|dihedral_plane)\((\d+)\)$)");
  std::smatch m;
  if (std::regex_match(name, m, family)) {
    const int n = std::stoi(m[2].str());
    if (m[1] == "zn_plane") {
      if (n < 1) throw ValidationError("zn_plane(n): n must be at least 1");
      return zn_plane(n, res);
    }
    if (n < 2) throw ValidationError("dihedral_plane(n): n must be at least 2");
    return dihedral_plane(n, res);
  }
  if (name == "z2_reflection_plane") return z2_reflection_plane(res);
  if (name == "circle_plane") return circle_plane(res);
  if (name == "circle_on_sphere") return circle_on_sphere(res);
  if (name == "z2_antipodal_circle") return z2_antipodal_circle(res);
  if (name == "z2_antipodal_sphere") return z2_antipodal_sphere(res);
  if (name == "circle_on_torus2") return circle_on_torus2(res);
  if (name == "circle_on_circle") return circle_on_circle(res);
  throw ValidationError("unknown builtin '" + name + "'; valid builtins: " + join(builtin_names()));
}

const std::map<std::string, double>& default_tolerances() { return kDefaults; }

double RunConfig::tol(const std::string& key) const {
  if (auto it = tolerances.find(key); it != tolerances.end()) return it->second;
  return kDefaults.at(key);
}

ScenarioPlan make_inline(const Json& spec, const Resolution& res) {
  require_fields(spec, {"name", "group", "manifold", "base_metric"}, "scenario");
  if (!spec.contains("group") || !spec.contains("manifold")) throw ValidationError("scenario: needs group and manifold");
  const std::string name = spec.value("name", "inline");
  std::optional<MetricField> base;
  if (spec.contains("base_metric")) base = parse_metric(spec.at("base_metric"));
  auto group = parse_group(spec.at("group"));
  auto manifold = parse_manifold(spec.at("manifold"), base);
  auto scn = make_scenario(name, std::move(group), manifold);
  if (!scn.base_metric.is_flat()) scn.manifold = scn.manifold.with_metric(average_metric(scn, scn.base_metric, res.haar));
  return plan_for(std::move(scn), "inline", res);
}

LoadedScenario load_config(const Json& config) {
  require_fields(config, {"scenario", "seed", "resolution", "tolerances", "outputs", "cohomology", "triangulate"},
                 "config");
  if (!config.contains("seed")) throw ValidationError("config: 'seed' is required");
  if (!config.contains("scenario")) throw ValidationError("config: 'scenario' is required");
  RunConfig cfg;
  const auto& seed = config.at("seed");
  if (!seed.is_number_integer() || (!seed.is_number_unsigned() && seed.get<std::int64_t>() < 0))
    throw ValidationError("config: 'seed' must be an unsigned integer");
  cfg.resolution.seed = seed.get<std::uint64_t>();
  if (config.contains("resolution")) {
    const auto& r = config.at("resolution");
    require_fields(r, {"haar", "base_points"}, "resolution");
    if (r.contains("haar")) cfg.resolution.haar = r.at("haar").get<std::size_t>();
    if (r.contains("base_points")) cfg.resolution.base_points = r.at("base_points").get<std::size_t>();
    if (cfg.resolution.haar < 8) throw ValidationError("resolution.haar must be at least 8");
    if (cfg.resolution.base_points < 3) throw ValidationError("resolution.base_points must be at least 3");
  }
  if (config.contains("tolerances")) {
    const auto& t = config.at("tolerances");
    if (!t.is_object()) throw ValidationError("tolerances: expected an object");
    for (const auto& [key, value] : t.items()) {
      if (!kDefaults.count(key)) {
        std::vector<std::string> keys;
        for (const auto& [k, _] : kDefaults) keys.push_back(k);
        throw ValidationError("tolerances: unknown field '" + key + "'; valid: " + join(keys));
      }
      if (!value.is_number() || !(value.get<double>() > 0.0))
        throw ValidationError("tolerances: '" + key + "' must be positive");
      cfg.tolerances[key] = value.get<double>();
    }
  }
  if (config.contains("outputs")) cfg.outputs = config.at("outputs").get<std::string>();
  if (config.contains("cohomology")) {
    const auto& c = config.at("cohomology");
    require_fields(c, {"cutoff"}, "cohomology");
    if (c.contains("cutoff")) {
      cfg.cutoff = c.at("cutoff").get<int>();
      if (*cfg.cutoff < 1) throw ValidationError("cohomology.cutoff must be positive");
    }
  }
  if (config.contains("triangulate")) {
    const auto& t = config.at("triangulate");
    require_fields(t, {"scale"}, "triangulate");
    if (t.contains("scale")) {
      cfg.rips_scale = t.at("scale").get<double>();
      if (!(*cfg.rips_scale > 0.0)) throw ValidationError("triangulate.scale must be positive");
    }
  }
  const auto& s = config.at("scenario");
  auto plan = s.is_string() ? make_builtin(s.get<std::string>(), cfg.resolution) : make_inline(s, cfg.resolution);
  return LoadedScenario{std::move(plan), std::move(cfg)};
}

LoadedScenario load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config '" + path + "'");
  Json j;
  try {
    in >> j;
  } catch (const Json::parse_error& e) {
    throw ValidationError("config '" + path + "': " + e.what());
  }
  return load_config(j);
}

std::vector<std::string> suite_names() { return kSuites; }

bool RunReport::overall() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.vacuous || c.pass; });
}

RunReport run_suite(const ScenarioPlan& plan, const RunConfig& config, const std::string& suite) {
  if (std::find(kSuites.begin(), kSuites.end(), suite) == kSuites.end())
    throw ValidationError("unknown suite '" + suite + "'; valid suites: " + join(kSuites));
  RunReport out;
  out.scenario = plan.builtin == "inline" ? plan.scn.name : plan.builtin;
  out.suite = suite;
  out.seed = config.resolution.seed;
  const std::vector<std::string> parts =
      suite == "all" ? std::vector<std::string>(kSuites.begin(), kSuites.end() - 1) : std::vector<std::string>{suite};
  for (const auto& part : parts) {
    SuiteRun run{plan, config, out, part};
    if (part == "metric") run_metric(run);
    if (part == "stratification") run_stratification(run);
    if (part == "foliation") run_foliation(run);
    if (part == "cohomology") run_cohomology(run);
    if (part == "triangulate") run_triangulate(run);
  }
  return out;
}

}  // namespace orbitspace

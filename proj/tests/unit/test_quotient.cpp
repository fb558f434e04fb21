#include "orbitspace/quotient.hpp"

#include <doctest.h>

#include <cmath>

using namespace orbitspace;

namespace {

Point p2(double x, double y) {
  Point p(2);
  p << x, y;
  return p;
}

// Cone of angle 2 pi / n, unrolled: law of cosines with the reduced angle.
double cone(const Point& a, const Point& b, int n) {
  double best = 1e300;
  for (int k = 0; k < n; ++k) {
    const double t = kTwoPi * k / n;
    const Point r = p2(std::cos(t) * b(0) - std::sin(t) * b(1), std::sin(t) * b(0) + std::cos(t) * b(1));
    best = std::min(best, (a - r).norm());
  }
  return best;
}

ActionScenario zn(int n) { return make_scenario("zn", GroupModel::cyclic_rotations(n), ManifoldModel::euclidean(2)); }

}  // namespace

TEST_CASE("quotient distances of Z_n agree with rotation minimisation") {
  for (int n : {2, 3, 5, 6}) {
    const auto scn = zn(n);
    const auto bases = sample_points(scn.manifold, Annulus{0.2, 1.5}, 25, 10 + n);
    const auto g = build_quotient_graph(scn, bases);
    REQUIRE(g.has_closure());
    for (std::size_t i = 0; i < bases.size(); ++i)
      for (std::size_t j = 0; j < bases.size(); ++j)
        CHECK(std::abs(g.dbar(i, j) - cone(bases[i], bases[j], n)) < 1e-9);
  }
}

TEST_CASE("closure repairs a one-step matrix that violates the triangle inequality") {
  // Non-invariant metric: the one-step set distance is not a metric.
  Mat s(2, 2);
  s << 1.0, 0.9, 0.9, 1.0;
  const auto scn =
      make_scenario("skew", GroupModel::reflection(), ManifoldModel::euclidean(2, MetricField::constant(s)));
  const auto g = build_quotient_graph(scn, {p2(0, 0), p2(1, -1), p2(2, 0)});
  CHECK(triangle_excess(g.w, 200, 1).worst > 1e-3);
  CHECK(triangle_excess(g.dbar, 200, 1).worst <= 1e-12);
  CHECK(verify_closure_dominance(g, 1e-12, false).pass);
  CHECK_FALSE(verify_closure_dominance(g, 1e-12, true).pass);
}

TEST_CASE("metric axioms and closure equality on Z_4") {
  const auto scn = zn(4);
  const auto g = build_quotient_graph(scn, sample_points(scn.manifold, Annulus{0.5, 1.5}, 30, 3));
  CHECK(verify_metric_axioms(g, 200, 7, 1e-9, 0.5).pass);
  CHECK(verify_closure_dominance(g, 1e-9, true).pass);
}

TEST_CASE("graphs without closure answer single-source queries") {
  const auto scn = zn(3);
  const auto bases = sample_points(scn.manifold, Annulus{0.5, 1.5}, 20, 8);
  QuotientOptions opt;
  opt.closure = false;
  const auto open = build_quotient_graph(scn, bases, opt);
  const auto full = build_quotient_graph(scn, bases);
  CHECK_FALSE(open.has_closure());
  CHECK((open.distances_from(4) - full.dbar.row(4).transpose()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("circle quotients carry the orbit spacing in h") {
  const auto scn = make_scenario("c", GroupModel::plane_rotation_circle(), ManifoldModel::euclidean(2));
  QuotientOptions opt;
  opt.resolution = 90;
  const auto g = build_quotient_graph(scn, {p2(0.5, 0), p2(0, 1.2), p2(-0.3, 0.1)}, opt);
  CHECK(g.h == doctest::Approx(kTwoPi / 90 * 1.2));
  CHECK(std::abs(g.dbar(0, 1) - 0.7) <= g.h);
  CHECK(orbit_spacing(zn(3), p2(1, 0), 10) == 0.0);
}

TEST_CASE("model comparison distances") {
  // Equilateral triangle: vertex to opposite midpoint.
  CHECK(comparison_distance(0.0, 1.0, 1.0, 1.0, 0.5) == doctest::Approx(std::sqrt(3.0) / 2.0));
  // Small triangles are nearly Euclidean for any curvature.
  const double e = comparison_distance(0.0, 0.01, 0.012, 0.013, 0.004);
  CHECK(comparison_distance(1.0, 0.01, 0.012, 0.013, 0.004) == doctest::Approx(e).epsilon(1e-4));
  CHECK(comparison_distance(-1.0, 0.01, 0.012, 0.013, 0.004) == doctest::Approx(e).epsilon(1e-4));
  // With the sides fixed, positive curvature fattens the triangle and negative thins it.
  CHECK(comparison_distance(1.0, 1.0, 1.0, 1.0, 0.5) > std::sqrt(3.0) / 2.0);
  CHECK(comparison_distance(-1.0, 1.0, 1.0, 1.0, 0.5) < std::sqrt(3.0) / 2.0);
  // Spherical equilateral triangle of side pi/2: the median is pi/2.
  CHECK(comparison_distance(1.0, kPi / 2, kPi / 2, kPi / 2, kPi / 4) == doctest::Approx(kPi / 2));
}

TEST_CASE("alexandrov comparison passes for the true bound and fails above it") {
  const auto sphere = make_scenario("s2", GroupModel::trivial(3), ManifoldModel::sphere(2));
  std::vector<Point> pts;
  for (int i = 1; i < 24; ++i)
    for (int j = 0; j < 48; ++j) {
      const double phi = kPi * i / 24, th = kTwoPi * j / 48;
      Point p(3);
      p << std::sin(phi) * std::cos(th), std::sin(phi) * std::sin(th), std::cos(phi);
      pts.push_back(p);
    }
  QuotientOptions opt;
  opt.base_pitch = kPi / 24;
  const auto g = build_quotient_graph(sphere, pts, opt);
  CHECK(verify_alexandrov(g, 1.0, 60, 2, 2.0 * g.h).pass);
  CHECK_FALSE(verify_alexandrov(g, 6.0, 60, 2, 2.0 * g.h).pass);
}

TEST_CASE("submetry, length space and tubes on Z_4") {
  const auto scn = zn(4);
  std::vector<Point> grid;
  for (int i = -30; i <= 30; ++i)
    for (int j = -30; j <= 30; ++j) {
      const Point p = p2(0.05 * i, 0.05 * j);
      const double a = std::atan2(p(1), p(0));
      if (p.norm() <= 1.5 && (p.norm() < 1e-12 || (a >= 0 && a < kPi / 2 - 1e-12))) grid.push_back(p);
    }
  QuotientOptions opt;
  opt.base_pitch = 0.05;
  const auto g = build_quotient_graph(scn, grid, opt);
  std::size_t p = 0;
  for (std::size_t i = 0; i < grid.size(); ++i)
    if ((grid[i] - p2(1, 0)).norm() < 1e-9) p = i;
  CHECK(verify_submetry(scn, g, p, {0.2, 0.3, 0.5}, 2 * g.h).pass);
  CHECK(verify_submetry(scn, g, p, {0.01}, 2 * g.h).vacuous);
  CHECK(verify_length_space(g, {{0, 5}, {10, 200}, {3, 150}}, 2 * g.h).pass);
  CHECK(verify_alexandrov(g, 0.0, 50, 4, 2 * g.h).pass);

  const auto orbit = orbit_sample(scn, p2(1, 0));
  std::vector<OrbitSample> probes;
  for (double r : {0.1, 0.2, 0.3, 0.6})
    for (double a : {0.0, 1.0, 2.0}) probes.push_back(orbit_sample(scn, p2(1 + r * std::cos(a), r * std::sin(a))));
  CHECK(verify_equidistance(scn, orbit, probes, 0.35, 1e-12).pass);
  CHECK(verify_tube_invariance(scn, orbit, probes, 0.35).pass);
}

TEST_CASE("length space check flags under-sampled graphs") {
  const auto scn = zn(2);
  const auto g = build_quotient_graph(scn, {p2(1, 0), p2(0, 1)});
  const auto r = verify_length_space(g, {{0, 1}}, 1e-3);
  CHECK_FALSE(r.pass);
  CHECK(r.note.find("under-sampled") != std::string::npos);
}

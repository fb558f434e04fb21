#include "orbitspace/geometry.hpp"

#include <doctest.h>

#include <cmath>

using namespace orbitspace;

namespace {

Point p2(double x, double y) {
  Point p(2);
  p << x, y;
  return p;
}

Point p3(double x, double y, double z) {
  Point p(3);
  p << x, y, z;
  return p;
}

}  // namespace

TEST_CASE("angle helpers") {
  CHECK(wrap_angle(-0.5) == doctest::Approx(kTwoPi - 0.5));
  CHECK(wrap_angle(kTwoPi) == 0.0);
  CHECK(angle_delta(0.1, kTwoPi - 0.1) == doctest::Approx(0.2));
  CHECK(angle_delta(kPi, 0.0) == doctest::Approx(kPi));
  CHECK(angle_delta(0.0, kPi) == doctest::Approx(kPi));
}

TEST_CASE("group elements compose and invert") {
  Mat r(2, 2);
  r << std::cos(0.7), -std::sin(0.7), std::sin(0.7), std::cos(0.7);
  const auto g = GroupElement::from_matrix(r);
  const auto id = g.compose(g.inverse());
  CHECK(id.approx_equal(GroupElement::identity(2), 1e-14));
  const auto t = GroupElement::translation(p2(1.0, 2.0));
  CHECK(t.has_shift());
  CHECK((t.compose(t).apply(p2(0, 0)) - p2(2, 4)).norm() < 1e-15);
}

TEST_CASE("euclidean distance under a constant metric") {
  Mat s(2, 2);
  s << 2.0, 0.5, 0.5, 1.0;
  const auto m = ManifoldModel::euclidean(2, MetricField::constant(s));
  const Point p = p2(0.3, -0.2), q = p2(-1.0, 0.7);
  const Vec d = q - p;
  const double expected = std::sqrt(2.0 * d(0) * d(0) + 2 * 0.5 * d(0) * d(1) + d(1) * d(1));
  const auto r = geodesic_distance(m, p, q);
  CHECK(!r.graph_based);
  CHECK(r.length == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("sphere distance matches the atan2 great-circle formula") {
  const auto s = ManifoldModel::sphere(2);
  Rng rng(5);
  for (int k = 0; k < 50; ++k) {
    Point a = p3(rng.normal(), rng.normal(), rng.normal()).normalized();
    Point b = p3(rng.normal(), rng.normal(), rng.normal()).normalized();
    const double oracle = std::atan2(Eigen::Vector3d(a).cross(Eigen::Vector3d(b)).norm(), a.dot(b));
    CHECK(geodesic_distance(s, a, b).length == doctest::Approx(oracle).epsilon(1e-12));
  }
  CHECK_THROWS_AS(geodesic_distance(s, p3(1, 1, 0), p3(0, 0, 1)), DomainError);
}

TEST_CASE("torus distance is the minimum over lattice translates") {
  const auto t = ManifoldModel::torus(2);
  Rng rng(9);
  for (int k = 0; k < 50; ++k) {
    const Point a = p2(rng.uniform(0, kTwoPi), rng.uniform(0, kTwoPi));
    const Point b = p2(rng.uniform(0, kTwoPi), rng.uniform(0, kTwoPi));
    double best = 1e9;
    for (int i = -2; i <= 2; ++i)
      for (int j = -2; j <= 2; ++j) best = std::min(best, (b + p2(kTwoPi * i, kTwoPi * j) - a).norm());
    CHECK(geodesic_distance(t, a, b).length == doctest::Approx(best).epsilon(1e-12));
  }
}

TEST_CASE("exp_map on the round sphere travels |v| along a great circle") {
  const auto s = ManifoldModel::sphere(2);
  const Point p = p3(0, 0, 1);
  const Vec v = p3(0.4, 0.3, 0.0);
  const auto e = exp_map(s, p, v);
  CHECK(std::abs(e.point.norm() - 1.0) < 1e-14);
  CHECK(geodesic_distance(s, p, e.point).length == doctest::Approx(0.5).epsilon(1e-13));
  CHECK_FALSE(e.beyond_injectivity);
  CHECK(exp_map(s, p, p3(4.0, 0, 0)).beyond_injectivity);
}

TEST_CASE("exp_map on the torus wraps into the fundamental domain") {
  const auto t = ManifoldModel::torus(1);
  Point p(1);
  p << 6.0;
  Vec v(1);
  v << 1.0;
  CHECK(exp_map(t, p, v).point(0) == doctest::Approx(7.0 - kTwoPi));
}

TEST_CASE("christoffel symbols of a conformal metric") {
  // g = exp(|x|^2) I = e^{2 phi} I with phi = |x|^2 / 2, so
  // Gamma^k_ij = delta_ik x_j + delta_jk x_i - delta_ij x_k.
  const auto m = ManifoldModel::euclidean(2, MetricField::conformal(MetricField::flat(2), exp_radius_squared_field()));
  const Point x = p2(0.4, -0.3);
  const auto gamma = christoffel(m, x);
  for (int k = 0; k < 2; ++k)
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        const double oracle = (i == k ? x(j) : 0.0) + (j == k ? x(i) : 0.0) - (i == j ? x(k) : 0.0);
        CHECK(gamma[static_cast<std::size_t>(k)](i, j) == doctest::Approx(oracle).epsilon(1e-7));
      }
}

TEST_CASE("geodesics of the flat plane are straight lines") {
  const auto m = ManifoldModel::euclidean(2);
  const auto path = geodesic_trace(m, p2(0.1, 0.2), p2(1.0, -0.5), 1.0, 0.01);
  CHECK((path.end() - p2(1.1, -0.3)).norm() < 1e-12);
}

TEST_CASE("geodesic integrator conserves speed on a conformal metric") {
  const auto m = ManifoldModel::euclidean(2, MetricField::conformal(MetricField::flat(2), exp_radius_squared_field()));
  const auto path = geodesic_trace(m, p2(0.5, 0.0), p2(0.2, 0.7), 1.0, 1e-3);
  CHECK_FALSE(path.truncated);
  CHECK(speed_drift(m, path) < 1e-8);
  CHECK(geodesic_residual(m, path) < 1e-4);
}

TEST_CASE("rescaled metric divides by one plus the squared gradient norm") {
  Mat s = 1.5 * Mat::Identity(2, 2);
  const auto g = MetricField::rescaled(MetricField::constant(s), radius_squared_field());
  const Point x = p2(0.6, 0.8);
  // |grad f|^2 in the metric 1.5 I is |2x|^2 / 1.5.
  const double factor = 1.0 / (1.0 + 4.0 / 1.5);
  CHECK((g.at(x) - factor * s).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("metrics reject non positive definite values") {
  Mat bad(2, 2);
  bad << 1.0, 2.0, 2.0, 1.0;
  CHECK_THROWS_AS(MetricField::constant(bad).at(p2(0, 0)), DomainError);
}

TEST_CASE("grids and samples") {
  const auto g = grid_points(Vec::Constant(2, -1.0), Vec::Constant(2, 1.0), 5);
  CHECK(g.size() == 25);
  CHECK((g.front() - p2(-1, -1)).norm() == 0.0);
  CHECK((g.back() - p2(1, 1)).norm() == 0.0);

  const auto m = ManifoldModel::euclidean(2);
  const auto a = sample_points(m, Annulus{0.5, 1.5}, 30, 4);
  const auto b = sample_points(m, Annulus{0.5, 1.5}, 30, 4);
  REQUIRE(a.size() == 30);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i] == b[i]);
    CHECK(a[i].norm() >= 0.5 - 1e-12);
    CHECK(a[i].norm() <= 1.5 + 1e-12);
  }
  const auto s = sample_points(ManifoldModel::sphere(2), Band{0.2, 0.4}, 20, 1);
  for (const auto& p : s) {
    const double phi = std::acos(p(2));
    CHECK(phi >= 0.2 - 1e-12);
    CHECK(phi <= 0.4 + 1e-12);
  }
}

TEST_CASE("graph distance approximates the plane within its bound") {
  const auto m = ManifoldModel::euclidean(2, MetricField::conformal(MetricField::flat(2), constant_field(1.0)));
  const auto r = graph_geodesic_distance(m, p2(0, 0), p2(1, 0));
  CHECK(r.graph_based);
  CHECK(std::abs(r.length - 1.0) <= r.error_bound + 1e-12);
}

#include "orbitspace/group.hpp"
#include "orbitspace/kernels.hpp"

#include <doctest.h>

#include <cmath>

using namespace orbitspace;
using namespace orbitspace::kernels;

namespace {

Mat random_cloud(Rng& rng, int dim, int n, double scale) {
  Mat c(dim, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < dim; ++i) c(i, j) = rng.uniform(0.0, scale);
  return c;
}

double brute_chord(const Mat& a, const Mat& b, const Mat& s) {
  double best = 1e300;
  for (Eigen::Index i = 0; i < a.cols(); ++i)
    for (Eigen::Index j = 0; j < b.cols(); ++j) {
      const Vec d = a.col(i) - b.col(j);
      best = std::min(best, std::sqrt(d.dot(s * d)));
    }
  return best;
}

Mat random_weights(Rng& rng, int n) {
  Mat w(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) w(i, j) = w(j, i) = i == j ? 0.0 : rng.uniform(0.1, 3.0);
  return w;
}

}  // namespace

TEST_CASE("haar_average: serial and parallel agree bit for bit") {
  const auto q = haar_quadrature(GroupModel::plane_rotation_circle(), 97);
  Mat s(2, 2);
  s << 3.0, 0.4, 0.4, 1.0;
  const Mat a = haar_average(q.weighted(), s, Backend::Serial);
  const Mat b = haar_average(q.weighted(), s, Backend::Parallel);
  CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
  CHECK(a(0, 0) == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(std::abs(a(0, 1)) < 1e-13);
}

TEST_CASE("set_distance_matrix: euclidean metric against brute force") {
  Rng rng(2);
  OrbitClouds oc;
  oc.kind = ChartKind::Euclidean;
  oc.metric.resize(2, 2);
  oc.metric << 2.0, 0.3, 0.3, 1.0;
  for (int k = 0; k < 7; ++k) oc.clouds.push_back(random_cloud(rng, 2, 5 + k, 2.0));
  const Mat a = set_distance_matrix(oc, Backend::Serial);
  const Mat b = set_distance_matrix(oc, Backend::Parallel);
  CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
  for (int i = 0; i < 7; ++i)
    for (int j = 0; j < 7; ++j)
      if (i != j) CHECK(a(i, j) == doctest::Approx(brute_chord(oc.clouds[i], oc.clouds[j], oc.metric)).epsilon(1e-12));
}

TEST_CASE("set_distance_matrix: round sphere uses arc length") {
  Rng rng(3);
  OrbitClouds oc;
  oc.kind = ChartKind::RoundSphere;
  for (int k = 0; k < 4; ++k) {
    Mat c(3, 3);
    for (int j = 0; j < 3; ++j) {
      Vec v(3);
      v << rng.normal(), rng.normal(), rng.normal();
      c.col(j) = v.normalized();
    }
    oc.clouds.push_back(c);
  }
  const Mat d = set_distance_matrix(oc, Backend::Serial);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      if (i == j) continue;
      double best = 1e9;
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
          best = std::min(best, std::acos(std::clamp(oc.clouds[i].col(a).dot(oc.clouds[j].col(b)), -1.0, 1.0)));
      CHECK(d(i, j) == doctest::Approx(best).epsilon(1e-9));
    }
}

TEST_CASE("set_distance_matrix: flat torus wraps, including skewed metrics") {
  Rng rng(4);
  for (int variant = 0; variant < 2; ++variant) {
    OrbitClouds oc;
    oc.kind = ChartKind::FlatTorus;
    oc.metric = Mat::Identity(2, 2);
    if (variant == 1) oc.metric << 1.0, 0.4, 0.4, 1.0;
    for (int k = 0; k < 5; ++k) oc.clouds.push_back(random_cloud(rng, 2, 4, kTwoPi));
    const Mat a = set_distance_matrix(oc, Backend::Serial);
    const Mat b = set_distance_matrix(oc, Backend::Parallel);
    CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 5; ++j) {
        if (i == j) continue;
        double best = 1e9;
        for (int p = 0; p < 4; ++p)
          for (int q = 0; q < 4; ++q)
            for (int s = -2; s <= 2; ++s)
              for (int t = -2; t <= 2; ++t) {
                Vec d = oc.clouds[j].col(q) - oc.clouds[i].col(p);
                d(0) += kTwoPi * s;
                d(1) += kTwoPi * t;
                best = std::min(best, std::sqrt(d.dot(oc.metric * d)));
              }
        CHECK(a(i, j) == doctest::Approx(best).epsilon(1e-12));
      }
  }
}

TEST_CASE("shortest_path_closure: dijkstra agrees with floyd-warshall") {
  Rng rng(5);
  for (int trial = 0; trial < 5; ++trial) {
    const Mat w = random_weights(rng, 30 + trial);
    const Mat a = shortest_path_closure(w, Backend::Serial);
    const Mat b = shortest_path_closure(w, Backend::Parallel);
    CHECK((a - b).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((a - a.transpose()).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.array() <= w.array() + 1e-15).all());
    // Closure is idempotent.
    CHECK((shortest_path_closure(a, Backend::Serial) - a).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("single_source_distances matches Bellman-Ford") {
  Rng rng(6);
  const Mat w = random_weights(rng, 25);
  const Vec d = single_source_distances(w, 3);
  Vec ref = Vec::Constant(25, 1e300);
  ref(3) = 0.0;
  for (int round = 0; round < 25; ++round)
    for (int u = 0; u < 25; ++u)
      for (int v = 0; v < 25; ++v) ref(v) = std::min(ref(v), ref(u) + w(u, v));
  CHECK((d - ref).cwiseAbs().maxCoeff() < 1e-12);
}

#include "orbitspace/complexes.hpp"

#include <Eigen/LU>
#include <doctest.h>

#include <cmath>

using namespace orbitspace;

namespace {

SimplicialComplex tetra_boundary() {
  return SimplicialComplex::from_simplices(4, {{0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {1, 2, 3}});
}

SimplicialComplex octahedron() {
  std::vector<Simplex> f;
  for (std::size_t a : {0, 1})
    for (std::size_t b : {2, 3})
      for (std::size_t c : {4, 5}) f.push_back({a, b, c});
  return SimplicialComplex::from_simplices(6, f);
}

SimplicialComplex torus7() {
  std::vector<Simplex> f;
  for (std::size_t i = 0; i < 7; ++i) {
    f.push_back({i, (i + 1) % 7, (i + 3) % 7});
    f.push_back({i, (i + 2) % 7, (i + 3) % 7});
  }
  return SimplicialComplex::from_simplices(7, f);
}

SimplicialComplex rp2() {
  return SimplicialComplex::from_simplices(6, {{0, 1, 2}, {0, 2, 3}, {0, 3, 4}, {0, 4, 5}, {0, 5, 1},
                                               {1, 2, 4}, {2, 3, 5}, {3, 4, 1}, {4, 5, 2}, {5, 1, 3}});
}

SimplicialComplex cycle(std::size_t n) {
  std::vector<Simplex> e;
  for (std::size_t i = 0; i < n; ++i) e.push_back({i, (i + 1) % n});
  return SimplicialComplex::from_simplices(n, e);
}

}  // namespace

TEST_CASE("face closure and counts") {
  const auto k = tetra_boundary();
  CHECK(k.dimension() == 2);
  CHECK(k.count(0) == 4);
  CHECK(k.count(1) == 6);
  CHECK(k.count(2) == 4);
  CHECK(k.euler_characteristic() == 2);
  CHECK(k.contains({1, 3}));
  CHECK_FALSE(k.contains({0, 1, 2, 3}));
  CHECK(k.maximal_simplices().size() == 4);
  const auto j = k.to_json();
  CHECK(j["vertices"] == 4);
  CHECK(j["simplices"].size() == 14);
}

TEST_CASE("real betti numbers of standard triangulations") {
  CHECK(betti_numbers(tetra_boundary()) == std::vector<long>{1, 0, 1});
  CHECK(betti_numbers(octahedron()) == std::vector<long>{1, 0, 1});
  CHECK(betti_numbers(torus7()) == std::vector<long>{1, 2, 1});
  // Real coefficients: the Z/2 torsion of RP^2 is invisible.
  CHECK(betti_numbers(rp2()) == std::vector<long>{1, 0, 0});
  CHECK(betti_numbers(cycle(5)) == std::vector<long>{1, 1});
  CHECK(rp2().euler_characteristic() == 1);
  CHECK(torus7().euler_characteristic() == 0);
}

TEST_CASE("barycentric subdivision preserves Euler characteristic and homology") {
  const auto tri = SimplicialComplex::from_simplices(3, {{0, 1, 2}});
  const auto sd = barycentric_subdivide(tri);
  CHECK(sd.count(0) == 7);
  CHECK(sd.count(2) == 6);
  for (const auto& k : {tetra_boundary(), torus7(), rp2(), cycle(4), octahedron()}) {
    const auto s = barycentric_subdivide(k);
    CHECK(s.euler_characteristic() == k.euler_characteristic());
    CHECK(betti_numbers(s) == betti_numbers(k));
  }
}

TEST_CASE("the nerve of the open-star cover is isomorphic to the complex") {
  for (const auto& k : {tetra_boundary(), torus7(), rp2(), cycle(6), octahedron()}) {
    const auto n = nerve(star_cover(k));
    CHECK(n.size() == k.size());
    CHECK(find_isomorphism(n, k).has_value());
  }
}

TEST_CASE("isomorphism search rejects different complexes") {
  const auto path = SimplicialComplex::from_simplices(4, {{0, 1}, {1, 2}, {2, 3}});
  CHECK_FALSE(find_isomorphism(cycle(4), path).has_value());
  CHECK_FALSE(find_isomorphism(octahedron(), rp2()).has_value());
  // A relabelled cycle is isomorphic.
  const auto shuffled = SimplicialComplex::from_simplices(5, {{0, 3}, {3, 1}, {1, 4}, {4, 2}, {2, 0}});
  const auto iso = find_isomorphism(cycle(5), shuffled);
  REQUIRE(iso.has_value());
  const auto c5 = cycle(5);
  for (const auto& e : c5.simplices(1)) {
    Simplex img{(*iso)[e[0]], (*iso)[e[1]]};
    std::sort(img.begin(), img.end());
    CHECK(shuffled.contains(img));
  }
}

TEST_CASE("rips complexes of a square") {
  Mat d(4, 4);
  const double s = std::sqrt(2.0);
  d << 0, 1, s, 1, 1, 0, 1, s, s, 1, 0, 1, 1, s, 1, 0;
  CHECK(betti_numbers(build_rips(d, 1.1)) == std::vector<long>{1, 1});
  const auto filled = build_rips(d, 1.5);
  CHECK(filled.dimension() == 3);
  CHECK(betti_numbers(filled) == std::vector<long>{1, 0, 0, 0});
  CHECK(build_rips(d, 1.5, 1).dimension() == 1);
}

TEST_CASE("exact rank agrees with floating-point rank on small integer matrices") {
  Rng rng(12);
  for (int trial = 0; trial < 40; ++trial) {
    const int rows = 3 + static_cast<int>(rng.index(6)), cols = 3 + static_cast<int>(rng.index(6));
    Mat m = Mat::Zero(rows, cols);
    std::vector<std::vector<std::pair<std::size_t, long>>> columns(static_cast<std::size_t>(cols));
    for (int j = 0; j < cols; ++j)
      for (int i = 0; i < rows; ++i) {
        const long v = static_cast<long>(rng.index(5)) - 2;
        if (v == 0 || rng.uniform() < 0.4) continue;
        m(i, j) = static_cast<double>(v);
        columns[static_cast<std::size_t>(j)].emplace_back(static_cast<std::size_t>(i), v);
      }
    Eigen::FullPivLU<Mat> lu(m);
    CHECK(exact_rank(columns) == static_cast<std::size_t>(lu.rank()));
  }
}

TEST_CASE("exact rank survives coefficient growth") {
  // Columns (1, 3^k): rank 2 however large the entries get.
  std::vector<std::vector<std::pair<std::size_t, long>>> cols;
  long p = 1;
  for (int k = 0; k < 38; ++k) {
    cols.push_back({{0, 1}, {1, p}});
    p *= 3;
  }
  CHECK(exact_rank(cols) == 2);
  // Dependent columns with large entries.
  const long big = 3'000'000'000'000'000'000L;
  CHECK(exact_rank({{{0, big}, {1, big - 1}}, {{0, 1}, {1, 1}}, {{0, big + 1}, {1, big}}}) == 2);
}

#pragma once

// Abstract simplicial complexes: Rips construction, barycentric subdivision,
// open-star covers and their nerves, and exact real Betti numbers.

#include "orbitspace/types.hpp"

#include <nlohmann/json.hpp>

#include <map>
#include <optional>
#include <vector>

namespace orbitspace {

/// Sorted vertex indices.
using Simplex = std::vector<std::size_t>;

class SimplicialComplex {
 public:
  SimplicialComplex() = default;
  /// Face closure of the given simplices (vertices are sorted and deduplicated).
  static SimplicialComplex from_simplices(std::size_t vertex_count, const std::vector<Simplex>& simplices);

  std::size_t vertex_count() const { return vertices_; }
  /// -1 for the empty complex.
  int dimension() const { return static_cast<int>(by_dim_.size()) - 1; }
  /// Simplices of dimension k in lexicographic order.
  const std::vector<Simplex>& simplices(int k) const;
  std::size_t count(int k) const { return k < 0 || k > dimension() ? 0 : by_dim_[static_cast<std::size_t>(k)].size(); }
  std::size_t size() const;
  /// Index of s among simplices(dim s), if present.
  std::optional<std::size_t> index_of(const Simplex& s) const;
  bool contains(const Simplex& s) const { return index_of(s).has_value(); }
  /// Simplices that are not a face of another simplex.
  std::vector<Simplex> maximal_simplices() const;
  long euler_characteristic() const;

  nlohmann::json to_json() const;

 private:
  std::size_t vertices_ = 0;
  std::vector<std::vector<Simplex>> by_dim_;
  std::vector<std::map<Simplex, std::size_t>> index_;
};

/// All vertex sets of diameter < eps, up to dimension max_dim.
SimplicialComplex build_rips(const Mat& distances, double eps, int max_dim = 3);

/// Vertices are the simplices of K in (dimension, lexicographic) order;
/// simplices are the chains sigma_0 < ... < sigma_k.
SimplicialComplex barycentric_subdivide(const SimplicialComplex& k);

struct StarCover {
  std::size_t vertex_count = 0;
  /// Maximal simplices of K.
  std::vector<Simplex> tops;
  /// Per vertex: indices into tops of the maximal simplices in its closed star.
  std::vector<std::vector<std::size_t>> stars;
};

StarCover star_cover(const SimplicialComplex& k);

/// Vertex sets whose open stars intersect: the intersection of their
/// top-simplex sets is nonempty.
SimplicialComplex nerve(const StarCover& cover);

/// Simplicial isomorphism by backtracking over vertex bijections.
std::optional<std::vector<std::size_t>> find_isomorphism(const SimplicialComplex& a, const SimplicialComplex& b);

/// Real Betti numbers b_0..b_dim from exact integer ranks of the boundary maps.
std::vector<long> betti_numbers(const SimplicialComplex& k);

/// Exact rank of a sparse integer matrix given by columns (row, value).
std::size_t exact_rank(std::vector<std::vector<std::pair<std::size_t, long>>> columns);

}  // namespace orbitspace

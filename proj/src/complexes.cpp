#include "orbitspace/complexes.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <functional>
#include <numeric>
#include <set>

namespace orbitspace {

SimplicialComplex SimplicialComplex::from_simplices(std::size_t vertex_count, const std::vector<Simplex>& simplices) {
  std::vector<std::set<Simplex>> sets;
  for (auto s : simplices) {
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    if (s.empty()) continue;
    if (s.back() >= vertex_count) throw DomainError("simplex refers to a vertex outside the complex");
    // Enumerate all nonempty faces by bitmask (simplices here have at most a few dozen vertices).
    if (s.size() > 20) throw DomainError("simplex dimension too large");
    const std::size_t k = s.size();
    if (sets.size() < k) sets.resize(k);
    for (std::size_t mask = 1; mask < (std::size_t{1} << k); ++mask) {
      Simplex f;
      for (std::size_t i = 0; i < k; ++i)
        if (mask & (std::size_t{1} << i)) f.push_back(s[i]);
      sets[f.size() - 1].insert(std::move(f));
    }
  }
  SimplicialComplex c;
  c.vertices_ = vertex_count;
  for (auto& set : sets) {
    c.by_dim_.emplace_back(set.begin(), set.end());
    auto& idx = c.index_.emplace_back();
    for (std::size_t i = 0; i < c.by_dim_.back().size(); ++i) idx.emplace(c.by_dim_.back()[i], i);
  }
  return c;
}

const std::vector<Simplex>& SimplicialComplex::simplices(int k) const {
  static const std::vector<Simplex> empty;
  if (k < 0 || k > dimension()) return empty;
  return by_dim_[static_cast<std::size_t>(k)];
}

std::size_t SimplicialComplex::size() const {
  std::size_t n = 0;
  for (const auto& v : by_dim_) n += v.size();
  return n;
}

std::optional<std::size_t> SimplicialComplex::index_of(const Simplex& s) const {
  if (s.empty() || s.size() > by_dim_.size()) return std::nullopt;
  const auto& idx = index_[s.size() - 1];
  const auto it = idx.find(s);
  if (it == idx.end()) return std::nullopt;
  return it->second;
}

std::vector<Simplex> SimplicialComplex::maximal_simplices() const {
  std::vector<Simplex> out;
  for (int k = 0; k <= dimension(); ++k)
    for (const auto& s : simplices(k)) {
      bool maximal = true;
      if (k < dimension()) {
        // s is maximal iff no (k+1)-simplex contains it.
        for (std::size_t v = 0; v < vertices_ && maximal; ++v) {
          if (std::binary_search(s.begin(), s.end(), v)) continue;
          Simplex t = s;
          t.insert(std::upper_bound(t.begin(), t.end(), v), v);
          if (contains(t)) maximal = false;
        }
      }
      if (maximal) out.push_back(s);
    }
  return out;
}

long SimplicialComplex::euler_characteristic() const {
  long chi = 0;
  for (int k = 0; k <= dimension(); ++k) chi += (k % 2 == 0 ? 1 : -1) * static_cast<long>(count(k));
  return chi;
}

nlohmann::json SimplicialComplex::to_json() const {
  nlohmann::json simplices = nlohmann::json::array();
  for (const auto& level : by_dim_)
    for (const auto& s : level) simplices.push_back(s);
  return {{"vertices", vertices_}, {"simplices", simplices}};
}

SimplicialComplex build_rips(const Mat& d, double eps, int max_dim) {
  if (d.rows() != d.cols()) throw DomainError("build_rips: distance matrix must be square");
  if (eps <= 0.0) throw DomainError("build_rips: scale must be positive");
  if ((d - d.transpose()).cwiseAbs().maxCoeff() > 1e-9) throw DomainError("build_rips: distance matrix is not symmetric");
  const auto n = static_cast<std::size_t>(d.rows());
  std::vector<std::vector<char>> adj(n, std::vector<char>(n, 0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      adj[i][j] = i != j && d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) < eps;

  std::vector<Simplex> all;
  std::vector<Simplex> level;
  for (std::size_t v = 0; v < n; ++v) level.push_back({v});
  all.insert(all.end(), level.begin(), level.end());
  for (int k = 1; k <= max_dim && !level.empty(); ++k) {
    std::vector<Simplex> next;
    for (const auto& s : level)
      for (std::size_t v = s.back() + 1; v < n; ++v) {
        if (!std::all_of(s.begin(), s.end(), [&](std::size_t u) { return adj[u][v]; })) continue;
        Simplex t = s;
        t.push_back(v);
        next.push_back(std::move(t));
      }
    all.insert(all.end(), next.begin(), next.end());
    level = std::move(next);
  }
  return SimplicialComplex::from_simplices(n, all);
}

SimplicialComplex barycentric_subdivide(const SimplicialComplex& k) {
  std::map<Simplex, std::size_t> id;
  for (int d = 0; d <= k.dimension(); ++d)
    for (const auto& s : k.simplices(d)) id.emplace(s, id.size());
  std::vector<Simplex> flags;
  for (const auto& top : k.maximal_simplices()) {
    Simplex perm = top;
    do {
      // Flag {perm[0]} < {perm[0], perm[1]} < ... < top.
      Simplex chain;
      Simplex face;
      for (auto v : perm) {
        face.insert(std::upper_bound(face.begin(), face.end(), v), v);
        chain.push_back(id.at(face));
      }
      flags.push_back(std::move(chain));
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
  return SimplicialComplex::from_simplices(id.size(), flags);
}

StarCover star_cover(const SimplicialComplex& k) {
  StarCover c;
  c.vertex_count = k.vertex_count();
  c.tops = k.maximal_simplices();
  c.stars.resize(k.vertex_count());
  for (std::size_t t = 0; t < c.tops.size(); ++t)
    for (auto v : c.tops[t]) c.stars[v].push_back(t);
  return c;
}

SimplicialComplex nerve(const StarCover& cover) {
  std::vector<Simplex> out;
  // Depth-first extension keeps the running intersection of top-simplex sets.
  std::function<void(Simplex&, const std::vector<std::size_t>&)> grow = [&](Simplex& s,
                                                                           const std::vector<std::size_t>& common) {
    out.push_back(s);
    for (std::size_t v = s.back() + 1; v < cover.vertex_count; ++v) {
      std::vector<std::size_t> next;
      std::set_intersection(common.begin(), common.end(), cover.stars[v].begin(), cover.stars[v].end(),
                            std::back_inserter(next));
      if (next.empty()) continue;
      s.push_back(v);
      grow(s, next);
      s.pop_back();
    }
  };
  for (std::size_t v = 0; v < cover.vertex_count; ++v) {
    if (cover.stars[v].empty()) continue;
    Simplex s{v};
    grow(s, cover.stars[v]);
  }
  return SimplicialComplex::from_simplices(cover.vertex_count, out);
}

std::optional<std::vector<std::size_t>> find_isomorphism(const SimplicialComplex& a, const SimplicialComplex& b) {
  if (a.vertex_count() != b.vertex_count() || a.dimension() != b.dimension()) return std::nullopt;
  for (int k = 0; k <= a.dimension(); ++k)
    if (a.count(k) != b.count(k)) return std::nullopt;
  const std::size_t n = a.vertex_count();
  auto signature = [](const SimplicialComplex& c) {
    std::vector<std::vector<std::size_t>> sig(c.vertex_count(), std::vector<std::size_t>(
                                                                    static_cast<std::size_t>(c.dimension() + 1), 0));
    for (int k = 0; k <= c.dimension(); ++k)
      for (const auto& s : c.simplices(k))
        for (auto v : s) ++sig[v][static_cast<std::size_t>(k)];
    return sig;
  };
  const auto sa = signature(a), sb = signature(b);
  auto adjacency = [n](const SimplicialComplex& c) {
    std::vector<std::vector<char>> adj(n, std::vector<char>(n, 0));
    for (const auto& e : c.simplices(1)) adj[e[0]][e[1]] = adj[e[1]][e[0]] = 1;
    return adj;
  };
  const auto aa = adjacency(a), ab = adjacency(b);

  std::vector<std::size_t> map(n, n);
  std::vector<char> used(n, 0);
  std::function<bool(std::size_t)> place = [&](std::size_t v) -> bool {
    if (v == n) {
      for (int k = 2; k <= a.dimension(); ++k)
        for (const auto& s : a.simplices(k)) {
          Simplex t;
          for (auto u : s) t.push_back(map[u]);
          std::sort(t.begin(), t.end());
          if (!b.contains(t)) return false;
        }
      return true;
    }
    for (std::size_t w = 0; w < n; ++w) {
      if (used[w] || sa[v] != sb[w]) continue;
      bool ok = true;
      for (std::size_t u = 0; u < v && ok; ++u) ok = aa[u][v] == ab[map[u]][w];
      if (!ok) continue;
      map[v] = w;
      used[w] = 1;
      if (place(v + 1)) return true;
      used[w] = 0;
    }
    return false;
  };
  if (!place(0)) return std::nullopt;
  return map;
}

namespace {

template <class T>
bool checked_mul(const T& a, const T& b, T& out) {
  if constexpr (std::is_same_v<T, long>) {
    return !__builtin_mul_overflow(a, b, &out);
  } else {
    out = a * b;
    return true;
  }
}

template <class T>
bool checked_sub(const T& a, const T& b, T& out) {
  if constexpr (std::is_same_v<T, long>) {
    return !__builtin_sub_overflow(a, b, &out);
  } else {
    out = a - b;
    return true;
  }
}

template <class T>
T abs_of(const T& x) {
  return x < 0 ? T(-x) : x;
}

template <class T>
T gcd_of(T a, T b) {
  a = abs_of(a);
  b = abs_of(b);
  while (b != 0) {
    T r = a % b;
    a = b;
    b = r;
  }
  return a;
}

struct Overflow {};

template <class T>
std::size_t rank_impl(const std::vector<std::vector<std::pair<std::size_t, long>>>& input) {
  using Col = std::vector<std::pair<std::size_t, T>>;
  std::map<std::size_t, Col> pivots;  // lowest row -> reduced column
  std::size_t rank = 0;
  for (const auto& raw : input) {
    Col c;
    for (const auto& [r, v] : raw)
      if (v != 0) c.emplace_back(r, T(v));
    std::sort(c.begin(), c.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    while (!c.empty()) {
      const auto it = pivots.find(c.back().first);
      if (it == pivots.end()) break;
      const Col& p = it->second;
      const T a = c.back().second, b = p.back().second;
      // c <- b c - a p, which cancels the lowest entry.
      Col next;
      std::size_t i = 0, j = 0;
      while (i < c.size() || j < p.size()) {
        std::size_t row;
        T x = 0, y = 0;
        if (j == p.size() || (i < c.size() && c[i].first < p[j].first)) {
          row = c[i].first;
          x = c[i++].second;
        } else if (i == c.size() || p[j].first < c[i].first) {
          row = p[j].first;
          y = p[j++].second;
        } else {
          row = c[i].first;
          x = c[i++].second;
          y = p[j++].second;
        }
        T bx, ay, v;
        if (!checked_mul(b, x, bx) || !checked_mul(a, y, ay) || !checked_sub(bx, ay, v)) throw Overflow{};
        if (v != 0) next.emplace_back(row, v);
      }
      T g = 0;
      for (const auto& e : next) g = gcd_of(g, e.second);
      if (g > 1)
        for (auto& e : next) e.second /= g;
      c = std::move(next);
    }
    if (!c.empty()) {
      ++rank;
      const auto low = c.back().first;
      pivots.emplace(low, std::move(c));
    }
  }
  return rank;
}

}  // namespace

std::size_t exact_rank(std::vector<std::vector<std::pair<std::size_t, long>>> columns) {
  try {
    return rank_impl<long>(columns);
  } catch (const Overflow&) {
    return rank_impl<boost::multiprecision::cpp_int>(columns);
  }
}

std::vector<long> betti_numbers(const SimplicialComplex& k) {
  const int dim = k.dimension();
  if (dim < 0) return {};
  // rank of the boundary d_j : C_j -> C_{j-1}, j = 1..dim.
  std::vector<std::size_t> rank(static_cast<std::size_t>(dim + 2), 0);
  for (int j = 1; j <= dim; ++j) {
    std::vector<std::vector<std::pair<std::size_t, long>>> cols;
    for (const auto& s : k.simplices(j)) {
      std::vector<std::pair<std::size_t, long>> col;
      for (std::size_t i = 0; i < s.size(); ++i) {
        Simplex f = s;
        f.erase(f.begin() + static_cast<std::ptrdiff_t>(i));
        col.emplace_back(*k.index_of(f), i % 2 == 0 ? 1 : -1);
      }
      cols.push_back(std::move(col));
    }
    rank[static_cast<std::size_t>(j)] = exact_rank(std::move(cols));
  }
  std::vector<long> b;
  for (int j = 0; j <= dim; ++j)
    b.push_back(static_cast<long>(k.count(j)) - static_cast<long>(rank[static_cast<std::size_t>(j)]) -
                static_cast<long>(rank[static_cast<std::size_t>(j + 1)]));
  return b;
}

}  // namespace orbitspace

#include "orbitspace/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace orbitspace::kernels {

Mat haar_average(const std::vector<WeightedElement>& nodes, const Mat& s, Backend backend) {
  const auto n = static_cast<std::ptrdiff_t>(nodes.size());
  std::vector<Mat> terms(nodes.size());
  auto term = [&](std::ptrdiff_t i) {
    const auto& e = nodes[static_cast<std::size_t>(i)];
    terms[static_cast<std::size_t>(i)] = e.weight * (e.element.linear.transpose() * s * e.element.linear);
  };
  if (backend == Backend::Parallel) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) term(i);
  } else {
    for (std::ptrdiff_t i = 0; i < n; ++i) term(i);
  }
  Mat out = Mat::Zero(s.rows(), s.cols());
  for (const auto& t : terms) out += t;
  return out;
}

namespace {

// Minimal squared chord between two clouds after the metric transform.
double min_sq_chord(const Mat& a, const Mat& b) {
  double best = std::numeric_limits<double>::infinity();
  const auto dim = a.rows();
  for (Eigen::Index i = 0; i < a.cols(); ++i)
    for (Eigen::Index j = 0; j < b.cols(); ++j) {
      double s = 0.0;
      for (Eigen::Index k = 0; k < dim; ++k) {
        const double d = a(k, i) - b(k, j);
        s += d * d;
      }
      best = std::min(best, s);
    }
  return best;
}

double torus_min(const Mat& a, const Mat& b, const Mat& metric, const std::vector<Vec>& offsets) {
  // Coordinates are canonical angles, so one shift reduces a difference.
  constexpr int kMaxDim = 16;
  const auto dim = a.rows();
  if (dim > kMaxDim) throw UnsupportedError("torus distance kernel: dimension above 16");
  const bool identity = offsets.size() == 1;
  double best = std::numeric_limits<double>::infinity();
  double d[kMaxDim], e[kMaxDim];
  for (Eigen::Index i = 0; i < a.cols(); ++i)
    for (Eigen::Index j = 0; j < b.cols(); ++j) {
      for (Eigen::Index k = 0; k < dim; ++k) {
        double x = b(k, j) - a(k, i);
        if (x > kPi) x -= kTwoPi;
        if (x <= -kPi) x += kTwoPi;
        d[k] = x;
      }
      if (identity) {
        double s = 0.0;
        for (Eigen::Index k = 0; k < dim; ++k) s += d[k] * d[k];
        best = std::min(best, s);
        continue;
      }
      for (const auto& o : offsets) {
        for (Eigen::Index k = 0; k < dim; ++k) e[k] = d[k] + o(k);
        double s = 0.0;
        for (Eigen::Index r = 0; r < dim; ++r)
          for (Eigen::Index c = 0; c < dim; ++c) s += e[r] * metric(r, c) * e[c];
        best = std::min(best, s);
      }
    }
  return std::sqrt(std::max(best, 0.0));
}

}  // namespace

Mat set_distance_matrix(const OrbitClouds& oc, Backend backend) {
  const auto m = static_cast<std::ptrdiff_t>(oc.clouds.size());
  Mat out = Mat::Zero(m, m);
  if (m == 0) return out;

  std::vector<Mat> clouds = oc.clouds;
  std::vector<Vec> offsets;
  if (oc.kind == ChartKind::Euclidean) {
    // |R(p - q)| with R^T R = metric.
    const Mat r = oc.metric.llt().matrixU();
    for (auto& c : clouds) c = r * c;
  } else if (oc.kind == ChartKind::FlatTorus) {
    const auto k = oc.metric.rows();
    const bool identity = (oc.metric - Mat::Identity(k, k)).cwiseAbs().maxCoeff() == 0.0;
    if (identity) {
      offsets.push_back(Vec::Zero(k));
    } else {
      std::vector<int> digit(static_cast<std::size_t>(k), -1);
      while (true) {
        Vec o(k);
        for (Eigen::Index i = 0; i < k; ++i) o(i) = kTwoPi * digit[static_cast<std::size_t>(i)];
        offsets.push_back(o);
        std::size_t a = 0;
        while (a < digit.size() && ++digit[a] == 2) digit[a++] = -1;
        if (a == digit.size()) break;
      }
    }
  }

  auto entry = [&](std::ptrdiff_t i, std::ptrdiff_t j) {
    const auto& a = clouds[static_cast<std::size_t>(i)];
    const auto& b = clouds[static_cast<std::size_t>(j)];
    switch (oc.kind) {
      case ChartKind::Euclidean: return std::sqrt(min_sq_chord(a, b));
      case ChartKind::RoundSphere: {
        const double c = std::sqrt(min_sq_chord(a, b));
        return 2.0 * std::asin(std::min(1.0, 0.5 * c));
      }
      case ChartKind::FlatTorus: return torus_min(a, b, oc.metric, offsets);
    }
    return 0.0;
  };
  auto fill_row = [&](std::ptrdiff_t i) {
    for (std::ptrdiff_t j = i + 1; j < m; ++j) {
      const double d = entry(i, j);
      out(i, j) = d;
      out(j, i) = d;
    }
  };
  if (backend == Backend::Parallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t i = 0; i < m; ++i) fill_row(i);
  } else {
    for (std::ptrdiff_t i = 0; i < m; ++i) fill_row(i);
  }
  return out;
}

namespace {

// Dense Dijkstra over rows of w stored contiguously: row u of w is wt[u*n .. u*n+n).
// Open vertices live in a packed list (index, tentative distance) that shrinks by
// swap-removal; ties go to the lowest vertex index.
void dijkstra_rows(const double* wt, std::size_t n, std::size_t source, double* dist, std::vector<std::size_t>& open,
                   std::vector<double>& tentative) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  open.resize(n);
  tentative.resize(n);
  for (std::size_t v = 0; v < n; ++v) {
    open[v] = v;
    tentative[v] = inf;
  }
  tentative[source] = 0.0;
  std::size_t m = n;
  while (m > 0) {
    double best = inf;
    for (std::size_t k = 0; k < m; ++k) best = tentative[k] < best ? tentative[k] : best;
    if (best == inf) break;
    std::size_t pick = m;
    for (std::size_t k = 0; k < m; ++k)
      if (tentative[k] == best && (pick == m || open[k] < open[pick])) pick = k;
    const std::size_t u = open[pick];
    dist[u] = best;
    --m;
    open[pick] = open[m];
    tentative[pick] = tentative[m];
    const double* row = wt + u * n;
    for (std::size_t k = 0; k < m; ++k) tentative[k] = std::min(tentative[k], best + row[open[k]]);
  }
  for (std::size_t k = 0; k < m; ++k) dist[open[k]] = inf;
}

}  // namespace

Vec single_source_distances(const Mat& w, std::size_t source) {
  const auto n = static_cast<std::size_t>(w.rows());
  const Mat wt = w.transpose();
  Vec dist(static_cast<Eigen::Index>(n));
  std::vector<std::size_t> open;
  std::vector<double> tentative;
  dijkstra_rows(wt.data(), n, source, dist.data(), open, tentative);
  return dist;
}

Mat shortest_path_closure(const Mat& w, Backend backend) {
  const auto n = static_cast<std::ptrdiff_t>(w.rows());
  if (backend == Backend::Parallel) {
    const Mat wt = w.transpose();
    const auto un = static_cast<std::size_t>(n);
    // Column s of out holds the distances from s.
    Mat out(n, n);
#pragma omp parallel
    {
      std::vector<std::size_t> open;
      std::vector<double> tentative;
#pragma omp for schedule(dynamic, 1)
      for (std::ptrdiff_t s = 0; s < n; ++s)
        dijkstra_rows(wt.data(), un, static_cast<std::size_t>(s), out.col(s).data(), open, tentative);
    }
    // Symmetrise by taking the smaller of the two directions, which are equal in exact arithmetic.
    for (std::ptrdiff_t i = 0; i < n; ++i)
      for (std::ptrdiff_t j = i + 1; j < n; ++j) {
        const double d = std::min(out(i, j), out(j, i));
        out(i, j) = d;
        out(j, i) = d;
      }
    return out;
  }
  Mat d = w;
  for (std::ptrdiff_t k = 0; k < n; ++k)
    for (std::ptrdiff_t j = 0; j < n; ++j) {
      const double dkj = d(k, j);
      for (std::ptrdiff_t i = 0; i < n; ++i) d(i, j) = std::min(d(i, j), d(i, k) + dkj);
    }
  return d;
}

}  // namespace orbitspace::kernels

#pragma once

// Hot loops with an OpenMP implementation and a serial reference. The
// parallel paths write each output entry from exactly one thread and reduce
// in a fixed order, so results do not depend on the thread count.

#include "orbitspace/geometry.hpp"

#include <vector>

namespace orbitspace::kernels {

enum class Backend { Serial, Parallel };

/// sum_i w_i L_i^T S L_i, summed in node order.
Mat haar_average(const std::vector<WeightedElement>& nodes, const Mat& s, Backend backend = Backend::Parallel);

enum class ChartKind { Euclidean, RoundSphere, FlatTorus };

/// Orbit point clouds (one column per point) under a constant metric.
struct OrbitClouds {
  ChartKind kind = ChartKind::Euclidean;
  /// Constant metric matrix (Euclidean, FlatTorus). Ignored for RoundSphere.
  Mat metric;
  std::vector<Mat> clouds;
};

/// Symmetric matrix of minimal point-pair geodesic distances between clouds.
Mat set_distance_matrix(const OrbitClouds& clouds, Backend backend = Backend::Parallel);

/// All-pairs shortest paths over the complete graph with weights w.
/// Parallel: dense Dijkstra per source (ties broken by the lowest index).
/// Serial: Floyd-Warshall, kept as an independent reference.
Mat shortest_path_closure(const Mat& w, Backend backend = Backend::Parallel);

/// Dense Dijkstra from one source.
Vec single_source_distances(const Mat& w, std::size_t source);

}  // namespace orbitspace::kernels

#pragma once

#include <array>
#include <string>
#include <vector>

namespace fjs::tsp {

// Symmetric TSP over 2-D points or an explicit distance matrix. The matrix is
// always populated; points are kept only when the instance came from
// coordinates.
struct TspInstance {
  std::vector<std::array<double, 2>> points;
  std::vector<std::vector<double>> dist;

  int size() const { return static_cast<int>(dist.size()); }
  double d(int a, int b) const { return dist[a][b]; }

  static TspInstance from_points(std::vector<std::array<double, 2>> pts);
  static TspInstance from_matrix(std::vector<std::vector<double>> matrix);
  void check_valid() const;
};

struct Tour {
  std::vector<int> order;  // a permutation of 0..n-1; the cycle closes implicitly
  double length = 0.0;
};

double tour_length(const TspInstance& instance, const std::vector<int>& order);
double path_length(const TspInstance& instance, const std::vector<int>& order);

// Exact solver by bitmask dynamic programming; guarded to n <= 18.
Tour held_karp(const TspInstance& instance);

// Nearest-neighbor path of k cities starting from city 0; distance ties keep
// the lowest city index.
std::vector<int> greedy_prefix(const TspInstance& instance, int k);

// Residual instance for completing a fixed path prefix: the unvisited cities
// plus the prefix endpoints plus one auxiliary node at distance zero to both
// endpoints and a prohibitively large distance to everything else, so any
// optimal cycle of the reduced instance is an open endpoint-to-endpoint path
// in disguise.
struct AuxTransform {
  TspInstance reduced;
  std::vector<int> to_original;  // reduced index -> original city, -1 for the aux node
  int v1 = 0;                    // reduced index of the prefix start
  int vt = 1;                    // reduced index of the prefix end
  int aux = 0;                   // reduced index of the auxiliary node
};

AuxTransform aux_transform(const TspInstance& instance, const std::vector<int>& prefix);

// Exact completion of a path prefix into a full cycle via the auxiliary-node
// reduction; the completion segment is optimal among all ways to finish the
// prefix.
Tour complete_tour(const TspInstance& instance, const std::vector<int>& prefix);

// TSPLIB-style EUC_2D coordinate files. Distances are real-valued Euclidean,
// not rounded to integers.
TspInstance read_tsplib(const std::string& path);
void write_tsplib(const std::string& path, const TspInstance& instance,
                  const std::string& name = "instance");

}  // namespace fjs::tsp

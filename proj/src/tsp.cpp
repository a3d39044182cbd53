#include "fjs/tsp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace fjs::tsp {

TspInstance TspInstance::from_points(std::vector<std::array<double, 2>> pts) {
  TspInstance inst;
  const int n = static_cast<int>(pts.size());
  inst.points = std::move(pts);
  inst.dist.assign(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double dx = inst.points[i][0] - inst.points[j][0];
      const double dy = inst.points[i][1] - inst.points[j][1];
      const double d = std::sqrt(dx * dx + dy * dy);
      inst.dist[i][j] = d;
      inst.dist[j][i] = d;
    }
  inst.check_valid();
  return inst;
}

TspInstance TspInstance::from_matrix(std::vector<std::vector<double>> matrix) {
  TspInstance inst;
  inst.dist = std::move(matrix);
  inst.check_valid();
  return inst;
}

void TspInstance::check_valid() const {
  const int n = size();
  if (n < 3) throw std::invalid_argument("a tour needs at least 3 cities");
  if (!points.empty() && static_cast<int>(points.size()) != n)
    throw std::invalid_argument("point list does not match the distance matrix");
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(dist[i].size()) != n)
      throw std::invalid_argument("distance matrix is not square");
    if (dist[i][i] != 0.0) throw std::invalid_argument("distance diagonal must be zero");
    for (int j = 0; j < n; ++j) {
      if (dist[i][j] < 0.0) throw std::invalid_argument("distances must be nonnegative");
      if (std::abs(dist[i][j] - dist[j][i]) > 1e-9)
        throw std::invalid_argument("distance matrix must be symmetric");
    }
  }
}

double tour_length(const TspInstance& instance, const std::vector<int>& order) {
  return path_length(instance, order) +
         instance.d(order.back(), order.front());
}

double path_length(const TspInstance& instance, const std::vector<int>& order) {
  if (order.empty()) throw std::invalid_argument("empty city sequence");
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < order.size(); ++i)
    total += instance.d(order[i], order[i + 1]);
  return total;
}

Tour held_karp(const TspInstance& instance) {
  instance.check_valid();
  const int n = instance.size();
  if (n > 18) throw std::invalid_argument("exact tour search is guarded to 18 cities");

  const std::size_t full = std::size_t{1} << n;
  constexpr double kInf = std::numeric_limits<double>::infinity();
  // dp[mask][j]: cheapest path 0 -> j visiting exactly the cities in mask
  std::vector<std::vector<double>> dp(full, std::vector<double>(n, kInf));
  std::vector<std::vector<std::int8_t>> parent(full, std::vector<std::int8_t>(n, -1));
  dp[1][0] = 0.0;

  for (std::size_t mask = 1; mask < full; ++mask) {
    if (!(mask & 1)) continue;
    for (int j = 0; j < n; ++j) {
      if (dp[mask][j] == kInf || !(mask >> j & 1)) continue;
      const double base = dp[mask][j];
      for (int k = 1; k < n; ++k) {
        if (mask >> k & 1) continue;
        const std::size_t next = mask | (std::size_t{1} << k);
        const double cand = base + instance.d(j, k);
        if (cand < dp[next][k]) {
          dp[next][k] = cand;
          parent[next][k] = static_cast<std::int8_t>(j);
        }
      }
    }
  }

  const std::size_t all = full - 1;
  int best_end = -1;
  double best = kInf;
  for (int j = 1; j < n; ++j) {
    const double cand = dp[all][j] + instance.d(j, 0);
    if (cand < best) {
      best = cand;
      best_end = j;
    }
  }

  Tour tour;
  tour.length = best;
  std::vector<int> rev;
  std::size_t mask = all;
  int at = best_end;
  while (at != -1) {
    rev.push_back(at);
    const int prev = parent[mask][at];
    mask &= ~(std::size_t{1} << at);
    at = prev;
  }
  tour.order.assign(rev.rbegin(), rev.rend());
  return tour;
}

std::vector<int> greedy_prefix(const TspInstance& instance, int k) {
  instance.check_valid();
  const int n = instance.size();
  if (k < 1 || k > n - 1) throw std::invalid_argument("prefix length out of range");

  std::vector<int> prefix{0};
  std::vector<bool> used(n, false);
  used[0] = true;
  while (static_cast<int>(prefix.size()) < k) {
    const int at = prefix.back();
    int next = -1;
    for (int c = 0; c < n; ++c) {
      if (used[c]) continue;
      if (next == -1 || instance.d(at, c) < instance.d(at, next)) next = c;
    }
    used[next] = true;
    prefix.push_back(next);
  }
  return prefix;
}

AuxTransform aux_transform(const TspInstance& instance, const std::vector<int>& prefix) {
  instance.check_valid();
  const int n = instance.size();
  const int t = static_cast<int>(prefix.size());
  if (t < 2 || t > n - 1) throw std::invalid_argument("prefix must cover 2..n-1 cities");
  std::vector<bool> seen(n, false);
  for (int c : prefix) {
    if (c < 0 || c >= n) throw std::invalid_argument("prefix city out of range");
    if (seen[c]) throw std::invalid_argument("prefix repeats a city");
    seen[c] = true;
  }

  AuxTransform at;
  at.to_original = {prefix.front(), prefix.back()};
  for (int c = 0; c < n; ++c)
    if (!seen[c]) at.to_original.push_back(c);
  at.to_original.push_back(-1);

  const int rn = static_cast<int>(at.to_original.size());
  at.v1 = 0;
  at.vt = 1;
  at.aux = rn - 1;

  std::vector<std::vector<double>> d(rn, std::vector<double>(rn, 0.0));
  double pair_sum = 0.0;
  for (int i = 0; i + 1 < rn; ++i)
    for (int j = i + 1; j + 1 < rn; ++j) {
      const double v = instance.d(at.to_original[i], at.to_original[j]);
      d[i][j] = v;
      d[j][i] = v;
      pair_sum += v;
    }
  // large enough that no optimal cycle can afford it, finite so the dynamic
  // program stays numerically clean
  const double big = 2.0 * pair_sum + 1.0;
  for (int i = 0; i + 1 < rn; ++i) {
    const double v = (i == at.v1 || i == at.vt) ? 0.0 : big;
    d[i][at.aux] = v;
    d[at.aux][i] = v;
  }

  at.reduced = TspInstance::from_matrix(std::move(d));
  return at;
}

Tour complete_tour(const TspInstance& instance, const std::vector<int>& prefix) {
  const AuxTransform at = aux_transform(instance, prefix);
  const Tour reduced = held_karp(at.reduced);

  // rotate the cycle so the auxiliary node leads, then drop it; what remains
  // is the endpoint-to-endpoint completion path
  const int rn = at.reduced.size();
  std::vector<int> path;
  path.reserve(rn - 1);
  int aux_pos = -1;
  for (int i = 0; i < rn; ++i)
    if (reduced.order[i] == at.aux) aux_pos = i;
  for (int s = 1; s < rn; ++s) path.push_back(reduced.order[(aux_pos + s) % rn]);

  if (!((path.front() == at.v1 && path.back() == at.vt) ||
        (path.front() == at.vt && path.back() == at.v1)))
    throw std::logic_error("reduced tour does not pass through the prefix endpoints");
  if (path.front() == at.v1) std::reverse(path.begin(), path.end());

  Tour out;
  out.order = prefix;
  for (std::size_t i = 1; i + 1 < path.size(); ++i)
    out.order.push_back(at.to_original[path[i]]);
  out.length = tour_length(instance, out.order);
  return out;
}

TspInstance read_tsplib(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open tour file: " + path);

  int dimension = -1;
  bool euc2d = false;
  std::string line;
  bool in_coords = false;
  std::vector<std::array<double, 2>> pts;

  auto trim = [](std::string s) {
    const auto a = s.find_first_not_of(" \t\r");
    const auto b = s.find_last_not_of(" \t\r");
    return a == std::string::npos ? std::string{} : s.substr(a, b - a + 1);
  };

  while (std::getline(f, line)) {
    line = trim(line);
    if (line.empty()) continue;
    if (!in_coords) {
      if (line == "NODE_COORD_SECTION") {
        in_coords = true;
        continue;
      }
      const auto colon = line.find(':');
      if (colon == std::string::npos) continue;
      const std::string key = trim(line.substr(0, colon));
      const std::string value = trim(line.substr(colon + 1));
      if (key == "DIMENSION") dimension = std::stoi(value);
      if (key == "EDGE_WEIGHT_TYPE") euc2d = value == "EUC_2D";
    } else {
      if (line == "EOF") break;
      std::istringstream ss(line);
      int id;
      double x, y;
      if (!(ss >> id >> x >> y))
        throw std::runtime_error(path + ": malformed coordinate line: " + line);
      pts.push_back({x, y});
    }
  }

  if (!euc2d) throw std::runtime_error(path + ": only EUC_2D coordinate files are supported");
  if (dimension < 0) throw std::runtime_error(path + ": missing DIMENSION");
  if (static_cast<int>(pts.size()) != dimension)
    throw std::runtime_error(path + ": coordinate count does not match DIMENSION");
  return TspInstance::from_points(std::move(pts));
}

void write_tsplib(const std::string& path, const TspInstance& instance,
                  const std::string& name) {
  if (instance.points.empty())
    throw std::invalid_argument("only coordinate-backed instances can be written");
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open tour file for writing: " + path);
  f << "NAME : " << name << "\n";
  f << "TYPE : TSP\n";
  f << "DIMENSION : " << instance.size() << "\n";
  f << "EDGE_WEIGHT_TYPE : EUC_2D\n";
  f << "NODE_COORD_SECTION\n";
  char buf[80];
  for (int i = 0; i < instance.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%d %.17g %.17g", i + 1, instance.points[i][0],
                  instance.points[i][1]);
    f << buf << "\n";
  }
  f << "EOF\n";
  if (!f) throw std::runtime_error("failed writing tour file: " + path);
}

}  // namespace fjs::tsp

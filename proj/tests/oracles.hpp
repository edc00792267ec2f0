#pragma once

// Test-side reference implementations, deliberately written differently from
// the library kernels (Bellman-Ford instead of Dijkstra with potentials, no
// LP code at all).

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "kr/measures.hpp"
#include "kr/test_function.hpp"

namespace oracle {

struct Arc {
  int from;
  int to;
  double cost;
};

// Min-cost flow with uncapacitated arcs: super source/sink with capacities
// equal to the supplies, successive shortest paths found by Bellman-Ford on
// the residual graph.
inline double min_cost_flow(int n, const std::vector<Arc>& arcs, const std::vector<double>& supply) {
  struct E {
    int to;
    double cap;
    double cost;
    std::size_t rev;
  };
  const int s = n, t = n + 1, total = n + 2;
  std::vector<std::vector<E>> g(static_cast<std::size_t>(total));
  auto add = [&](int u, int v, double cap, double cost) {
    g[u].push_back({v, cap, cost, g[v].size()});
    g[v].push_back({u, 0.0, -cost, g[u].size() - 1});
  };
  const double inf = std::numeric_limits<double>::infinity();
  double need = 0.0;
  for (int i = 0; i < n; ++i) {
    if (supply[i] > 0) {
      add(s, i, supply[i], 0.0);
      need += supply[i];
    } else if (supply[i] < 0) {
      add(i, t, -supply[i], 0.0);
    }
  }
  for (const auto& a : arcs) add(a.from, a.to, inf, a.cost);
  double cost = 0.0;
  while (need > 1e-13) {
    std::vector<double> dist(static_cast<std::size_t>(total), inf);
    std::vector<std::pair<int, std::size_t>> prev(static_cast<std::size_t>(total), {-1, 0});
    dist[s] = 0.0;
    for (int round = 0; round < total; ++round) {
      bool changed = false;
      for (int u = 0; u < total; ++u) {
        if (dist[u] == inf) continue;
        for (std::size_t k = 0; k < g[u].size(); ++k) {
          const E& e = g[u][k];
          if (e.cap > 1e-15 && (dist[e.to] == inf || dist[u] + e.cost < dist[e.to] - 1e-12 * (1.0 + std::abs(dist[e.to])))) {
            dist[e.to] = dist[u] + e.cost;
            prev[e.to] = {u, k};
            changed = true;
          }
        }
      }
      if (!changed) break;
    }
    if (dist[t] == inf) break;
    // Rounding can leave a tiny negative cycle in the residual graph; the
    // predecessor walk then loops. Cancel the cycle and search again.
    std::vector<int> seen(static_cast<std::size_t>(total), 0);
    int v = t;
    while (v != s && !seen[v]) {
      seen[v] = 1;
      v = prev[v].first;
    }
    if (v != s) {
      double cap = inf;
      int w = v;
      do {
        cap = std::min(cap, g[prev[w].first][prev[w].second].cap);
        w = prev[w].first;
      } while (w != v);
      do {
        E& e = g[prev[w].first][prev[w].second];
        e.cap -= cap;
        g[w][e.rev].cap += cap;
        cost += cap * e.cost;
        w = prev[w].first;
      } while (w != v);
      continue;
    }
    double push = inf;
    for (int v = t; v != s; v = prev[v].first) push = std::min(push, g[prev[v].first][prev[v].second].cap);
    for (int v = t; v != s; v = prev[v].first) {
      E& e = g[prev[v].first][prev[v].second];
      e.cap -= push;
      g[v][e.rev].cap += push;
    }
    cost += push * dist[t];
    need -= push;
  }
  return cost;
}

// W1 of a balanced atom measure through the bipartite transport graph.
inline double transport(const kr::SignedAtomMeasure& f) {
  const auto& atoms = f.atoms();
  const int n = static_cast<int>(atoms.size());
  std::vector<Arc> arcs;
  std::vector<double> supply;
  for (int i = 0; i < n; ++i) {
    supply.push_back(atoms[i].mass);
    for (int j = 0; j < n; ++j) {
      if (atoms[i].mass > 0 && atoms[j].mass < 0) {
        arcs.push_back({i, j, kr::distance(atoms[i].point, atoms[j].point)});
      }
    }
  }
  return min_cost_flow(n, arcs, supply);
}

// sup <f,u> over |u| <= bound, Lip(u) <= 1: transport where any atom may also
// trade mass with a ground node at cost `bound`.
inline double grounded(const kr::SignedAtomMeasure& f, double bound) {
  const auto& atoms = f.atoms();
  const int n = static_cast<int>(atoms.size());
  std::vector<Arc> arcs;
  std::vector<double> supply;
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    supply.push_back(atoms[i].mass);
    total += atoms[i].mass;
    arcs.push_back({i, n, bound});
    arcs.push_back({n, i, bound});
    for (int j = 0; j < n; ++j) {
      if (i != j) arcs.push_back({i, j, kr::distance(atoms[i].point, atoms[j].point)});
    }
  }
  supply.push_back(-total);
  return min_cost_flow(n + 1, arcs, supply);
}

// Flat norm, |u| <= 1 and Lip(u) <= 1.
inline double flat_max(const kr::SignedAtomMeasure& f) { return grounded(f, 1.0); }

// Flat norm, |u| + Lip(u) <= 1: the value at budget L is L * grounded(f,
// (1-L)/L), concave in L; maximised by golden-section search.
inline double flat_sum(const kr::SignedAtomMeasure& f) {
  auto value = [&](double L) { return L <= 0.0 ? 0.0 : L * grounded(f, (1.0 - L) / L); };
  double a = 0.0, b = 1.0;
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - r * (b - a), d = a + r * (b - a);
  double fc = value(c), fd = value(d);
  for (int it = 0; it < 80; ++it) {
    if (fc < fd) {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      fd = value(d);
    } else {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      fc = value(c);
    }
  }
  return std::max({fc, fd, value(1.0)});
}

// Central differences.
inline kr::Vec gradient(const kr::TestFunction& phi, const kr::Point& x, double h = 1e-6) {
  kr::Vec g = kr::Vec::zero(x.dim);
  for (int i = 0; i < x.dim; ++i) {
    kr::Point a = x, b = x;
    a[i] -= h;
    b[i] += h;
    g[i] = (phi.value(b) - phi.value(a)) / (2 * h);
  }
  return g;
}

}  // namespace oracle

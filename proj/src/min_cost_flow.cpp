#include "kr/min_cost_flow.hpp"

#include <cmath>
#include <limits>
#include <queue>
#include <string>

#include "kr/error.hpp"

namespace kr {

MinCostFlow::MinCostFlow(int num_nodes)
    : num_nodes_(num_nodes),
      out_(static_cast<std::size_t>(num_nodes)),
      in_(static_cast<std::size_t>(num_nodes)) {}

int MinCostFlow::add_arc(int from, int to, double cost) {
  if (from < 0 || to < 0 || from >= num_nodes_ || to >= num_nodes_) {
    throw ValidationError("arc endpoint out of range");
  }
  if (!(cost >= 0.0) || !std::isfinite(cost)) {
    throw ValidationError("arc costs must be finite and nonnegative");
  }
  const int id = num_arcs();
  from_.push_back(from);
  to_.push_back(to);
  cost_.push_back(cost);
  out_[static_cast<std::size_t>(from)].push_back(id);
  in_[static_cast<std::size_t>(to)].push_back(id);
  return id;
}

MinCostFlow::Result MinCostFlow::solve(std::span<const double> supply, double zero_tol) const {
  if (static_cast<int>(supply.size()) != num_nodes_) {
    throw ValidationError("supply vector size does not match the node count");
  }
  const auto n = static_cast<std::size_t>(num_nodes_);
  constexpr double kInf = std::numeric_limits<double>::infinity();

  double scale = 0.0;
  for (double s : supply) scale += std::abs(s);
  const double tol = zero_tol * scale;

  Result res;
  res.arc_flow.assign(from_.size(), 0.0);
  res.potential.assign(n, 0.0);
  std::vector<double> excess(supply.begin(), supply.end());
  auto& flow = res.arc_flow;
  auto& pi = res.potential;

  std::vector<double> dist(n);
  std::vector<int> pred_arc(n);
  std::vector<char> pred_backward(n), done(n);

  auto has_excess = [&] {
    bool pos = false, neg = false;
    for (double e : excess) {
      pos = pos || e > tol;
      neg = neg || e < -tol;
    }
    return pos && neg;
  };

  using Entry = std::pair<double, int>;
  while (has_excess()) {
    std::fill(dist.begin(), dist.end(), kInf);
    std::fill(pred_arc.begin(), pred_arc.end(), -1);
    std::fill(done.begin(), done.end(), 0);
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
    for (std::size_t v = 0; v < n; ++v) {
      if (excess[v] > tol) {
        dist[v] = 0.0;
        heap.emplace(0.0, static_cast<int>(v));
      }
    }
    auto relax = [&](int u, int v, int arc, bool backward, double cost) {
      double rc = cost + pi[static_cast<std::size_t>(u)] - pi[static_cast<std::size_t>(v)];
      if (rc < 0.0) rc = 0.0;
      const double nd = dist[static_cast<std::size_t>(u)] + rc;
      if (nd < dist[static_cast<std::size_t>(v)]) {
        dist[static_cast<std::size_t>(v)] = nd;
        pred_arc[static_cast<std::size_t>(v)] = arc;
        pred_backward[static_cast<std::size_t>(v)] = backward;
        heap.emplace(nd, v);
      }
    };
    while (!heap.empty()) {
      const auto [d, u] = heap.top();
      heap.pop();
      const auto uu = static_cast<std::size_t>(u);
      if (done[uu] || d > dist[uu]) continue;
      done[uu] = 1;
      for (int a : out_[uu]) relax(u, to_[static_cast<std::size_t>(a)], a, false, cost_[static_cast<std::size_t>(a)]);
      for (int a : in_[uu]) {
        if (flow[static_cast<std::size_t>(a)] > 0.0) {
          relax(u, from_[static_cast<std::size_t>(a)], a, true, -cost_[static_cast<std::size_t>(a)]);
        }
      }
    }

    int target = -1;
    for (std::size_t v = 0; v < n; ++v) {
      if (excess[v] < -tol && done[v] &&
          (target < 0 || dist[v] < dist[static_cast<std::size_t>(target)])) {
        target = static_cast<int>(v);
      }
    }
    if (target < 0) {
      throw InfeasibleError("remaining supply cannot reach any sink (disconnected network)");
    }
    const double dt = dist[static_cast<std::size_t>(target)];
    for (std::size_t v = 0; v < n; ++v) pi[v] += done[v] ? std::min(dist[v], dt) : dt;

    // Walk back to the source and find the bottleneck.
    double delta = -excess[static_cast<std::size_t>(target)];
    int v = target;
    while (pred_arc[static_cast<std::size_t>(v)] >= 0) {
      const auto a = static_cast<std::size_t>(pred_arc[static_cast<std::size_t>(v)]);
      if (pred_backward[static_cast<std::size_t>(v)]) {
        delta = std::min(delta, flow[a]);
        v = to_[a];
      } else {
        v = from_[a];
      }
    }
    const int source = v;
    delta = std::min(delta, excess[static_cast<std::size_t>(source)]);

    v = target;
    while (pred_arc[static_cast<std::size_t>(v)] >= 0) {
      const auto a = static_cast<std::size_t>(pred_arc[static_cast<std::size_t>(v)]);
      if (pred_backward[static_cast<std::size_t>(v)]) {
        flow[a] = flow[a] == delta ? 0.0 : flow[a] - delta;
        v = to_[a];
      } else {
        flow[a] += delta;
        v = from_[a];
      }
    }
    auto& es = excess[static_cast<std::size_t>(source)];
    auto& et = excess[static_cast<std::size_t>(target)];
    es = es == delta ? 0.0 : es - delta;
    et = -et == delta ? 0.0 : et + delta;
    ++res.augmentations;
  }

  for (std::size_t a = 0; a < flow.size(); ++a) res.cost += flow[a] * cost_[a];
  return res;
}

}  // namespace kr

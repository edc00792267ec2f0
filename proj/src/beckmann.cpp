#include "kr/beckmann.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "kr/error.hpp"
#include "kr/format.hpp"
#include "kr/min_cost_flow.hpp"

namespace kr {
namespace {

Vec cross(const Vec& a, const Vec& b) {
  return Vec(a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]);
}

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  }
  void unite(int a, int b) { parent[static_cast<std::size_t>(find(a))] = find(b); }
};

}  // namespace

void FlowNetwork::validate() const {
  if (supply.size() != nodes.size()) throw ValidationError("supply size does not match nodes");
  for (const auto& e : edges) {
    if (e.i < 0 || e.j < 0 || e.i >= static_cast<int>(nodes.size()) ||
        e.j >= static_cast<int>(nodes.size()) || e.i == e.j) {
      throw ValidationError("edge endpoint out of range");
    }
    if (!(e.length > 0.0) || !std::isfinite(e.length)) {
      throw ValidationError("edge lengths must be positive");
    }
  }
  double total = 0.0, scale = 0.0;
  for (double s : supply) {
    total += s;
    scale += std::abs(s);
  }
  if (std::abs(total) > 1e-9 * scale) {
    throw ValidationError("network supply is unbalanced (total " + format_double(total) + ")");
  }
}

FlowNetwork complete_network(const SignedAtomMeasure& f) {
  FlowNetwork net;
  for (const auto& a : f.atoms()) {
    net.nodes.push_back(a.point);
    net.supply.push_back(a.mass);
  }
  const int n = static_cast<int>(net.nodes.size());
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      net.edges.push_back({i, j, distance(net.nodes[static_cast<std::size_t>(i)],
                                          net.nodes[static_cast<std::size_t>(j)])});
    }
  }
  return net;
}

double stencil_anisotropy(const std::vector<Vec>& steps) {
  if (steps.empty()) return 1.0;
  const int dim = steps.front().dim;
  std::vector<Vec> gens;
  for (const auto& s : steps) {
    const Vec u = s * (1.0 / norm(s));
    gens.push_back(u);
    gens.push_back(-u);
  }
  // The graph metric is the gauge of conv(gens); its worst ratio to the
  // Euclidean norm is 1 / (distance from the origin to the nearest facet).
  double min_offset = std::numeric_limits<double>::infinity();
  const std::size_t g = gens.size();
  auto consider = [&](Vec normal, const Vec& on_plane) {
    const double nn = norm(normal);
    if (nn < 1e-12) return;
    normal *= 1.0 / nn;
    double h = dot(normal, on_plane);
    if (h < 0.0) {
      normal *= -1.0;
      h = -h;
    }
    if (h < 1e-12) return;
    for (const auto& q : gens) {
      if (dot(normal, q) > h + 1e-12) return;
    }
    min_offset = std::min(min_offset, h);
  };
  if (dim == 2) {
    for (std::size_t a = 0; a < g; ++a) {
      for (std::size_t b = a + 1; b < g; ++b) {
        const Vec d = gens[b] - gens[a];
        consider(Vec(-d[1], d[0]), gens[a]);
      }
    }
  } else {
    for (std::size_t a = 0; a < g; ++a) {
      for (std::size_t b = a + 1; b < g; ++b) {
        for (std::size_t c = b + 1; c < g; ++c) {
          consider(cross(gens[b] - gens[a], gens[c] - gens[a]), gens[a]);
        }
      }
    }
  }
  return std::isfinite(min_offset) ? 1.0 / min_offset : 1.0;
}

FlowNetwork grid_network(const Domain& domain, const std::array<int, 3>& resolution,
                         const SignedAtomMeasure& f, bool diagonals) {
  const int dim = domain.dim();
  Grid grid{domain, {1, 1, 1}};
  std::size_t cells = 1;
  for (int i = 0; i < dim; ++i) {
    if (resolution[static_cast<std::size_t>(i)] < 1) {
      throw ValidationError("grid resolution must be >= 1 on every axis");
    }
    grid.counts[static_cast<std::size_t>(i)] = resolution[static_cast<std::size_t>(i)];
    cells *= static_cast<std::size_t>(resolution[static_cast<std::size_t>(i)]);
    if (!(domain.upper[i] > domain.lower[i])) throw ValidationError("empty domain");
  }
  if (cells < 2) throw ValidationError("grid needs at least two cells (resolution 1 on every axis)");

  FlowNetwork net;
  net.nodes.reserve(cells);
  for (std::size_t c = 0; c < cells; ++c) net.nodes.push_back(grid.cell_center(c));
  net.supply.assign(cells, 0.0);
  for (const auto& a : f.atoms()) {
    if (a.point.dim != dim) throw ValidationError("atom dimension does not match the domain");
    const auto c = grid.locate(a.point);
    if (!c) throw ValidationError("atom " + to_string(a.point) + " lies outside the domain");
    net.supply[*c] += a.mass;
  }

  // Half of the neighbour offsets (first nonzero component positive).
  std::vector<std::array<int, 3>> offsets;
  const int zr = dim == 3 ? 1 : 0;
  for (int dz = -zr; dz <= zr; ++dz) {
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        const std::array<int, 3> o{dx, dy, dz};
        const int nonzero = (dx != 0) + (dy != 0) + (dz != 0);
        if (nonzero == 0 || (!diagonals && nonzero > 1)) continue;
        const int first = dx != 0 ? dx : (dy != 0 ? dy : dz);
        if (first < 0) continue;
        offsets.push_back(o);
      }
    }
  }
  std::vector<Vec> steps;
  for (const auto& o : offsets) {
    bool usable = true;
    Vec s = Vec::zero(dim);
    for (int i = 0; i < dim; ++i) {
      if (o[static_cast<std::size_t>(i)] != 0 && grid.counts[static_cast<std::size_t>(i)] < 2) usable = false;
      s[i] = o[static_cast<std::size_t>(i)] * grid.cell_size(i);
    }
    if (usable) steps.push_back(s);
  }
  for (std::size_t c = 0; c < cells; ++c) {
    const auto ijk = grid.unflatten(c);
    for (const auto& o : offsets) {
      std::array<int, 3> nb = ijk;
      bool inside = true;
      for (int i = 0; i < dim; ++i) {
        nb[static_cast<std::size_t>(i)] += o[static_cast<std::size_t>(i)];
        if (nb[static_cast<std::size_t>(i)] < 0 || nb[static_cast<std::size_t>(i)] >= grid.counts[static_cast<std::size_t>(i)]) inside = false;
      }
      if (!inside) continue;
      const std::size_t d = grid.flatten(nb);
      net.edges.push_back({static_cast<int>(c), static_cast<int>(d),
                           distance(net.nodes[c], net.nodes[d])});
    }
  }

  // Anisotropy over the axes that actually have neighbours.
  std::vector<int> active;
  for (int i = 0; i < dim; ++i) {
    if (grid.counts[static_cast<std::size_t>(i)] > 1) active.push_back(i);
  }
  if (active.size() >= 2) {
    std::vector<Vec> projected;
    for (const auto& s : steps) {
      Vec p = Vec::zero(static_cast<int>(active.size()));
      for (std::size_t k = 0; k < active.size(); ++k) p[static_cast<int>(k)] = s[active[k]];
      projected.push_back(p);
    }
    net.anisotropy_bound = stencil_anisotropy(projected);
  }
  return net;
}

Flow solve_beckmann(const FlowNetwork& net) {
  net.validate();
  const std::size_t n = net.nodes.size();
  UnionFind uf(n);
  for (const auto& e : net.edges) uf.unite(e.i, e.j);
  std::vector<double> comp_total(n, 0.0);
  double scale = 0.0;
  for (std::size_t v = 0; v < n; ++v) {
    comp_total[static_cast<std::size_t>(uf.find(static_cast<int>(v)))] += net.supply[v];
    scale += std::abs(net.supply[v]);
  }
  for (std::size_t v = 0; v < n; ++v) {
    if (std::abs(comp_total[v]) > 1e-9 * scale) {
      throw InfeasibleError("component containing node " + std::to_string(v) +
                            " has net supply " + format_double(comp_total[v]));
    }
  }

  MinCostFlow mcf(static_cast<int>(n));
  for (const auto& e : net.edges) {
    mcf.add_arc(e.i, e.j, e.length);
    mcf.add_arc(e.j, e.i, e.length);
  }
  const auto r = mcf.solve(net.supply);

  Flow flow;
  flow.edge_flows.resize(net.edges.size());
  for (std::size_t k = 0; k < net.edges.size(); ++k) {
    flow.edge_flows[k] = r.arc_flow[2 * k] - r.arc_flow[2 * k + 1];
    flow.cost += std::abs(flow.edge_flows[k]) * net.edges[k].length;
  }
  flow.potential.resize(n);
  for (std::size_t v = 0; v < n; ++v) flow.potential[v] = -r.potential[v];
  if (n > 0) {
    const double lo = *std::min_element(flow.potential.begin(), flow.potential.end());
    for (auto& u : flow.potential) u -= lo;
  }
  return flow;
}

double balance_residual(const FlowNetwork& net, const Flow& flow) {
  std::vector<double> net_in(net.nodes.size(), 0.0);
  for (std::size_t k = 0; k < net.edges.size(); ++k) {
    net_in[static_cast<std::size_t>(net.edges[k].j)] += flow.edge_flows[k];
    net_in[static_cast<std::size_t>(net.edges[k].i)] -= flow.edge_flows[k];
  }
  double worst = 0.0;
  for (std::size_t v = 0; v < net.nodes.size(); ++v) {
    worst = std::max(worst, std::abs(net_in[v] + net.supply[v]));
  }
  return worst;
}

StructuredVectorMeasure flow_to_vector_measure(const FlowNetwork& net, const Flow& flow) {
  StructuredVectorMeasure nu;
  for (std::size_t k = 0; k < net.edges.size(); ++k) {
    const double fl = flow.edge_flows[k];
    if (fl == 0.0) continue;
    const Point& pi = net.nodes[static_cast<std::size_t>(net.edges[k].i)];
    const Point& pj = net.nodes[static_cast<std::size_t>(net.edges[k].j)];
    // Mass moving i -> j is represented by a segment j -> i pointing at i.
    const Point& a = fl > 0.0 ? pj : pi;
    const Point& b = fl > 0.0 ? pi : pj;
    const Vec dir = (b - a) * (1.0 / distance(a, b));
    nu.segments.push_back({a, b, dir * std::abs(fl)});
  }
  return nu;
}

}  // namespace kr

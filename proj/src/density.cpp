#include "kr/density.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <thread>

#include "kr/error.hpp"
#include "kr/format.hpp"

namespace kr {
namespace {

constexpr std::size_t kBlock = 256;

struct Contribution {
  std::size_t cell;
  double mass;
};

// Clips items in fixed-size blocks (possibly on several threads) and then
// accumulates all contributions in item order, so the floating-point sums
// do not depend on the thread count.
template <class Producer>
void accumulate_blocks(std::size_t count, unsigned threads, std::vector<double>& out,
                       Producer produce) {
  const std::size_t blocks = (count + kBlock - 1) / kBlock;
  std::vector<std::vector<Contribution>> parts(blocks);
  auto work = [&](std::size_t first_block, std::size_t stride) {
    for (std::size_t b = first_block; b < blocks; b += stride) {
      const std::size_t end = std::min(count, (b + 1) * kBlock);
      for (std::size_t k = b * kBlock; k < end; ++k) produce(k, parts[b]);
    }
  };
  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(blocks)));
  if (workers <= 1) {
    work(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w, workers);
    for (auto& t : pool) t.join();
  }
  for (const auto& part : parts) {
    for (const auto& c : part) out[c.cell] += c.mass;
  }
}

double overlap_1d(double a0, double a1, double b0, double b1) {
  return std::max(0.0, std::min(a1, b1) - std::max(a0, b0));
}

}  // namespace

double GridDensity::total() const {
  double s = 0.0;
  for (double m : mass) s += m;
  return s;
}

double GridDensity::max() const {
  double s = 0.0;
  for (double m : mass) s = std::max(s, m);
  return s;
}

Grid make_grid(const Domain& domain, const std::array<int, 3>& counts) {
  Grid g{domain, {1, 1, 1}};
  for (int i = 0; i < domain.dim(); ++i) {
    if (counts[static_cast<std::size_t>(i)] < 1) throw ValidationError("grid counts must be >= 1");
    if (!(domain.upper[i] > domain.lower[i])) throw ValidationError("empty grid domain");
    g.counts[static_cast<std::size_t>(i)] = counts[static_cast<std::size_t>(i)];
  }
  return g;
}

std::vector<CellPiece> clip_segment(const Point& a, const Point& b, const Grid& grid) {
  if (!grid.domain.contains(a) || !grid.domain.contains(b)) {
    throw ValidationError("segment " + to_string(a) + " -> " + to_string(b) +
                          " leaves the grid domain");
  }
  const int dim = grid.dim();
  const Vec ab = b - a;
  const double len = norm(ab);
  std::vector<CellPiece> out;
  if (len == 0.0) return out;

  // Slab crossings: parameters where the segment meets interior grid planes.
  std::vector<double> ts{0.0, 1.0};
  for (int i = 0; i < dim; ++i) {
    if (ab[i] == 0.0) continue;
    const double h = grid.cell_size(i);
    for (int k = 1; k < grid.counts[static_cast<std::size_t>(i)]; ++k) {
      const double t = (grid.domain.lower[i] + k * h - a[i]) / ab[i];
      if (t > 0.0 && t < 1.0) ts.push_back(t);
    }
  }
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
  for (std::size_t k = 0; k + 1 < ts.size(); ++k) {
    const double dt = ts[k + 1] - ts[k];
    if (dt <= 0.0) continue;
    const Point mid = a + (0.5 * (ts[k] + ts[k + 1])) * ab;
    const auto cell = grid.locate(mid);
    const std::size_t c = cell ? *cell : *grid.locate(a);
    if (!out.empty() && out.back().cell == c) {
      out.back().length += dt * len;
    } else {
      out.push_back({c, dt * len});
    }
  }
  return out;
}

GridDensity rasterize_plan(const Matching& gamma, const Grid& grid, RasterOptions opts) {
  GridDensity d{grid, std::vector<double>(grid.num_cells(), 0.0)};
  accumulate_blocks(gamma.edges.size(), opts.threads, d.mass,
                    [&](std::size_t k, std::vector<Contribution>& out) {
                      const auto& e = gamma.edges[k];
                      for (const auto& p : clip_segment(e.source, e.target, grid)) {
                        out.push_back({p.cell, e.mass * p.length});
                      }
                    });
  return d;
}

GridDensity rasterize_vector_measure(const StructuredVectorMeasure& nu, const Grid& grid,
                                     RasterOptions opts) {
  GridDensity d{grid, std::vector<double>(grid.num_cells(), 0.0)};
  for (const auto& a : nu.atoms) {
    const auto c = grid.locate(a.point);
    if (!c) throw ValidationError("vector atom " + to_string(a.point) + " outside the grid");
    d.mass[*c] += norm(a.vector);
  }
  accumulate_blocks(nu.segments.size(), opts.threads, d.mass,
                    [&](std::size_t k, std::vector<Contribution>& out) {
                      const auto& g = nu.segments[k];
                      const double m = norm(g.density);
                      for (const auto& p : clip_segment(g.a, g.b, grid)) {
                        out.push_back({p.cell, m * p.length});
                      }
                    });
  if (nu.cells) {
    const Grid& src = nu.cells->grid;
    const int dim = grid.dim();
    for (std::size_t c = 0; c < src.num_cells(); ++c) {
      const double m = norm(nu.cells->vectors[c]);
      if (m == 0.0) continue;
      const Domain box = src.cell_box(c);
      if (!grid.domain.contains(box.lower) || !grid.domain.contains(box.upper)) {
        throw ValidationError("cell part extends outside the grid domain");
      }
      std::array<int, 3> lo{0, 0, 0}, hi{0, 0, 0};
      for (int i = 0; i < dim; ++i) {
        const double h = grid.cell_size(i);
        lo[i] = std::clamp(static_cast<int>(std::floor((box.lower[i] - grid.domain.lower[i]) / h)),
                           0, grid.counts[i] - 1);
        hi[i] = std::clamp(static_cast<int>(std::floor((box.upper[i] - grid.domain.lower[i]) / h)),
                           0, grid.counts[i] - 1);
      }
      for (int z = lo[2]; z <= hi[2]; ++z) {
        for (int y = lo[1]; y <= hi[1]; ++y) {
          for (int x = lo[0]; x <= hi[0]; ++x) {
            const std::size_t t = grid.flatten({x, y, z});
            const Domain dst = grid.cell_box(t);
            double ov = 1.0;
            for (int i = 0; i < dim; ++i) {
              ov *= overlap_1d(box.lower[i], box.upper[i], dst.lower[i], dst.upper[i]);
            }
            if (ov > 0.0) d.mass[t] += m * ov;
          }
        }
      }
    }
  }
  return d;
}

std::string export_density(const GridDensity& density, ExportFormat format) {
  const Grid& g = density.grid;
  const int dim = g.dim();
  std::ostringstream os;
  if (format == ExportFormat::kCsv) {
    for (std::size_t c = 0; c < g.num_cells(); ++c) {
      const auto ijk = g.unflatten(c);
      os << ijk[0] << ',' << ijk[1];
      if (dim == 3) os << ',' << ijk[2];
      os << ',' << format_double(density.mass[c]) << '\n';
    }
    return os.str();
  }
  if (dim != 2) throw ValidationError("svg and ascii export need a 2-D grid");
  const double peak = density.max();
  const int nx = g.counts[0], ny = g.counts[1];
  auto ratio = [&](std::size_t c) { return peak > 0.0 ? density.mass[c] / peak : 0.0; };
  if (format == ExportFormat::kAscii) {
    static constexpr char kRamp[] = " .:-=+*#%@";
    for (int j = ny - 1; j >= 0; --j) {
      for (int i = 0; i < nx; ++i) {
        const auto level = static_cast<int>(std::lround(9.0 * ratio(g.flatten({i, j, 0}))));
        os << kRamp[std::clamp(level, 0, 9)];
      }
      os << '\n';
    }
    return os.str();
  }
  constexpr int kPx = 10;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << nx * kPx << "\" height=\""
     << ny * kPx << "\" shape-rendering=\"crispEdges\">\n";
  for (int j = ny - 1; j >= 0; --j) {
    for (int i = 0; i < nx; ++i) {
      const auto shade = 255 - static_cast<int>(std::lround(255.0 * ratio(g.flatten({i, j, 0}))));
      os << "<rect x=\"" << i * kPx << "\" y=\"" << (ny - 1 - j) * kPx << "\" width=\"" << kPx
         << "\" height=\"" << kPx << "\" fill=\"rgb(" << shade << ',' << shade << ',' << shade
         << ")\"/>\n";
    }
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace kr

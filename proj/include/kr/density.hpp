#pragma once

#include <string>
#include <vector>

#include "kr/matchnorm.hpp"
#include "kr/measures.hpp"

namespace kr {

/// Nonnegative mass per cell: a discretised transport density.
struct GridDensity {
  Grid grid;
  std::vector<double> mass;

  double total() const;
  double max() const;
};

/// Grid with `counts` cells per axis over `domain`. Throws ValidationError
/// for counts < 1.
Grid make_grid(const Domain& domain, const std::array<int, 3>& counts);

struct CellPiece {
  std::size_t cell = 0;
  double length = 0.0;
};

/// Exact lengths of [a, b] inside each cell it crosses, in order along the
/// segment. Pieces lying on a shared face go to the lower-index cell.
/// Throws ValidationError if an endpoint is outside the grid domain.
std::vector<CellPiece> clip_segment(const Point& a, const Point& b, const Grid& grid);

struct RasterOptions {
  /// Worker threads for clipping; the result is bit-identical for any value.
  unsigned threads = 1;
};

/// mu = sum over edges of m * H^1 restricted to [x, y].
GridDensity rasterize_plan(const Matching& gamma, const Grid& grid, RasterOptions opts = {});

/// |nu|: segments by clipping, atoms into their cell, cells by overlap volume.
GridDensity rasterize_vector_measure(const StructuredVectorMeasure& nu, const Grid& grid,
                                     RasterOptions opts = {});

enum class ExportFormat { kCsv, kSvg, kAscii };

/// csv rows "i,j[,k],mass"; svg grey-level heat map normalised by the
/// maximum; ascii 10-level ramp, top row first. svg/ascii need a 2-D grid.
std::string export_density(const GridDensity& density, ExportFormat format);

}  // namespace kr

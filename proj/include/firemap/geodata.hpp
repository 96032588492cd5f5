#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "firemap/data.hpp"
#include "firemap/forest.hpp"

namespace firemap {

// Single-band grid in projected meters, row-major with the north row first.
struct GridRaster {
  int ncols = 0;
  int nrows = 0;
  double xllcorner = 0.0;
  double yllcorner = 0.0;
  double cellsize = 1.0;
  double nodata_value = -9999.0;
  std::vector<double> cells;

  std::size_t n_cells() const { return cells.size(); }
  double at(int row, int col) const { return cells[static_cast<std::size_t>(row) * ncols + col]; }
  double& at(int row, int col) { return cells[static_cast<std::size_t>(row) * ncols + col]; }
  bool is_nodata(double v) const { return v == nodata_value || !std::isfinite(v); }
  bool aligned_with(const GridRaster& other) const {
    return ncols == other.ncols && nrows == other.nrows && xllcorner == other.xllcorner &&
           yllcorner == other.yllcorner && cellsize == other.cellsize;
  }
  // Cell-center coordinates; row 0 is the northernmost row.
  double cell_x(int col) const { return xllcorner + (col + 0.5) * cellsize; }
  double cell_y(int row) const { return yllcorner + (nrows - row - 0.5) * cellsize; }
};

GridRaster read_ascii_grid(std::string_view text);
std::string write_ascii_grid(const GridRaster& g);
GridRaster read_ascii_grid_file(const std::string& path);
void write_ascii_grid_file(const GridRaster& g, const std::string& path);

// One aligned layer per schema feature plus optional district and stratum
// layers (stratum cells hold NLCD codes).
struct RasterStack {
  FeatureSchema schema = FeatureSchema::canonical();
  std::vector<GridRaster> features;
  std::optional<GridRaster> districts;
  std::optional<GridRaster> strata;

  void check_aligned() const;
};

// Wall-to-wall class-1 probability; nodata in any feature layer propagates.
GridRaster predict_raster(const Forest& f, const RasterStack& stack, int threads = 1);

struct RiskMap {
  GridRaster probability;
  GridRaster classes;  // 1 low, 2 moderate, 3 high, or nodata
  std::pair<double, double> cutoffs;
};

// class 1 iff p < c1, 2 iff c1 <= p < c2, 3 iff p >= c2.
RiskMap classify_risk(const GridRaster& probability, std::pair<double, double> cutoffs);

// Probability quantiles over non-nodata cells, for quantile-based zonation.
std::pair<double, double> quantile_cutoffs(const GridRaster& probability,
                                           std::pair<double, double> fractions);

struct DistrictAreaRow {
  std::string district_id;
  int risk_class = 0;
  double area_km2 = 0.0;
  double fraction = 0.0;  // of the district's tabulated area
};

std::vector<DistrictAreaRow> district_area_table(const RiskMap& rm, const GridRaster& districts);
std::string district_area_csv(const std::vector<DistrictAreaRow>& rows);

struct SynthParams {
  int ncols = 64;
  int nrows = 64;
  double cellsize = 1000.0;  // meters
  int smooth_radius = 3;
  FeatureSchema schema = FeatureSchema::canonical();
  std::vector<double> beta;  // empty = canonical defaults; zeros mark noise features
  double intercept = 0.0;
  std::uint64_t seed = 0;
  int region_blocks = 2;     // k for a k x k region layout
  double region_shift = 0.0; // per-region feature mean offsets, 0 = identically distributed
  int n_samples = 4000;
};

// Coefficients used when SynthParams.beta is empty: aspect and pop_density
// carry zero weight and act as the designated noise features.
std::vector<double> default_synth_beta();

struct SynthResult {
  RasterStack stack;
  GridRaster truth;  // per-cell ground-truth fire probability
  Dataset samples;
};

// Smoothed seeded noise features, logistic ground truth, Bernoulli labels
// at randomly drawn cells; fully deterministic per seed.
SynthResult synth_landscape(const SynthParams& params);

}  // namespace firemap

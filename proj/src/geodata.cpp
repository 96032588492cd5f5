#include "firemap/geodata.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "firemap/parallel.hpp"
#include "firemap/rng.hpp"

namespace firemap {

namespace {

const char* kHeaderKeys[] = {"ncols", "nrows", "xllcorner", "yllcorner", "cellsize",
                             "NODATA_value"};

bool iequals(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (std::tolower(static_cast<unsigned char>(a[i])) !=
        std::tolower(static_cast<unsigned char>(b[i])))
      return false;
  return true;
}

double logistic(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// Separable box blur with edge clamping; window is 2r+1 cells.
void box_blur(std::vector<double>& cells, int nrows, int ncols, int radius) {
  if (radius <= 0) return;
  std::vector<double> tmp(cells.size());
  auto idx = [ncols](int r, int c) { return static_cast<std::size_t>(r) * ncols + c; };
  for (int r = 0; r < nrows; ++r) {
    for (int c = 0; c < ncols; ++c) {
      double sum = 0.0;
      for (int dc = -radius; dc <= radius; ++dc) {
        const int cc = std::clamp(c + dc, 0, ncols - 1);
        sum += cells[idx(r, cc)];
      }
      tmp[idx(r, c)] = sum / (2 * radius + 1);
    }
  }
  for (int c = 0; c < ncols; ++c) {
    for (int r = 0; r < nrows; ++r) {
      double sum = 0.0;
      for (int dr = -radius; dr <= radius; ++dr) {
        const int rr = std::clamp(r + dr, 0, nrows - 1);
        sum += tmp[idx(rr, c)];
      }
      cells[idx(r, c)] = sum / (2 * radius + 1);
    }
  }
}

void standardize(std::vector<double>& cells) {
  double mean = 0.0;
  for (double v : cells) mean += v;
  mean /= static_cast<double>(cells.size());
  double var = 0.0;
  for (double v : cells) var += (v - mean) * (v - mean);
  var /= static_cast<double>(cells.size());
  const double sd = std::sqrt(var);
  if (sd == 0.0) return;
  for (double& v : cells) v = (v - mean) / sd;
}

}  // namespace

GridRaster read_ascii_grid(std::string_view text) {
  std::istringstream in{std::string(text)};
  GridRaster g;
  double header[6];
  for (int i = 0; i < 6; ++i) {
    std::string key, value;
    if (!(in >> key >> value))
      throw std::runtime_error("ascii grid: truncated header, expected key '" +
                               std::string(kHeaderKeys[i]) + "'");
    if (!iequals(key, kHeaderKeys[i]))
      throw std::runtime_error("ascii grid: expected header key '" + std::string(kHeaderKeys[i]) +
                               "', found '" + key + "'");
    header[i] = parse_double(value, "ascii grid: header " + key);
  }
  g.ncols = static_cast<int>(header[0]);
  g.nrows = static_cast<int>(header[1]);
  g.xllcorner = header[2];
  g.yllcorner = header[3];
  g.cellsize = header[4];
  g.nodata_value = header[5];
  if (g.ncols < 1 || g.nrows < 1)
    throw std::runtime_error("ascii grid: ncols and nrows must be positive");
  if (!(g.cellsize > 0.0)) throw std::runtime_error("ascii grid: cellsize must be positive");

  const std::size_t expected = static_cast<std::size_t>(g.ncols) * g.nrows;
  g.cells.reserve(expected);
  std::string token;
  while (in >> token) {
    if (g.cells.size() == expected)
      throw std::runtime_error("ascii grid: extra cell data after " + std::to_string(expected) +
                               " values");
    g.cells.push_back(parse_double(token, "ascii grid: cell " + std::to_string(g.cells.size())));
  }
  if (g.cells.size() != expected)
    throw std::runtime_error("ascii grid: expected " + std::to_string(expected) +
                             " cells, found " + std::to_string(g.cells.size()));
  return g;
}

std::string write_ascii_grid(const GridRaster& g) {
  if (g.cells.size() != static_cast<std::size_t>(g.ncols) * g.nrows)
    throw std::invalid_argument("write_ascii_grid: cell count does not match dimensions");
  std::string out;
  out += "ncols " + std::to_string(g.ncols) + "\n";
  out += "nrows " + std::to_string(g.nrows) + "\n";
  out += "xllcorner " + format_double(g.xllcorner) + "\n";
  out += "yllcorner " + format_double(g.yllcorner) + "\n";
  out += "cellsize " + format_double(g.cellsize) + "\n";
  out += "NODATA_value " + format_double(g.nodata_value) + "\n";
  for (int r = 0; r < g.nrows; ++r) {
    for (int c = 0; c < g.ncols; ++c) {
      if (c) out += ' ';
      out += format_double(g.at(r, c));
    }
    out += '\n';
  }
  return out;
}

GridRaster read_ascii_grid_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open raster file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return read_ascii_grid(buf.str());
}

void write_ascii_grid_file(const GridRaster& g, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write raster file '" + path + "'");
  out << write_ascii_grid(g);
}

void RasterStack::check_aligned() const {
  if (features.size() != schema.size())
    throw std::invalid_argument("RasterStack: layer count does not match schema");
  if (features.empty()) throw std::invalid_argument("RasterStack: no layers");
  for (const auto& layer : features)
    if (!layer.aligned_with(features[0]))
      throw std::invalid_argument("RasterStack: feature layers are not aligned");
  if (districts && !districts->aligned_with(features[0]))
    throw std::invalid_argument("RasterStack: district layer is not aligned");
  if (strata && !strata->aligned_with(features[0]))
    throw std::invalid_argument("RasterStack: stratum layer is not aligned");
}

GridRaster predict_raster(const Forest& f, const RasterStack& stack, int threads) {
  stack.check_aligned();
  std::vector<std::size_t> layer_of;  // model feature -> stack layer
  layer_of.reserve(f.schema.size());
  for (const auto& feat : f.schema.features()) {
    const auto idx = stack.schema.index_of(feat.name);
    if (!idx)
      throw std::invalid_argument("predict_raster: stack is missing feature layer '" + feat.name +
                                  "'");
    layer_of.push_back(*idx);
  }

  GridRaster out;
  out.ncols = stack.features[0].ncols;
  out.nrows = stack.features[0].nrows;
  out.xllcorner = stack.features[0].xllcorner;
  out.yllcorner = stack.features[0].yllcorner;
  out.cellsize = stack.features[0].cellsize;
  out.nodata_value = -9999.0;
  out.cells.assign(static_cast<std::size_t>(out.ncols) * out.nrows, out.nodata_value);

  parallel_for(static_cast<std::size_t>(out.nrows), threads, [&](std::size_t r) {
    std::vector<double> x(f.schema.size());
    for (int c = 0; c < out.ncols; ++c) {
      bool missing = false;
      for (std::size_t j = 0; j < layer_of.size(); ++j) {
        const GridRaster& layer = stack.features[layer_of[j]];
        const double v = layer.at(static_cast<int>(r), c);
        if (layer.is_nodata(v)) {
          missing = true;
          break;
        }
        x[j] = v;
      }
      if (!missing) out.at(static_cast<int>(r), c) = predict_proba(f, x);
    }
  });
  return out;
}

RiskMap classify_risk(const GridRaster& probability, std::pair<double, double> cutoffs) {
  const auto [c1, c2] = cutoffs;
  if (!(c1 >= 0.0 && c1 < c2 && c2 <= 1.0))
    throw std::invalid_argument("classify_risk: cutoffs must satisfy 0 <= c1 < c2 <= 1");

  RiskMap rm;
  rm.probability = probability;
  rm.cutoffs = cutoffs;
  rm.classes = probability;
  rm.classes.nodata_value = -9999.0;
  for (std::size_t i = 0; i < probability.cells.size(); ++i) {
    const double p = probability.cells[i];
    if (probability.is_nodata(p)) {
      rm.classes.cells[i] = rm.classes.nodata_value;
      continue;
    }
    if (!(p >= 0.0 && p <= 1.0))
      throw std::invalid_argument("classify_risk: probability outside [0,1] at cell " +
                                  std::to_string(i));
    rm.classes.cells[i] = (p < c1) ? 1.0 : (p < c2) ? 2.0 : 3.0;
  }
  return rm;
}

std::pair<double, double> quantile_cutoffs(const GridRaster& probability,
                                           std::pair<double, double> fractions) {
  const auto [q1, q2] = fractions;
  if (!(q1 > 0.0 && q1 < q2 && q2 < 1.0))
    throw std::invalid_argument("quantile_cutoffs: fractions must satisfy 0 < q1 < q2 < 1");
  std::vector<double> values;
  values.reserve(probability.cells.size());
  for (double v : probability.cells)
    if (!probability.is_nodata(v)) values.push_back(v);
  if (values.empty()) throw std::invalid_argument("quantile_cutoffs: raster has no data cells");
  std::sort(values.begin(), values.end());
  auto quantile = [&](double q) {
    if (values.size() == 1) return values[0];
    const double pos = q * static_cast<double>(values.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return values[lo] * (1.0 - frac) + values[hi] * frac;
  };
  return {quantile(q1), quantile(q2)};
}

std::vector<DistrictAreaRow> district_area_table(const RiskMap& rm, const GridRaster& districts) {
  if (!districts.aligned_with(rm.classes))
    throw std::invalid_argument("district_area_table: district raster is not aligned");

  std::map<double, std::array<std::int64_t, 3>> counts;
  for (std::size_t i = 0; i < districts.cells.size(); ++i) {
    const double dv = districts.cells[i];
    if (districts.is_nodata(dv)) continue;
    const double cv = rm.classes.cells[i];
    if (rm.classes.is_nodata(cv)) continue;
    const int cls = static_cast<int>(cv);
    if (cls < 1 || cls > 3 || static_cast<double>(cls) != cv)
      throw std::invalid_argument("district_area_table: class raster holds value " +
                                  format_double(cv));
    counts[dv][cls - 1] += 1;
  }

  const double km2_per_cell = rm.classes.cellsize * rm.classes.cellsize / 1e6;
  std::vector<DistrictAreaRow> rows;
  for (const auto& [district, per_class] : counts) {
    const std::int64_t total = per_class[0] + per_class[1] + per_class[2];
    if (total == 0) continue;
    for (int cls = 1; cls <= 3; ++cls) {
      DistrictAreaRow row;
      row.district_id = format_double(district);
      row.risk_class = cls;
      row.area_km2 = static_cast<double>(per_class[cls - 1]) * km2_per_cell;
      row.fraction = static_cast<double>(per_class[cls - 1]) / static_cast<double>(total);
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

std::string district_area_csv(const std::vector<DistrictAreaRow>& rows) {
  std::string out = "district_id,class,area_km2,fraction\n";
  for (const auto& r : rows)
    out += r.district_id + "," + std::to_string(r.risk_class) + "," + format_double(r.area_km2) +
           "," + format_double(r.fraction) + "\n";
  return out;
}

std::vector<double> default_synth_beta() {
  // Aligned to FeatureSchema::canonical(); aspect and pop_density are the
  // zero-coefficient noise features.
  return {-0.8, -0.5, -0.4, 1.0, -0.3, 0.4, 0.0, -0.6, 0.7, 0.9, 0.0};
}

SynthResult synth_landscape(const SynthParams& params) {
  if (params.ncols < 2 || params.nrows < 2)
    throw std::invalid_argument("synth_landscape: degenerate grid");
  if (params.smooth_radius < 0)
    throw std::invalid_argument("synth_landscape: smooth_radius must be >= 0");
  if (params.region_blocks < 1)
    throw std::invalid_argument("synth_landscape: region_blocks must be >= 1");

  std::vector<double> beta = params.beta;
  if (beta.empty()) {
    if (!(params.schema == FeatureSchema::canonical()))
      throw std::invalid_argument("synth_landscape: beta required for a non-canonical schema");
    beta = default_synth_beta();
  }
  if (beta.size() != params.schema.size())
    throw std::invalid_argument("synth_landscape: beta length does not match schema");
  int zero_count = 0;
  for (double b : beta) {
    if (!std::isfinite(b)) throw std::invalid_argument("synth_landscape: non-finite coefficient");
    if (b == 0.0) ++zero_count;
  }
  if (zero_count < 2)
    throw std::invalid_argument("synth_landscape: need at least 2 zero-coefficient noise features");

  const std::size_t n_cells = static_cast<std::size_t>(params.ncols) * params.nrows;
  if (params.n_samples < 0 || static_cast<std::size_t>(params.n_samples) > n_cells)
    throw std::invalid_argument("synth_landscape: n_samples must lie in [0, cells]");

  auto blank = [&]() {
    GridRaster g;
    g.ncols = params.ncols;
    g.nrows = params.nrows;
    g.cellsize = params.cellsize;
    g.cells.assign(n_cells, 0.0);
    return g;
  };

  RasterStack stack;
  stack.schema = params.schema;

  // Region layout: k x k blocks of roughly equal size.
  const int k = params.region_blocks;
  const int block_rows = (params.nrows + k - 1) / k;
  const int block_cols = (params.ncols + k - 1) / k;
  auto block_of = [&](int r, int c) { return (r / block_rows) * k + (c / block_cols); };

  // Per-region offsets, scaled by the distribution-shift knob.
  const std::size_t p = params.schema.size();
  Rng shift_rng(derive_seed(params.seed, kStreamSynthShift));
  std::vector<double> offsets(p * static_cast<std::size_t>(k) * k);
  for (double& o : offsets) o = shift_rng.normal();

  const std::uint64_t feature_root = derive_seed(params.seed, kStreamSynthFeature);
  for (std::size_t j = 0; j < p; ++j) {
    GridRaster layer = blank();
    Rng rng(derive_seed(feature_root, j));
    for (double& v : layer.cells) v = rng.normal();
    box_blur(layer.cells, params.nrows, params.ncols, params.smooth_radius);
    standardize(layer.cells);
    for (int r = 0; r < params.nrows; ++r)
      for (int c = 0; c < params.ncols; ++c)
        layer.at(r, c) += params.region_shift *
                          offsets[j * static_cast<std::size_t>(k) * k + block_of(r, c)];
    stack.features.push_back(std::move(layer));
  }

  GridRaster truth = blank();
  for (std::size_t i = 0; i < n_cells; ++i) {
    double z = params.intercept;
    for (std::size_t j = 0; j < p; ++j) z += beta[j] * stack.features[j].cells[i];
    truth.cells[i] = logistic(z);
  }

  GridRaster districts = blank();
  for (int r = 0; r < params.nrows; ++r)
    for (int c = 0; c < params.ncols; ++c) districts.at(r, c) = block_of(r, c);
  stack.districts = districts;

  const std::size_t cover_idx = params.schema.index_of("tree_cover").value_or(0);
  GridRaster strata = blank();
  for (std::size_t i = 0; i < n_cells; ++i)
    strata.cells[i] = stack.features[cover_idx].cells[i] >= 0.0 ? 41.0 : 71.0;
  stack.strata = strata;

  Rng sample_rng(derive_seed(params.seed, kStreamSynthSample));
  const auto chosen =
      sample_rng.sample_without_replacement(n_cells, static_cast<std::size_t>(params.n_samples));
  std::vector<Sample> samples;
  samples.reserve(chosen.size());
  char id_buf[16];
  for (std::size_t s = 0; s < chosen.size(); ++s) {
    const std::size_t cell = chosen[s];
    const int r = static_cast<int>(cell / params.ncols);
    const int c = static_cast<int>(cell % params.ncols);
    Sample sample;
    std::snprintf(id_buf, sizeof(id_buf), "s%06zu", s);
    sample.id = id_buf;
    sample.lon = truth.cell_x(c);
    sample.lat = truth.cell_y(r);
    sample.region_id = std::to_string(block_of(r, c));
    sample.district_id = sample.region_id;
    sample.stratum = stratum_from_nlcd(static_cast<int>(strata.at(r, c)));
    sample.year = sample_rng.uniform() < 0.5 ? 2024 : 2025;
    sample.label = sample_rng.uniform() < truth.at(r, c) ? 1 : 0;
    sample.values.resize(p);
    for (std::size_t j = 0; j < p; ++j) sample.values[j] = stack.features[j].at(r, c);
    samples.push_back(std::move(sample));
  }
  return SynthResult{std::move(stack), std::move(truth),
                     Dataset(params.schema, std::move(samples))};
}

}  // namespace firemap

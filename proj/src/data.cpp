#include "firemap/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "firemap/rng.hpp"

namespace firemap {

namespace {

const char* kMetaColumns[] = {"id",      "lon",     "lat",  "region_id",
                              "district_id", "stratum", "year", "label"};
constexpr std::size_t kMetaCount = 8;

std::string row_col(std::size_t row, const std::string& col) {
  return "row " + std::to_string(row) + ", column '" + col + "'";
}

std::vector<std::string> split_line(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      out.emplace_back(line.substr(start));
      break;
    }
    out.emplace_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

long long parse_int(std::string_view text, const std::string& context) {
  long long value = 0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last)
    throw std::runtime_error("samples csv: " + context + ": '" + std::string(text) +
                             "' is not an integer");
  return value;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

double parse_double(std::string_view text, const std::string& context) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last)
    throw std::runtime_error(context + ": '" + std::string(text) + "' is not a number");
  return value;
}

FeatureSchema::FeatureSchema(std::vector<Feature> features) : features_(std::move(features)) {
  if (features_.empty())
    throw std::invalid_argument("FeatureSchema: at least one feature required");
  std::unordered_set<std::string> seen;
  for (const auto& f : features_) {
    if (f.name.empty()) throw std::invalid_argument("FeatureSchema: empty feature name");
    if (!seen.insert(f.name).second)
      throw std::invalid_argument("FeatureSchema: duplicate feature name '" + f.name + "'");
  }
}

FeatureSchema FeatureSchema::canonical() {
  return FeatureSchema({{"ndvi", "index"},
                        {"evi", "index"},
                        {"vci", "index"},
                        {"lst", "kelvin"},
                        {"elevation", "m"},
                        {"slope", "degrees"},
                        {"aspect", "degrees"},
                        {"soil_moisture", "fraction"},
                        {"soc", "g_per_kg"},
                        {"tree_cover", "percent"},
                        {"pop_density", "persons_per_km2"}});
}

std::optional<std::size_t> FeatureSchema::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < features_.size(); ++i)
    if (features_[i].name == name) return i;
  return std::nullopt;
}

std::uint64_t FeatureSchema::fingerprint() const {
  // FNV-1a over "name\0unit\0" per feature.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](std::string_view s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
    h *= 0x100000001b3ULL;  // field separator
  };
  for (const auto& f : features_) {
    mix(f.name);
    mix(f.unit);
  }
  return h;
}

Stratum stratum_from_nlcd(int code) {
  switch (code) {
    case 41:
    case 42:
    case 43:
      return Stratum::Forest;
    case 71:
      return Stratum::Grassland;
    default:
      throw std::invalid_argument("stratum_from_nlcd: unsupported NLCD code " +
                                  std::to_string(code));
  }
}

Stratum stratum_from_token(std::string_view token) {
  if (token == "forest") return Stratum::Forest;
  if (token == "grassland") return Stratum::Grassland;
  throw std::invalid_argument("unknown stratum token '" + std::string(token) + "'");
}

std::string_view stratum_token(Stratum s) {
  return s == Stratum::Forest ? "forest" : "grassland";
}

Dataset::Dataset(FeatureSchema schema, std::vector<Sample> samples)
    : schema_(std::move(schema)), samples_(std::move(samples)) {
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    const Sample& s = samples_[i];
    if (s.values.size() != schema_.size())
      throw std::invalid_argument("Dataset: sample '" + s.id + "' has " +
                                  std::to_string(s.values.size()) + " values, schema has " +
                                  std::to_string(schema_.size()));
    for (double v : s.values)
      if (!std::isfinite(v))
        throw std::invalid_argument("Dataset: sample '" + s.id + "' has a non-finite value");
    if (s.label != 0 && s.label != 1)
      throw std::invalid_argument("Dataset: sample '" + s.id + "' label must be 0 or 1");
    if (s.year <= 0)
      throw std::invalid_argument("Dataset: sample '" + s.id + "' year must be positive");
  }
}

Dataset parse_samples_csv(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t pos = text.find('\n', start);
    if (pos == std::string_view::npos) pos = text.size();
    std::string_view line = text.substr(start, pos - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = pos + 1;
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty()) throw std::runtime_error("samples csv: empty input");

  const auto header = split_line(lines[0]);
  if (header.size() < kMetaCount + 1)
    throw std::runtime_error(
        "samples csv: header must list the metadata columns followed by at least one feature");
  for (std::size_t i = 0; i < kMetaCount; ++i)
    if (header[i] != kMetaColumns[i])
      throw std::runtime_error(std::string("samples csv: missing mandatory column '") +
                               kMetaColumns[i] + "' at position " + std::to_string(i + 1));

  const FeatureSchema canonical = FeatureSchema::canonical();
  std::vector<Feature> features;
  for (std::size_t i = kMetaCount; i < header.size(); ++i) {
    std::string unit;
    if (auto idx = canonical.index_of(header[i])) unit = canonical.at(*idx).unit;
    features.push_back({header[i], unit});
  }
  FeatureSchema schema(std::move(features));

  std::vector<Sample> samples;
  samples.reserve(lines.size() - 1);
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const std::size_t row = li + 1;  // 1-based, header is row 1
    if (lines[li].empty())
      throw std::runtime_error("samples csv: row " + std::to_string(row) + " is empty");
    const auto fields = split_line(lines[li]);
    if (fields.size() != header.size())
      throw std::runtime_error("samples csv: row " + std::to_string(row) + " has " +
                               std::to_string(fields.size()) + " fields, expected " +
                               std::to_string(header.size()));
    Sample s;
    s.id = fields[0];
    s.lon = parse_double(fields[1], "samples csv: " + row_col(row, "lon"));
    s.lat = parse_double(fields[2], "samples csv: " + row_col(row, "lat"));
    s.region_id = fields[3];
    s.district_id = fields[4];
    try {
      s.stratum = stratum_from_token(fields[5]);
    } catch (const std::invalid_argument& e) {
      throw std::runtime_error("samples csv: " + row_col(row, "stratum") + ": " + e.what());
    }
    s.year = static_cast<int>(parse_int(fields[6], row_col(row, "year")));
    if (s.year <= 0)
      throw std::runtime_error("samples csv: " + row_col(row, "year") + ": must be positive");
    const long long label = parse_int(fields[7], row_col(row, "label"));
    if (label != 0 && label != 1)
      throw std::runtime_error("samples csv: " + row_col(row, "label") + ": value '" +
                               fields[7] + "' is not 0 or 1");
    s.label = static_cast<int>(label);
    s.values.reserve(schema.size());
    for (std::size_t j = 0; j < schema.size(); ++j) {
      const std::string& col = schema.at(j).name;
      const double v =
          parse_double(fields[kMetaCount + j], "samples csv: " + row_col(row, col));
      if (!std::isfinite(v))
        throw std::runtime_error("samples csv: " + row_col(row, col) + ": non-finite value");
      s.values.push_back(v);
    }
    samples.push_back(std::move(s));
  }
  return Dataset(std::move(schema), std::move(samples));
}

std::string write_samples_csv(const Dataset& d) {
  std::string out;
  for (std::size_t i = 0; i < kMetaCount; ++i) {
    if (i) out += ',';
    out += kMetaColumns[i];
  }
  for (const auto& f : d.schema().features()) {
    out += ',';
    out += f.name;
  }
  out += '\n';
  for (const Sample& s : d.samples()) {
    out += s.id;
    out += ',';
    out += format_double(s.lon);
    out += ',';
    out += format_double(s.lat);
    out += ',';
    out += s.region_id;
    out += ',';
    out += s.district_id;
    out += ',';
    out += stratum_token(s.stratum);
    out += ',';
    out += std::to_string(s.year);
    out += ',';
    out += std::to_string(s.label);
    for (double v : s.values) {
      out += ',';
      out += format_double(v);
    }
    out += '\n';
  }
  return out;
}

double positive_rate(const Dataset& d) {
  if (d.empty()) throw std::invalid_argument("positive_rate: empty dataset");
  std::size_t positives = 0;
  for (const Sample& s : d.samples()) positives += static_cast<std::size_t>(s.label);
  return static_cast<double>(positives) / static_cast<double>(d.size());
}

Dataset stratify(const Dataset& d, Stratum s) {
  std::vector<Sample> kept;
  for (const Sample& sample : d.samples())
    if (sample.stratum == s) kept.push_back(sample);
  return Dataset(d.schema(), std::move(kept));
}

Dataset balanced_absence_sample(const Dataset& presence, const Dataset& candidates,
                                std::uint64_t seed) {
  if (!(presence.schema() == candidates.schema()))
    throw std::invalid_argument("balanced_absence_sample: schema mismatch");
  for (const Sample& s : presence.samples())
    if (s.label != 1)
      throw std::invalid_argument("balanced_absence_sample: presence set contains label-0 rows");
  for (const Sample& s : candidates.samples())
    if (s.label != 0)
      throw std::invalid_argument("balanced_absence_sample: candidate set contains label-1 rows");
  if (candidates.size() < presence.size())
    throw std::invalid_argument("balanced_absence_sample: insufficient candidates (" +
                                std::to_string(candidates.size()) + " < " +
                                std::to_string(presence.size()) + ")");

  Rng rng(derive_seed(seed, kStreamBalancedSample));
  auto chosen = rng.sample_without_replacement(candidates.size(), presence.size());
  std::sort(chosen.begin(), chosen.end());

  std::vector<Sample> out;
  out.reserve(2 * presence.size());
  for (const Sample& s : presence.samples()) out.push_back(s);
  for (std::size_t idx : chosen) out.push_back(candidates[idx]);
  return Dataset(presence.schema(), std::move(out));
}

}  // namespace firemap

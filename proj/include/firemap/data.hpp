#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace firemap {

struct Feature {
  std::string name;
  std::string unit;
  bool operator==(const Feature&) const = default;
};

// Ordered feature list. Names are unique and the order is fixed for the
// lifetime of any model trained against it.
class FeatureSchema {
 public:
  explicit FeatureSchema(std::vector<Feature> features);

  // The predictor set used throughout: vegetation indices, LST, terrain,
  // soil, tree cover and population density.
  static FeatureSchema canonical();

  std::size_t size() const { return features_.size(); }
  const Feature& at(std::size_t i) const { return features_.at(i); }
  const std::vector<Feature>& features() const { return features_; }
  std::optional<std::size_t> index_of(std::string_view name) const;
  std::uint64_t fingerprint() const;
  bool operator==(const FeatureSchema&) const = default;

 private:
  std::vector<Feature> features_;
};

enum class Stratum { Forest, Grassland };

// NLCD 41/42/43 -> Forest, 71 -> Grassland; every other code is rejected.
Stratum stratum_from_nlcd(int code);
Stratum stratum_from_token(std::string_view token);
std::string_view stratum_token(Stratum s);

struct Sample {
  std::string id;
  double lon = 0.0;
  double lat = 0.0;
  std::string region_id;
  std::string district_id;
  Stratum stratum = Stratum::Forest;
  int year = 0;
  int label = 0;  // 0 = absence, 1 = fire
  std::vector<double> values;  // aligned to the dataset schema
};

class Dataset {
 public:
  Dataset(FeatureSchema schema, std::vector<Sample> samples);

  const FeatureSchema& schema() const { return schema_; }
  const std::vector<Sample>& samples() const { return samples_; }
  std::size_t size() const { return samples_.size(); }
  bool empty() const { return samples_.empty(); }
  const Sample& operator[](std::size_t i) const { return samples_[i]; }

 private:
  FeatureSchema schema_;
  std::vector<Sample> samples_;
};

// Reads the delimited sample table. Header row: id, lon, lat, region_id,
// district_id, stratum, year, label, then one column per feature. Errors
// name the offending row and column.
Dataset parse_samples_csv(std::string_view text);
std::string write_samples_csv(const Dataset& d);

// Fraction of label-1 samples; rejects the empty dataset.
double positive_rate(const Dataset& d);

// Subset with the given stratum, order preserved.
Dataset stratify(const Dataset& d, Stratum s);

// Presence rows plus a uniform without-replacement draw of exactly
// |presence| candidates; the result has positive rate 0.5 exactly.
Dataset balanced_absence_sample(const Dataset& presence, const Dataset& candidates,
                                std::uint64_t seed);

// Shortest decimal encoding that parses back to the same double.
std::string format_double(double v);
double parse_double(std::string_view text, const std::string& context);

}  // namespace firemap

#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cchr {

enum class CovariateKind { continuous, discrete };

/// Column layout of the covariate block X. Discrete columns carry numeric
/// codes and are used for stratification in the kernel stage.
struct CovariateSchema {
  std::vector<std::string> names;
  std::vector<CovariateKind> kinds;

  std::size_t m() const { return names.size(); }
  std::size_t m_c() const;
  std::vector<std::size_t> continuous_indices() const;
  std::vector<std::size_t> discrete_indices() const;
  std::optional<std::size_t> index_of(std::string_view name) const;

  /// Throws std::invalid_argument on duplicate labels or size mismatch.
  void validate() const;

  /// Parses "age:continuous,ged:discrete". A bare name means continuous.
  static CovariateSchema parse(std::string_view declaration);
  std::string to_string() const;

  bool operator==(const CovariateSchema&) const = default;
};

struct Observation {
  double y = 0.0;
  int delta1 = 0;
  int delta2 = 0;
  int z = 0;
  int w = 0;
  std::vector<double> x;

  bool operator==(const Observation&) const = default;
};

/// Ingestion/validation failure. `row` is the 1-based data row (header is
/// row 0) or 0 when the problem is not tied to a row.
class DataError : public std::runtime_error {
 public:
  DataError(std::size_t row, const std::string& what);
  std::size_t row() const { return row_; }

 private:
  std::size_t row_;
};

/// Throws DataError(row, ...) when `o` violates an Observation invariant.
void validate_observation(const Observation& o, std::size_t width,
                          std::size_t row);

/// Immutable validated sample of n >= 1 observations.
class Dataset {
 public:
  Dataset(std::vector<Observation> observations, CovariateSchema schema);

  std::size_t n() const { return observations_.size(); }
  const CovariateSchema& schema() const { return schema_; }
  const std::vector<Observation>& observations() const { return observations_; }
  const Observation& operator[](std::size_t i) const { return observations_[i]; }

  /// Rows picked by index (with repetition allowed); used by the bootstrap.
  Dataset subset(const std::vector<std::size_t>& rows) const;

  bool operator==(const Dataset&) const = default;

 private:
  std::vector<Observation> observations_;
  CovariateSchema schema_;
};

/// Reads comma-separated text with a header row holding y, delta1, delta2,
/// z, w and one column per schema covariate. An optional column named `g`
/// (compliance group code) is skipped here; see load_group_labels.
Dataset load_dataset(std::istream& in, const CovariateSchema& schema);
Dataset load_dataset_file(const std::string& path, const CovariateSchema& schema);

/// Reads the optional `g` column (1 = complier, 0 = other). Empty if absent.
std::vector<int> load_group_labels(std::istream& in);

/// Writes the dataset with 17 significant digits so that load_dataset
/// reproduces it exactly. `groups`, when non-empty, is written as `g`.
void write_dataset(std::ostream& out, const Dataset& data,
                   const std::vector<int>& groups = {});

struct RankDiagnostic {
  bool full_rank = false;
  double smallest_singular_value = 0.0;
  double largest_singular_value = 0.0;
};

/// Numerical rank check of the sample covariance of (Z, X).
RankDiagnostic check_full_rank(const Dataset& data);

/// Returns a copy with `column` centred and scaled to unit sample SD.
Dataset standardize_column(const Dataset& data, std::string_view column);

}  // namespace cchr

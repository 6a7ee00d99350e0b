#pragma once

#include <Eigen/Dense>

#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace climcausal {

struct CodedName {
  std::string name;
  std::string code;
};

// Economy x indicator x year values as ingested from a WDI wide CSV.
// Storage is dense; `missing` marks cells that were empty (or "..") in the file.
class IndicatorPanel {
 public:
  IndicatorPanel() = default;
  IndicatorPanel(std::vector<CodedName> economies, std::vector<CodedName> indicators,
                 std::vector<int> years);

  const std::vector<CodedName>& economies() const { return economies_; }
  const std::vector<CodedName>& indicators() const { return indicators_; }
  const std::vector<int>& years() const { return years_; }

  double value(std::size_t economy, std::size_t indicator, std::size_t year) const {
    return values_[flat(economy, indicator, year)];
  }
  bool missing(std::size_t economy, std::size_t indicator, std::size_t year) const {
    return missing_[flat(economy, indicator, year)] != 0;
  }
  void set(std::size_t economy, std::size_t indicator, std::size_t year, double v);

  std::size_t missing_count() const;
  std::optional<std::size_t> economy_index(const std::string& code) const;
  std::optional<std::size_t> indicator_index(const std::string& code) const;
  std::optional<std::size_t> year_index(int year) const;

  // Throws Data error when dimensions, code uniqueness or finiteness are violated.
  void validate() const;

 private:
  std::size_t flat(std::size_t e, std::size_t i, std::size_t y) const {
    return (e * indicators_.size() + i) * years_.size() + y;
  }

  std::vector<CodedName> economies_;
  std::vector<CodedName> indicators_;
  std::vector<int> years_;
  std::vector<double> values_;
  std::vector<unsigned char> missing_;
};

// Per-capita emissions (t CO2e / person), economy x year.
class TargetSeries {
 public:
  TargetSeries() = default;
  TargetSeries(std::vector<std::string> economies, std::vector<int> years);

  const std::vector<std::string>& economies() const { return economies_; }
  const std::vector<int>& years() const { return years_; }

  double value(std::size_t economy, std::size_t year) const {
    return values_[economy * years_.size() + year];
  }
  bool missing(std::size_t economy, std::size_t year) const {
    return missing_[economy * years_.size() + year] != 0;
  }
  void set(std::size_t economy, std::size_t year, double v);

  std::size_t missing_count() const;
  std::optional<std::size_t> economy_index(const std::string& code) const;
  std::optional<std::size_t> year_index(int year) const;

 private:
  std::vector<std::string> economies_;
  std::vector<int> years_;
  std::vector<double> values_;
  std::vector<unsigned char> missing_;
};

struct RowKey {
  std::string economy;
  int year = 0;

  auto operator<=>(const RowKey&) const = default;
};

// Per-column affine map applied to the raw values. Empty vectors mean "raw".
struct Standardization {
  std::vector<double> mean;
  std::vector<double> stddev;

  bool raw() const { return mean.empty(); }
};

// Standardized n x d observation matrix. Every estimator consumes this.
struct SampleMatrix {
  Eigen::MatrixXd data;
  std::vector<std::string> labels;
  std::vector<RowKey> row_keys;
  Standardization standardization;

  std::size_t rows() const { return static_cast<std::size_t>(data.rows()); }
  std::size_t cols() const { return static_cast<std::size_t>(data.cols()); }

  std::optional<std::size_t> column(const std::string& label) const;
  SampleMatrix select_columns(const std::vector<std::size_t>& columns) const;
  SampleMatrix select_rows(const std::vector<std::size_t>& rows) const;
  // Undo the standardization (identity for raw matrices).
  Eigen::MatrixXd raw_data() const;

  void validate() const;
};

// Centre and scale every column to mean 0 / sample variance 1 (n - 1 denominator).
// Columns with zero spread raise a Data error naming the label.
SampleMatrix standardize(Eigen::MatrixXd raw, std::vector<std::string> labels,
                         std::vector<RowKey> row_keys);

IndicatorPanel load_wdi(const std::filesystem::path& path,
                        const std::optional<std::set<std::string>>& indicator_whitelist = {});

TargetSeries load_emissions(const std::filesystem::path& path);

enum class ImputeMode { Interpolate, Median, DropRows };

struct IngestConfig {
  int year_from = 2000;
  int year_to = 2020;
  double max_indicator_missing = 0.30;
  double max_row_missing = 0.50;
  ImputeMode impute = ImputeMode::Interpolate;
  bool standardize = true;
  std::string target_label = "CO2E.PC";
};

struct AssembleResult {
  SampleMatrix samples;
  std::vector<std::string> dropped_indicators;
  std::vector<std::string> warnings;
};

AssembleResult assemble_samples(const IndicatorPanel& panel, const TargetSeries& target,
                                const IngestConfig& cfg);

// CSV export: a "# rows:" comment line, a header of labels, then one row per
// sample written with 17 significant digits.
void write_samples_csv(const SampleMatrix& samples, const std::filesystem::path& path);
// Reads the export format back; the result is marked raw since the file does
// not carry the standardization parameters.
SampleMatrix read_samples_csv(const std::filesystem::path& path);

std::string to_string(ImputeMode mode);
ImputeMode parse_impute_mode(const std::string& text);

}  // namespace climcausal

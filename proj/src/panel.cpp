#include "climcausal/panel.hpp"

#include "climcausal/error.hpp"
#include "csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <unordered_set>

namespace climcausal {

namespace {

std::optional<int> parse_year(const std::string& header) {
  // Accepts "2000" and the databank form "2000 [YR2000]".
  const std::string h = csv::trim(header);
  if (h.size() < 4) return std::nullopt;
  int year = 0;
  const auto [ptr, ec] = std::from_chars(h.data(), h.data() + 4, year);
  if (ec != std::errc() || ptr != h.data() + 4) return std::nullopt;
  if (h.size() > 4 && h[4] != ' ') return std::nullopt;
  return year;
}

// Empty and ".." cells are missing; anything else must parse completely.
std::optional<double> parse_cell(const std::string& raw, std::size_t line_no, std::size_t column,
                                 const std::filesystem::path& path) {
  const std::string cell = csv::trim(raw);
  if (cell.empty() || cell == "..") return std::nullopt;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(v)) {
    fail(ErrorKind::Data, path.string() + ": cannot parse numeric cell '" + cell + "' at row " +
                              std::to_string(line_no) + ", column " + std::to_string(column + 1));
  }
  return v;
}

std::ifstream open_or_fail(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Data, "cannot open " + path.string());
  return in;
}

double median_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double hi = v[mid];
  if (v.size() % 2 == 1) return hi;
  const double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lo + hi);
}

}  // namespace

// ---------------------------------------------------------------------------
// IndicatorPanel / TargetSeries

IndicatorPanel::IndicatorPanel(std::vector<CodedName> economies, std::vector<CodedName> indicators,
                               std::vector<int> years)
    : economies_(std::move(economies)), indicators_(std::move(indicators)), years_(std::move(years)) {
  const std::size_t total = economies_.size() * indicators_.size() * years_.size();
  values_.assign(total, 0.0);
  missing_.assign(total, 1);
}

void IndicatorPanel::set(std::size_t economy, std::size_t indicator, std::size_t year, double v) {
  const std::size_t k = flat(economy, indicator, year);
  values_[k] = v;
  missing_[k] = 0;
}

std::size_t IndicatorPanel::missing_count() const {
  return static_cast<std::size_t>(std::count(missing_.begin(), missing_.end(), 1));
}

std::optional<std::size_t> IndicatorPanel::economy_index(const std::string& code) const {
  for (std::size_t i = 0; i < economies_.size(); ++i)
    if (economies_[i].code == code) return i;
  return std::nullopt;
}

std::optional<std::size_t> IndicatorPanel::indicator_index(const std::string& code) const {
  for (std::size_t i = 0; i < indicators_.size(); ++i)
    if (indicators_[i].code == code) return i;
  return std::nullopt;
}

std::optional<std::size_t> IndicatorPanel::year_index(int year) const {
  const auto it = std::find(years_.begin(), years_.end(), year);
  if (it == years_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - years_.begin());
}

void IndicatorPanel::validate() const {
  if (values_.size() != economies_.size() * indicators_.size() * years_.size() ||
      missing_.size() != values_.size())
    fail(ErrorKind::Data, "indicator panel: array dimensions do not match axes");
  std::unordered_set<std::string> seen;
  for (const auto& e : economies_)
    if (!seen.insert(e.code).second) fail(ErrorKind::Data, "duplicate economy code " + e.code);
  seen.clear();
  for (const auto& i : indicators_)
    if (!seen.insert(i.code).second) fail(ErrorKind::Data, "duplicate indicator code " + i.code);
  for (std::size_t k = 0; k < values_.size(); ++k)
    if (!missing_[k] && !std::isfinite(values_[k]))
      fail(ErrorKind::Data, "indicator panel holds a non-finite value");
}

TargetSeries::TargetSeries(std::vector<std::string> economies, std::vector<int> years)
    : economies_(std::move(economies)), years_(std::move(years)) {
  values_.assign(economies_.size() * years_.size(), 0.0);
  missing_.assign(values_.size(), 1);
}

void TargetSeries::set(std::size_t economy, std::size_t year, double v) {
  if (!std::isfinite(v) || v < 0.0)
    fail(ErrorKind::Data, "emission value must be finite and non-negative, got " + std::to_string(v) +
                              " for " + economies_[economy] + "/" + std::to_string(years_[year]));
  values_[economy * years_.size() + year] = v;
  missing_[economy * years_.size() + year] = 0;
}

std::size_t TargetSeries::missing_count() const {
  return static_cast<std::size_t>(std::count(missing_.begin(), missing_.end(), 1));
}

std::optional<std::size_t> TargetSeries::economy_index(const std::string& code) const {
  const auto it = std::find(economies_.begin(), economies_.end(), code);
  if (it == economies_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - economies_.begin());
}

std::optional<std::size_t> TargetSeries::year_index(int year) const {
  const auto it = std::find(years_.begin(), years_.end(), year);
  if (it == years_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - years_.begin());
}

// ---------------------------------------------------------------------------
// SampleMatrix

std::optional<std::size_t> SampleMatrix::column(const std::string& label) const {
  const auto it = std::find(labels.begin(), labels.end(), label);
  if (it == labels.end()) return std::nullopt;
  return static_cast<std::size_t>(it - labels.begin());
}

SampleMatrix SampleMatrix::select_columns(const std::vector<std::size_t>& columns) const {
  SampleMatrix out;
  out.data.resize(data.rows(), static_cast<Eigen::Index>(columns.size()));
  out.row_keys = row_keys;
  for (std::size_t k = 0; k < columns.size(); ++k) {
    const auto c = static_cast<Eigen::Index>(columns[k]);
    out.data.col(static_cast<Eigen::Index>(k)) = data.col(c);
    out.labels.push_back(labels[columns[k]]);
    if (!standardization.raw()) {
      out.standardization.mean.push_back(standardization.mean[columns[k]]);
      out.standardization.stddev.push_back(standardization.stddev[columns[k]]);
    }
  }
  return out;
}

SampleMatrix SampleMatrix::select_rows(const std::vector<std::size_t>& rows) const {
  SampleMatrix out;
  out.labels = labels;
  out.standardization = standardization;
  out.data.resize(static_cast<Eigen::Index>(rows.size()), data.cols());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    out.data.row(static_cast<Eigen::Index>(k)) = data.row(static_cast<Eigen::Index>(rows[k]));
    if (!row_keys.empty()) out.row_keys.push_back(row_keys[rows[k]]);
  }
  return out;
}

Eigen::MatrixXd SampleMatrix::raw_data() const {
  if (standardization.raw()) return data;
  Eigen::MatrixXd raw = data;
  for (Eigen::Index c = 0; c < raw.cols(); ++c) {
    const auto k = static_cast<std::size_t>(c);
    raw.col(c) = (raw.col(c).array() * standardization.stddev[k] + standardization.mean[k]).matrix();
  }
  return raw;
}

void SampleMatrix::validate() const {
  if (data.rows() < 2) fail(ErrorKind::Data, "sample matrix needs at least 2 rows");
  if (data.cols() < 1) fail(ErrorKind::Data, "sample matrix needs at least 1 column");
  if (labels.size() != cols()) fail(ErrorKind::Data, "sample matrix: label count does not match columns");
  if (!row_keys.empty() && row_keys.size() != rows())
    fail(ErrorKind::Data, "sample matrix: row key count does not match rows");
  if (!data.allFinite()) fail(ErrorKind::Data, "sample matrix holds non-finite values");
  std::unordered_set<std::string> seen;
  for (const auto& l : labels)
    if (!seen.insert(l).second) fail(ErrorKind::Data, "duplicate sample label " + l);
  if (!standardization.raw()) {
    const double n = static_cast<double>(data.rows());
    for (Eigen::Index c = 0; c < data.cols(); ++c) {
      const double mean = data.col(c).mean();
      const double var = (data.col(c).array() - mean).square().sum() / (n - 1.0);
      if (std::abs(mean) > 1e-9 || std::abs(var - 1.0) > 1e-6)
        fail(ErrorKind::Data, "column " + labels[static_cast<std::size_t>(c)] + " is not standardized");
    }
  }
}

SampleMatrix standardize(Eigen::MatrixXd raw, std::vector<std::string> labels, std::vector<RowKey> row_keys) {
  if (raw.rows() < 2) fail(ErrorKind::Data, "cannot standardize fewer than 2 rows");
  SampleMatrix out;
  const double n = static_cast<double>(raw.rows());
  for (Eigen::Index c = 0; c < raw.cols(); ++c) {
    const double mean = raw.col(c).mean();
    raw.col(c).array() -= mean;
    const double sd = std::sqrt(raw.col(c).squaredNorm() / (n - 1.0));
    if (!(sd > 0.0) || !std::isfinite(sd))
      fail(ErrorKind::Data, "column " + labels[static_cast<std::size_t>(c)] + " has zero variance");
    raw.col(c) /= sd;
    // One correction pass pulls the residual mean from ~1e-16*|mean| down to rounding level.
    raw.col(c).array() -= raw.col(c).mean();
    out.standardization.mean.push_back(mean);
    out.standardization.stddev.push_back(sd);
  }
  out.data = std::move(raw);
  out.labels = std::move(labels);
  out.row_keys = std::move(row_keys);
  return out;
}

// ---------------------------------------------------------------------------
// Loaders

IndicatorPanel load_wdi(const std::filesystem::path& path,
                        const std::optional<std::set<std::string>>& indicator_whitelist) {
  auto in = open_or_fail(path);
  std::string line;
  bool first = true;
  std::size_t line_no = 0;

  // Bulk downloads carry a short preamble ("Data Source", "Last Updated Date")
  // before the header row.
  std::vector<std::string> header;
  for (int attempt = 0; attempt < 5; ++attempt) {
    if (!csv::next_line(in, line, first)) break;
    ++line_no;
    header = csv::split_record(line);
    if (std::any_of(header.begin(), header.end(), [](const std::string& h) { return csv::trim(h) == "Country Code"; }))
      break;
    if (attempt == 0 && csv::trim(header.front()) != "Data Source" && csv::trim(header.front()) != "Last Updated Date")
      break;
  }
  if (header.empty()) fail(ErrorKind::Data, path.string() + ": empty WDI file");

  const char* required[] = {"Country Name", "Country Code", "Indicator Name", "Indicator Code"};
  std::size_t required_pos[4];
  for (int r = 0; r < 4; ++r) {
    const auto it = std::find_if(header.begin(), header.end(),
                                 [&](const std::string& h) { return csv::trim(h) == required[r]; });
    if (it == header.end())
      fail(ErrorKind::Data, path.string() + ": WDI header is missing column '" + required[r] + "'");
    required_pos[r] = static_cast<std::size_t>(it - header.begin());
  }
  std::vector<int> years;
  std::vector<std::size_t> year_cols;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (const auto y = parse_year(header[c])) {
      years.push_back(*y);
      year_cols.push_back(c);
    }
  }
  if (years.empty()) fail(ErrorKind::Data, path.string() + ": WDI header has no year columns");

  struct Row {
    std::size_t economy, indicator;
    std::vector<std::optional<double>> values;
  };
  std::vector<CodedName> economies, indicators;
  std::map<std::string, std::size_t> economy_pos, indicator_pos;
  std::vector<Row> rows;
  std::set<std::pair<std::size_t, std::size_t>> seen;

  while (csv::next_line(in, line, first)) {
    ++line_no;
    const auto fields = csv::split_record(line);
    if (fields.size() <= required_pos[3]) {
      fail(ErrorKind::Data, path.string() + ": row " + std::to_string(line_no) + " is truncated");
    }
    const std::string indicator_code = csv::trim(fields[required_pos[3]]);
    if (indicator_whitelist && !indicator_whitelist->contains(indicator_code)) continue;
    const std::string economy_code = csv::trim(fields[required_pos[1]]);

    auto [eit, e_new] = economy_pos.try_emplace(economy_code, economies.size());
    if (e_new) economies.push_back({csv::trim(fields[required_pos[0]]), economy_code});
    auto [iit, i_new] = indicator_pos.try_emplace(indicator_code, indicators.size());
    if (i_new) indicators.push_back({csv::trim(fields[required_pos[2]]), indicator_code});
    if (!seen.emplace(eit->second, iit->second).second)
      fail(ErrorKind::Data, path.string() + ": duplicate row for " + economy_code + "/" + indicator_code);

    Row row{eit->second, iit->second, {}};
    row.values.reserve(year_cols.size());
    for (std::size_t c : year_cols)
      row.values.push_back(c < fields.size() ? parse_cell(fields[c], line_no, c, path) : std::nullopt);
    rows.push_back(std::move(row));
  }

  IndicatorPanel panel(std::move(economies), std::move(indicators), years);
  for (const auto& row : rows)
    for (std::size_t y = 0; y < row.values.size(); ++y)
      if (row.values[y]) panel.set(row.economy, row.indicator, y, *row.values[y]);
  panel.validate();
  return panel;
}

TargetSeries load_emissions(const std::filesystem::path& path) {
  auto in = open_or_fail(path);
  std::string line;
  bool first = true;
  std::size_t line_no = 1;
  if (!csv::next_line(in, line, first)) fail(ErrorKind::Data, path.string() + ": empty emissions file");
  const auto header = csv::split_record(line);
  std::vector<std::string> lowered;
  for (const auto& h : header) lowered.push_back(csv::lower(csv::trim(h)));

  auto find_col = [&](std::initializer_list<const char*> names) -> std::optional<std::size_t> {
    for (const char* n : names) {
      const auto it = std::find(lowered.begin(), lowered.end(), n);
      if (it != lowered.end()) return static_cast<std::size_t>(it - lowered.begin());
    }
    return std::nullopt;
  };
  const auto code_col = find_col({"code", "iso", "iso_code", "iso3", "country code", "country"});
  if (!code_col) fail(ErrorKind::Data, path.string() + ": emissions header has no economy code column");

  // (economy, year) -> value, with insertion order of economies preserved.
  std::vector<std::string> economies;
  std::map<std::string, std::size_t> economy_pos;
  std::map<std::pair<std::size_t, int>, std::optional<double>> cells;
  std::set<int> year_set;

  auto record = [&](const std::string& code, int year, std::optional<double> v) {
    auto [it, added] = economy_pos.try_emplace(code, economies.size());
    if (added) economies.push_back(code);
    if (v && *v < 0.0)
      fail(ErrorKind::Data, path.string() + ": negative emission value " + std::to_string(*v) + " for " + code +
                                "/" + std::to_string(year));
    if (!cells.emplace(std::make_pair(it->second, year), v).second)
      fail(ErrorKind::Data, path.string() + ": duplicate key " + code + "/" + std::to_string(year));
    year_set.insert(year);
  };

  const auto year_col = find_col({"year"});
  if (year_col) {
    const auto value_col = find_col({"value", "emissions", "co2e_per_capita", "value_per_capita"});
    if (!value_col) fail(ErrorKind::Data, path.string() + ": long-format emissions header has no value column");
    while (csv::next_line(in, line, first)) {
      ++line_no;
      const auto f = csv::split_record(line);
      if (f.size() <= std::max({*code_col, *year_col, *value_col}))
        fail(ErrorKind::Data, path.string() + ": row " + std::to_string(line_no) + " is truncated");
      const auto year = parse_year(f[*year_col]);
      if (!year) fail(ErrorKind::Data, path.string() + ": bad year at row " + std::to_string(line_no));
      record(csv::trim(f[*code_col]), *year, parse_cell(f[*value_col], line_no, *value_col, path));
    }
  } else {
    std::vector<std::pair<std::size_t, int>> year_cols;
    for (std::size_t c = 0; c < header.size(); ++c)
      if (const auto y = parse_year(header[c])) year_cols.emplace_back(c, *y);
    if (year_cols.empty()) fail(ErrorKind::Data, path.string() + ": emissions header has neither 'year' nor year columns");
    while (csv::next_line(in, line, first)) {
      ++line_no;
      const auto f = csv::split_record(line);
      if (f.size() <= *code_col) fail(ErrorKind::Data, path.string() + ": row " + std::to_string(line_no) + " is truncated");
      for (const auto& [c, y] : year_cols)
        record(csv::trim(f[*code_col]), y, c < f.size() ? parse_cell(f[c], line_no, c, path) : std::nullopt);
    }
  }

  std::vector<int> years(year_set.begin(), year_set.end());
  TargetSeries series(economies, years);
  for (const auto& [key, v] : cells)
    if (v) series.set(key.first, *series.year_index(key.second), *v);
  return series;
}

// ---------------------------------------------------------------------------
// Assembly

AssembleResult assemble_samples(const IndicatorPanel& panel, const TargetSeries& target, const IngestConfig& cfg) {
  if (cfg.year_from > cfg.year_to) fail(ErrorKind::Config, "year window is empty");
  if (cfg.max_indicator_missing < 0.0 || cfg.max_indicator_missing > 1.0 || cfg.max_row_missing < 0.0 ||
      cfg.max_row_missing > 1.0)
    fail(ErrorKind::Config, "missingness caps must lie in [0, 1]");

  AssembleResult result;

  // Candidate rows: economies in both sources, years in the window, target observed.
  struct Candidate {
    std::size_t economy;  // panel index
    std::size_t target_economy;
    int year;
    std::optional<std::size_t> panel_year;
    double target;
  };
  std::vector<Candidate> candidates;
  for (std::size_t e = 0; e < panel.economies().size(); ++e) {
    const auto te = target.economy_index(panel.economies()[e].code);
    if (!te) continue;
    for (int year = cfg.year_from; year <= cfg.year_to; ++year) {
      const auto ty = target.year_index(year);
      if (!ty || target.missing(*te, *ty)) continue;
      candidates.push_back({e, *te, year, panel.year_index(year), target.value(*te, *ty)});
    }
  }
  std::sort(candidates.begin(), candidates.end(), [&](const Candidate& a, const Candidate& b) {
    const auto& ca = panel.economies()[a.economy].code;
    const auto& cb = panel.economies()[b.economy].code;
    return ca != cb ? ca < cb : a.year < b.year;
  });
  if (candidates.empty()) fail(ErrorKind::Data, "no (economy, year) rows are shared by indicators and target");

  auto is_missing = [&](const Candidate& c, std::size_t ind) {
    return !c.panel_year || panel.missing(c.economy, ind, *c.panel_year);
  };

  // Indicator missingness cap.
  std::vector<std::size_t> kept_indicators;
  for (std::size_t i = 0; i < panel.indicators().size(); ++i) {
    std::size_t miss = 0;
    for (const auto& c : candidates) miss += is_missing(c, i) ? 1 : 0;
    const double frac = static_cast<double>(miss) / static_cast<double>(candidates.size());
    if (frac > cfg.max_indicator_missing) {
      result.dropped_indicators.push_back(panel.indicators()[i].code);
      char buf[160];
      std::snprintf(buf, sizeof buf, "dropped indicator %s: %.1f%% missing in window",
                    panel.indicators()[i].code.c_str(), 100.0 * frac);
      result.warnings.emplace_back(buf);
    } else {
      kept_indicators.push_back(i);
    }
  }

  // Row missingness cap.
  std::vector<Candidate> rows;
  for (const auto& c : candidates) {
    std::size_t miss = 0;
    for (std::size_t i : kept_indicators) miss += is_missing(c, i) ? 1 : 0;
    const double frac = kept_indicators.empty() ? 0.0 : static_cast<double>(miss) / static_cast<double>(kept_indicators.size());
    if (frac <= cfg.max_row_missing) rows.push_back(c);
  }
  if (rows.size() < candidates.size())
    result.warnings.push_back("dropped " + std::to_string(candidates.size() - rows.size()) +
                              " rows over the row missingness cap");

  // Imputation.
  const auto n_ind = kept_indicators.size();
  Eigen::MatrixXd values(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(n_ind + 1));
  std::vector<std::vector<bool>> gap(rows.size(), std::vector<bool>(n_ind, false));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t k = 0; k < n_ind; ++k) {
      const std::size_t i = kept_indicators[k];
      if (is_missing(rows[r], i)) {
        gap[r][k] = true;
        values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k)) = 0.0;
      } else {
        values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k)) =
            panel.value(rows[r].economy, i, *rows[r].panel_year);
      }
    }
    values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(n_ind)) = rows[r].target;
  }

  std::vector<bool> keep_row(rows.size(), true);
  if (cfg.impute == ImputeMode::DropRows) {
    for (std::size_t r = 0; r < rows.size(); ++r)
      keep_row[r] = std::none_of(gap[r].begin(), gap[r].end(), [](bool g) { return g; });
  } else {
    for (std::size_t k = 0; k < n_ind; ++k) {
      std::vector<double> observed;
      for (std::size_t r = 0; r < rows.size(); ++r)
        if (!gap[r][k]) observed.push_back(values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k)));
      const double median = median_of(observed);
      const std::size_t ind = kept_indicators[k];
      for (std::size_t r = 0; r < rows.size(); ++r) {
        if (!gap[r][k]) continue;
        double fill = median;
        if (cfg.impute == ImputeMode::Interpolate) {
          // Nearest observed years of the same economy inside the window.
          std::optional<std::pair<int, double>> before, after;
          for (const int y : panel.years()) {
            if (y < cfg.year_from || y > cfg.year_to) continue;
            const auto py = panel.year_index(y);
            if (panel.missing(rows[r].economy, ind, *py)) continue;
            const double v = panel.value(rows[r].economy, ind, *py);
            if (y < rows[r].year && (!before || y > before->first)) before = std::make_pair(y, v);
            if (y > rows[r].year && (!after || y < after->first)) after = std::make_pair(y, v);
          }
          if (before && after) {
            const double t = static_cast<double>(rows[r].year - before->first) /
                             static_cast<double>(after->first - before->first);
            fill = before->second + t * (after->second - before->second);
          }
        }
        values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k)) = fill;
      }
    }
  }

  std::vector<std::size_t> row_index;
  for (std::size_t r = 0; r < rows.size(); ++r)
    if (keep_row[r]) row_index.push_back(r);
  if (row_index.size() < 2) fail(ErrorKind::Data, "assembly left fewer than 2 rows");

  // Drop constant indicator columns; a constant target is fatal.
  std::vector<Eigen::Index> columns;
  std::vector<std::string> labels;
  for (std::size_t k = 0; k <= n_ind; ++k) {
    const auto c = static_cast<Eigen::Index>(k);
    const double v0 = values(static_cast<Eigen::Index>(row_index[0]), c);
    const bool constant = std::all_of(row_index.begin(), row_index.end(), [&](std::size_t r) {
      return values(static_cast<Eigen::Index>(r), c) == v0;
    });
    if (k == n_ind) {
      if (constant) fail(ErrorKind::Data, "target column is constant after assembly");
      columns.push_back(c);
      labels.push_back(cfg.target_label);
    } else if (constant) {
      const auto& code = panel.indicators()[kept_indicators[k]].code;
      result.dropped_indicators.push_back(code);
      result.warnings.push_back("dropped indicator " + code + ": constant after assembly");
    } else {
      columns.push_back(c);
      labels.push_back(panel.indicators()[kept_indicators[k]].code);
    }
  }
  if (std::find(labels.begin(), labels.end() - 1, cfg.target_label) != labels.end() - 1)
    fail(ErrorKind::Config, "target label " + cfg.target_label + " collides with an indicator code");

  Eigen::MatrixXd raw(static_cast<Eigen::Index>(row_index.size()), static_cast<Eigen::Index>(columns.size()));
  std::vector<RowKey> keys;
  for (std::size_t r = 0; r < row_index.size(); ++r) {
    for (std::size_t c = 0; c < columns.size(); ++c)
      raw(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          values(static_cast<Eigen::Index>(row_index[r]), columns[c]);
    keys.push_back({panel.economies()[rows[row_index[r]].economy].code, rows[row_index[r]].year});
  }

  if (cfg.standardize) {
    result.samples = standardize(std::move(raw), std::move(labels), std::move(keys));
  } else {
    result.samples.data = std::move(raw);
    result.samples.labels = std::move(labels);
    result.samples.row_keys = std::move(keys);
  }
  result.samples.validate();
  return result;
}

// ---------------------------------------------------------------------------
// CSV round trip

void write_samples_csv(const SampleMatrix& samples, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::Data, "cannot write " + path.string());
  if (!samples.row_keys.empty()) {
    out << "# rows:";
    for (const auto& k : samples.row_keys) out << ' ' << k.economy << ':' << k.year;
    out << '\n';
  }
  for (std::size_t c = 0; c < samples.labels.size(); ++c) out << (c ? "," : "") << csv::quote(samples.labels[c]);
  out << '\n';
  char buf[40];
  for (Eigen::Index r = 0; r < samples.data.rows(); ++r) {
    for (Eigen::Index c = 0; c < samples.data.cols(); ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", samples.data(r, c));
      out << (c ? "," : "") << buf;
    }
    out << '\n';
  }
  if (!out) fail(ErrorKind::Data, "write failed for " + path.string());
}

SampleMatrix read_samples_csv(const std::filesystem::path& path) {
  auto in = open_or_fail(path);
  std::string line;
  bool first = true;
  SampleMatrix out;
  std::size_t line_no = 0;
  if (!csv::next_line(in, line, first)) fail(ErrorKind::Data, path.string() + ": empty sample file");
  ++line_no;
  if (line.rfind("# rows:", 0) == 0) {
    std::istringstream keys(line.substr(7));
    std::string token;
    while (keys >> token) {
      const auto colon = token.rfind(':');
      if (colon == std::string::npos) fail(ErrorKind::Data, path.string() + ": bad row key '" + token + "'");
      out.row_keys.push_back({token.substr(0, colon), std::stoi(token.substr(colon + 1))});
    }
    if (!csv::next_line(in, line, first)) fail(ErrorKind::Data, path.string() + ": missing header");
    ++line_no;
  }
  for (const auto& f : csv::split_record(line)) out.labels.push_back(csv::trim(f));

  std::vector<double> flat;
  std::size_t n = 0;
  while (csv::next_line(in, line, first)) {
    ++line_no;
    const auto fields = csv::split_record(line);
    if (fields.size() != out.labels.size())
      fail(ErrorKind::Data, path.string() + ": row " + std::to_string(line_no) + " has " +
                                std::to_string(fields.size()) + " fields, expected " + std::to_string(out.labels.size()));
    for (std::size_t c = 0; c < fields.size(); ++c) {
      const auto v = parse_cell(fields[c], line_no, c, path);
      if (!v) fail(ErrorKind::Data, path.string() + ": empty cell at row " + std::to_string(line_no));
      flat.push_back(*v);
    }
    ++n;
  }
  out.data.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(out.labels.size()));
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < out.labels.size(); ++c)
      out.data(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = flat[r * out.labels.size() + c];
  out.validate();
  return out;
}

std::string to_string(ImputeMode mode) {
  switch (mode) {
    case ImputeMode::Interpolate: return "interpolate";
    case ImputeMode::Median: return "median";
    case ImputeMode::DropRows: return "drop-rows";
  }
  return "?";
}

ImputeMode parse_impute_mode(const std::string& text) {
  if (text == "interpolate") return ImputeMode::Interpolate;
  if (text == "median") return ImputeMode::Median;
  if (text == "drop-rows") return ImputeMode::DropRows;
  fail(ErrorKind::Config, "unknown imputation mode '" + text + "'");
}

}  // namespace climcausal

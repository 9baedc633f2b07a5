#include "cchr/data_model.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>

namespace cchr {

namespace {

constexpr std::string_view kRequired[] = {"y", "delta1", "delta2", "z", "w"};

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    auto first = cell.find_first_not_of(" \t\r");
    auto last = cell.find_last_not_of(" \t\r");
    cells.push_back(first == std::string::npos
                        ? std::string{}
                        : cell.substr(first, last - first + 1));
  }
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double parse_number(const std::string& cell, std::size_t row,
                    std::string_view column) {
  double value = 0.0;
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  if (!cell.empty() && *begin == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (cell.empty() || ec != std::errc{} || ptr != end || !std::isfinite(value)) {
    throw DataError(row, "non-numeric cell '" + cell + "' in column '" +
                             std::string(column) + "'");
  }
  return value;
}

int parse_indicator(const std::string& cell, std::size_t row,
                    std::string_view column) {
  double v = parse_number(cell, row, column);
  if (v != 0.0 && v != 1.0) {
    throw DataError(row, "indicator '" + std::string(column) +
                             "' outside {0,1}: " + cell);
  }
  return static_cast<int>(v);
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v,
                           std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

struct Header {
  std::vector<std::size_t> required;  // positions of y, delta1, delta2, z, w
  std::vector<std::size_t> covariates;
  std::optional<std::size_t> group;
  std::size_t width = 0;
};

Header parse_header(const std::string& line, const CovariateSchema& schema) {
  auto cols = split_line(line);
  Header h;
  h.width = cols.size();
  auto find = [&](std::string_view name) -> std::optional<std::size_t> {
    auto it = std::find(cols.begin(), cols.end(), name);
    if (it == cols.end()) return std::nullopt;
    return static_cast<std::size_t>(it - cols.begin());
  };
  for (auto name : kRequired) {
    auto pos = find(name);
    if (!pos) throw DataError(0, "missing column '" + std::string(name) + "'");
    h.required.push_back(*pos);
  }
  for (const auto& name : schema.names) {
    auto pos = find(name);
    if (!pos) throw DataError(0, "missing covariate column '" + name + "'");
    h.covariates.push_back(*pos);
  }
  h.group = find("g");
  std::set<std::string> known(std::begin(kRequired), std::end(kRequired));
  known.insert(schema.names.begin(), schema.names.end());
  known.insert("g");
  for (const auto& c : cols) {
    if (!known.count(c)) throw DataError(0, "unexpected column '" + c + "'");
  }
  return h;
}

}  // namespace

DataError::DataError(std::size_t row, const std::string& what)
    : std::runtime_error(row == 0 ? what
                                  : "row " + std::to_string(row) + ": " + what),
      row_(row) {}

std::size_t CovariateSchema::m_c() const {
  return static_cast<std::size_t>(
      std::count(kinds.begin(), kinds.end(), CovariateKind::continuous));
}

std::vector<std::size_t> CovariateSchema::continuous_indices() const {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < kinds.size(); ++j)
    if (kinds[j] == CovariateKind::continuous) out.push_back(j);
  return out;
}

std::vector<std::size_t> CovariateSchema::discrete_indices() const {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < kinds.size(); ++j)
    if (kinds[j] == CovariateKind::discrete) out.push_back(j);
  return out;
}

std::optional<std::size_t> CovariateSchema::index_of(std::string_view name) const {
  for (std::size_t j = 0; j < names.size(); ++j)
    if (names[j] == name) return j;
  return std::nullopt;
}

void CovariateSchema::validate() const {
  if (names.size() != kinds.size())
    throw std::invalid_argument("schema: names and kinds differ in length");
  std::set<std::string> seen;
  for (const auto& n : names) {
    if (n.empty()) throw std::invalid_argument("schema: empty covariate label");
    if (!seen.insert(n).second)
      throw std::invalid_argument("schema: duplicate covariate label '" + n + "'");
    for (auto r : kRequired)
      if (n == r || n == "g")
        throw std::invalid_argument("schema: reserved label '" + n + "'");
  }
}

CovariateSchema CovariateSchema::parse(std::string_view declaration) {
  CovariateSchema s;
  std::string decl(declaration);
  if (decl.find_first_not_of(" \t") == std::string::npos) return s;
  for (const auto& item : split_line(decl)) {
    auto colon = item.find(':');
    std::string name = item.substr(0, colon);
    std::string kind = colon == std::string::npos ? "continuous" : item.substr(colon + 1);
    s.names.push_back(name);
    if (kind == "continuous" || kind == "c") {
      s.kinds.push_back(CovariateKind::continuous);
    } else if (kind == "discrete" || kind == "d") {
      s.kinds.push_back(CovariateKind::discrete);
    } else {
      throw std::invalid_argument("schema: unknown covariate kind '" + kind + "'");
    }
  }
  s.validate();
  return s;
}

std::string CovariateSchema::to_string() const {
  std::string out;
  for (std::size_t j = 0; j < names.size(); ++j) {
    if (j) out += ',';
    out += names[j];
    out += kinds[j] == CovariateKind::discrete ? ":discrete" : ":continuous";
  }
  return out;
}

void validate_observation(const Observation& o, std::size_t width,
                          std::size_t row) {
  if (!std::isfinite(o.y) || o.y <= 0.0)
    throw DataError(row, "nonpositive follow-up time");
  auto binary = [](int v) { return v == 0 || v == 1; };
  if (!binary(o.delta1) || !binary(o.delta2) || !binary(o.z) || !binary(o.w))
    throw DataError(row, "indicator outside {0,1}");
  if (o.delta1 + o.delta2 > 1)
    throw DataError(row, "delta1 and delta2 both equal 1");
  if (o.x.size() != width)
    throw DataError(row, "covariate count does not match schema");
  for (double v : o.x)
    if (!std::isfinite(v)) throw DataError(row, "non-finite covariate");
}

Dataset::Dataset(std::vector<Observation> observations, CovariateSchema schema)
    : observations_(std::move(observations)), schema_(std::move(schema)) {
  schema_.validate();
  if (observations_.empty()) throw DataError(0, "dataset has no observations");
  for (std::size_t i = 0; i < observations_.size(); ++i)
    validate_observation(observations_[i], schema_.m(), i + 1);
}

Dataset Dataset::subset(const std::vector<std::size_t>& rows) const {
  std::vector<Observation> obs;
  obs.reserve(rows.size());
  for (auto r : rows) obs.push_back(observations_.at(r));
  return Dataset(std::move(obs), schema_);
}

Dataset load_dataset(std::istream& in, const CovariateSchema& schema) {
  schema.validate();
  std::string line;
  if (!std::getline(in, line)) throw DataError(0, "empty input: missing header row");
  Header h = parse_header(line, schema);

  std::vector<Observation> obs;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    ++row;
    auto cells = split_line(line);
    if (cells.size() != h.width)
      throw DataError(row, "expected " + std::to_string(h.width) + " cells, got " +
                               std::to_string(cells.size()));
    Observation o;
    o.y = parse_number(cells[h.required[0]], row, "y");
    o.delta1 = parse_indicator(cells[h.required[1]], row, "delta1");
    o.delta2 = parse_indicator(cells[h.required[2]], row, "delta2");
    o.z = parse_indicator(cells[h.required[3]], row, "z");
    o.w = parse_indicator(cells[h.required[4]], row, "w");
    o.x.reserve(schema.m());
    for (std::size_t j = 0; j < schema.m(); ++j)
      o.x.push_back(parse_number(cells[h.covariates[j]], row, schema.names[j]));
    validate_observation(o, schema.m(), row);
    obs.push_back(std::move(o));
  }
  return Dataset(std::move(obs), schema);
}

Dataset load_dataset_file(const std::string& path, const CovariateSchema& schema) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return load_dataset(in, schema);
}

std::vector<int> load_group_labels(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) return {};
  auto cols = split_line(line);
  auto it = std::find(cols.begin(), cols.end(), "g");
  if (it == cols.end()) return {};
  auto pos = static_cast<std::size_t>(it - cols.begin());
  std::vector<int> out;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    ++row;
    auto cells = split_line(line);
    if (pos >= cells.size()) throw DataError(row, "missing group cell");
    out.push_back(parse_indicator(cells[pos], row, "g"));
  }
  return out;
}

void write_dataset(std::ostream& out, const Dataset& data,
                   const std::vector<int>& groups) {
  if (!groups.empty() && groups.size() != data.n())
    throw std::invalid_argument("write_dataset: group labels misaligned");
  out << "y,delta1,delta2,z,w";
  for (const auto& name : data.schema().names) out << ',' << name;
  if (!groups.empty()) out << ",g";
  out << '\n';
  for (std::size_t i = 0; i < data.n(); ++i) {
    const auto& o = data[i];
    out << format_double(o.y) << ',' << o.delta1 << ',' << o.delta2 << ',' << o.z
        << ',' << o.w;
    for (double v : o.x) out << ',' << format_double(v);
    if (!groups.empty()) out << ',' << groups[i];
    out << '\n';
  }
}

RankDiagnostic check_full_rank(const Dataset& data) {
  const std::size_t n = data.n();
  const std::size_t p = data.schema().m() + 1;
  Eigen::MatrixXd design(n, p);
  for (std::size_t i = 0; i < n; ++i) {
    design(i, 0) = data[i].z;
    for (std::size_t j = 0; j + 1 < p; ++j) design(i, j + 1) = data[i].x[j];
  }
  Eigen::MatrixXd centered = design.rowwise() - design.colwise().mean();
  Eigen::MatrixXd cov =
      centered.transpose() * centered / static_cast<double>(std::max<std::size_t>(n, 2) - 1);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(cov);
  const auto& sv = svd.singularValues();
  RankDiagnostic d;
  d.largest_singular_value = sv.size() ? sv(0) : 0.0;
  d.smallest_singular_value = sv.size() ? sv(sv.size() - 1) : 0.0;
  d.full_rank = d.largest_singular_value > 0.0 &&
                d.smallest_singular_value > 1e-10 * d.largest_singular_value;
  return d;
}

Dataset standardize_column(const Dataset& data, std::string_view column) {
  auto j = data.schema().index_of(column);
  if (!j) throw std::invalid_argument("unknown column '" + std::string(column) + "'");
  if (data.schema().kinds[*j] != CovariateKind::continuous)
    throw std::invalid_argument("column '" + std::string(column) + "' is not continuous");
  const double n = static_cast<double>(data.n());
  if (data.n() < 2) throw std::invalid_argument("standardize_column: need n >= 2");
  double mean = 0.0;
  for (const auto& o : data.observations()) mean += o.x[*j];
  mean /= n;
  double ss = 0.0;
  for (const auto& o : data.observations()) ss += (o.x[*j] - mean) * (o.x[*j] - mean);
  double sd = std::sqrt(ss / (n - 1.0));
  if (!(sd > 0.0))
    throw std::invalid_argument("column '" + std::string(column) + "' has zero variance");
  auto obs = data.observations();
  for (auto& o : obs) o.x[*j] = (o.x[*j] - mean) / sd;
  return Dataset(std::move(obs), data.schema());
}

}  // namespace cchr

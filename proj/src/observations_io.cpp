#include "manifold_langevin/observations_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "manifold_langevin/errors.hpp"

namespace manifold_langevin {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) {
    const auto b = field.find_first_not_of(" \t\r");
    const auto e = field.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? std::string() : field.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_number(const std::string& s, std::size_t line_no) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw InputError("observation CSV line " + std::to_string(line_no) +
                     ": '" + s + "' is not a number");
  }
  return v;
}

}  // namespace

Observations read_observations_csv(std::istream& in) {
  Observations obs;
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::string> fields = split_fields(line);
    if (!have_header) {
      for (const auto& f : fields) {
        if (f.empty()) throw InputError("observation CSV: empty column name in header");
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
        if (ec == std::errc() && ptr == f.data() + f.size()) {
          throw InputError("observation CSV: header row missing (first row is numeric)");
        }
      }
      obs.columns = std::move(fields);
      have_header = true;
      continue;
    }
    if (fields.size() != obs.columns.size()) {
      throw InputError("observation CSV line " + std::to_string(line_no) + ": expected " +
                       std::to_string(obs.columns.size()) + " fields, got " +
                       std::to_string(fields.size()));
    }
    std::vector<double> row;
    for (const auto& f : fields) row.push_back(parse_number(f, line_no));
    rows.push_back(std::move(row));
  }
  if (!have_header) throw InputError("observation CSV: missing header row");
  if (rows.empty()) throw InputError("observation CSV: no observations");
  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto k = static_cast<Eigen::Index>(obs.columns.size());
  obs.values.resize(n, k);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) {
      obs.values(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
  }
  return obs;
}

Observations read_observations_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open observation file " + path.string());
  return read_observations_csv(in);
}

void write_observations_csv(const Observations& obs, std::ostream& out,
                            std::optional<std::uint64_t> seed) {
  if (seed) out << "# seed=" << *seed << '\n';
  for (std::size_t j = 0; j < obs.columns.size(); ++j) {
    out << (j ? "," : "") << obs.columns[j];
  }
  out << '\n';
  out.precision(17);
  for (Eigen::Index i = 0; i < obs.values.rows(); ++i) {
    for (Eigen::Index j = 0; j < obs.values.cols(); ++j) {
      out << (j ? "," : "") << obs.values(i, j);
    }
    out << '\n';
  }
}

}  // namespace manifold_langevin

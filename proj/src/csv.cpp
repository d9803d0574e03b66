#include "nlch/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "nlch/errors.hpp"

namespace nlch {

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string Table::str() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
  os << "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
    os << "\n";
  }
  return os.str();
}

std::string diagnostics_csv(const std::vector<DiagnosticsRecord>& records) {
  Table t;
  t.header = {"t",         "mean_phi",  "mean_lo", "mean_hi", "min_phi", "max_phi", "min_sigma",
              "max_sigma", "energy",    "J",       "r_phi",   "r_sigma", "r_mu",    "flags"};
  for (const DiagnosticsRecord& r : records) {
    std::string flags;
    for (std::size_t i = 0; i < r.flags.size(); ++i) flags += (i ? ";" : "") + r.flags[i];
    t.add({format_real(r.t), format_real(r.mean_phi), format_real(r.mean_lo), format_real(r.mean_hi),
           format_real(r.min_phi), format_real(r.max_phi), format_real(r.min_sigma), format_real(r.max_sigma),
           format_real(r.energy), format_real(r.J), format_real(r.r_phi), format_real(r.r_sigma),
           format_real(r.r_mu), flags});
  }
  return t.str();
}

std::string state_csv(const State& s) {
  const Grid& g = s.phi.grid();
  std::ostringstream os;
  os << (g.dim() == 2 ? "x,y,phi,mu,sigma\n" : "x,phi,mu,sigma\n");
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i) {
      const std::size_t k = g.index(i, j);
      os << format_real(g.center(0, i)) << ",";
      if (g.dim() == 2) os << format_real(g.center(1, j)) << ",";
      os << format_real(s.phi[k]) << "," << format_real(s.mu.size() ? s.mu[k] : 0.0) << ","
         << format_real(s.sigma[k]) << "\n";
    }
  return os.str();
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    while (!cell.empty() && cell.front() == ' ') cell.erase(0, 1);
    out.push_back(cell);
  }
  return out;
}

}  // namespace

Field read_field_csv(const std::filesystem::path& path, const Grid& grid, const std::string& name) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open field file " + path.string());
  std::string line;
  int lineno = 0;
  std::vector<double> values;
  std::size_t column = std::string::npos;
  std::size_t columns = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    const auto cells = split(line);
    if (column == std::string::npos) {
      double probe = 0.0;
      const auto res = std::from_chars(cells[0].data(), cells[0].data() + cells[0].size(), probe);
      const bool header = res.ec != std::errc() || res.ptr != cells[0].data() + cells[0].size();
      columns = cells.size();
      column = columns - 1;
      if (header) {
        for (std::size_t i = 0; i < cells.size(); ++i)
          if (cells[i] == name) column = i;
        continue;
      }
    }
    if (cells.size() != columns)
      throw IoError(path.string() + ": line " + std::to_string(lineno) + ": expected " + std::to_string(columns) +
                        " columns",
                    lineno);
    double v = 0.0;
    const std::string& c = cells[column];
    const auto res = std::from_chars(c.data(), c.data() + c.size(), v);
    if (res.ec != std::errc() || res.ptr != c.data() + c.size())
      throw IoError(path.string() + ": line " + std::to_string(lineno) + ": cannot parse '" + c + "'", lineno);
    values.push_back(v);
  }
  if (values.size() != grid.size())
    throw IoError(path.string() + ": " + std::to_string(values.size()) + " values for a grid of " +
                  std::to_string(grid.size()) + " cells");
  return Field(grid, std::move(values));
}

void write_text(const std::filesystem::path& path, const std::string& content) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << content;
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace nlch

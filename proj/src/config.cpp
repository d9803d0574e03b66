#include "nlch/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <sstream>

#include "nlch/csv.hpp"
#include "nlch/errors.hpp"

namespace nlch {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::string at_line(int line, const std::string& msg) { return "line " + std::to_string(line) + ": " + msg; }

class LineParser {
 public:
  LineParser(std::string_view text, int line) : s_(text), line_(line) {}

  TomlValue value() {
    skip_ws();
    if (pos_ >= s_.size()) fail("missing value");
    const char c = s_[pos_];
    TomlValue v;
    v.line = line_;
    if (c == '"') {
      v.value = string();
    } else if (c == '[') {
      ++pos_;
      std::vector<TomlValue> items;
      skip_ws();
      if (peek() == ']') {
        ++pos_;
      } else {
        for (;;) {
          items.push_back(value());
          skip_ws();
          if (peek() == ',') {
            ++pos_;
            skip_ws();
            if (peek() == ']') {
              ++pos_;
              break;
            }
            continue;
          }
          if (peek() == ']') {
            ++pos_;
            break;
          }
          fail("expected ',' or ']' in array");
        }
      }
      v.value = std::move(items);
    } else if (s_.substr(pos_, 4) == "true") {
      pos_ += 4;
      v.value = true;
    } else if (s_.substr(pos_, 5) == "false") {
      pos_ += 5;
      v.value = false;
    } else {
      v.value = number();
    }
    return v;
  }

  void finish() {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] != '#') fail("unexpected trailing characters");
  }

 private:
  char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }
  void skip_ws() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t')) ++pos_;
  }
  [[noreturn]] void fail(const std::string& msg) const { throw IoError(at_line(line_, msg), line_); }

  std::string string() {
    ++pos_;
    std::string out;
    while (pos_ < s_.size() && s_[pos_] != '"') {
      char c = s_[pos_++];
      if (c == '\\') {
        if (pos_ >= s_.size()) fail("unterminated escape");
        const char e = s_[pos_++];
        switch (e) {
          case 'n':
            c = '\n';
            break;
          case 't':
            c = '\t';
            break;
          case '"':
          case '\\':
            c = e;
            break;
          default:
            fail(std::string("unsupported escape \\") + e);
        }
      }
      out.push_back(c);
    }
    if (pos_ >= s_.size()) fail("unterminated string");
    ++pos_;
    return out;
  }

  double number() {
    std::size_t end = pos_;
    while (end < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[end])) || s_[end] == '.' ||
                               s_[end] == '-' || s_[end] == '+' || s_[end] == '_'))
      ++end;
    std::string tok(s_.substr(pos_, end - pos_));
    tok.erase(std::remove(tok.begin(), tok.end(), '_'), tok.end());
    if (!tok.empty() && tok[0] == '+') tok.erase(0, 1);
    double v = 0.0;
    if (tok == "inf") {
      v = std::numeric_limits<double>::infinity();
    } else if (tok == "-inf") {
      v = -std::numeric_limits<double>::infinity();
    } else {
      const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
      if (tok.empty() || res.ec != std::errc() || res.ptr != tok.data() + tok.size())
        fail("cannot parse value '" + std::string(s_.substr(pos_, end - pos_)) + "'");
    }
    pos_ = end;
    return v;
  }

  std::string_view s_;
  std::size_t pos_ = 0;
  int line_;
};

bool valid_key(const std::string& k) {
  if (k.empty()) return false;
  return std::all_of(k.begin(), k.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
  });
}

}  // namespace

TomlTable parse_toml(const std::string& text) {
  TomlTable table;
  std::string section;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string s = trim(raw);
    if (s.empty() || s[0] == '#') continue;
    if (s[0] == '[') {
      const auto close = s.find(']');
      if (close == std::string::npos) throw IoError(at_line(line, "unterminated section header"), line);
      const std::string rest = trim(std::string_view(s).substr(close + 1));
      if (!rest.empty() && rest[0] != '#') throw IoError(at_line(line, "unexpected text after section header"), line);
      section = trim(std::string_view(s).substr(1, close - 1));
      if (!valid_key(section)) throw IoError(at_line(line, "invalid section name '" + section + "'"), line);
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw IoError(at_line(line, "expected key = value"), line);
    const std::string key = trim(std::string_view(s).substr(0, eq));
    if (!valid_key(key)) throw IoError(at_line(line, "invalid key '" + key + "'"), line);
    LineParser p(std::string_view(s).substr(eq + 1), line);
    TomlValue v = p.value();
    p.finish();
    const std::string full = section.empty() ? key : section + "." + key;
    if (!table.emplace(full, std::move(v)).second) throw IoError(at_line(line, "duplicate key '" + full + "'"), line);
  }
  return table;
}

// ---------------------------------------------------------------------------

InitialKind parse_initial_kind(const std::string& name) {
  if (name == "constant") return InitialKind::constant;
  if (name == "step" || name == "smoothed-step") return InitialKind::step;
  if (name == "random") return InitialKind::random;
  if (name == "cosine") return InitialKind::cosine;
  if (name == "file") return InitialKind::file;
  throw ConfigError("unknown initial profile '" + name + "'");
}

std::string to_string(InitialKind k) {
  switch (k) {
    case InitialKind::constant:
      return "constant";
    case InitialKind::step:
      return "step";
    case InitialKind::random:
      return "random";
    case InitialKind::cosine:
      return "cosine";
    case InitialKind::file:
      return "file";
  }
  return "?";
}

Field make_initial(const InitialSpec& spec, const Grid& grid, const std::string& field_name) {
  Field u(grid);
  const double L = grid.length(0);
  switch (spec.kind) {
    case InitialKind::constant:
      u = Field(grid, spec.value);
      break;
    case InitialKind::step:
      if (!(spec.width > 0.0)) throw ConfigError(field_name + ": step width must be positive");
      for (std::size_t k = 0; k < grid.size(); ++k) {
        const double x = grid.center(0, static_cast<int>(k % grid.nx()));
        u[k] = spec.low + (spec.high - spec.low) * 0.5 * (1.0 + std::tanh((x - spec.x0) / spec.width));
      }
      break;
    case InitialKind::random: {
      if (!spec.has_seed) throw ConfigError(field_name + ": random initial data needs an explicit seed");
      std::mt19937_64 rng(spec.seed);
      // Raw 53-bit draws keep the sequence independent of the standard
      // library's distribution implementation.
      for (std::size_t k = 0; k < grid.size(); ++k) {
        const double unit = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        u[k] = spec.value + spec.amplitude * (2.0 * unit - 1.0);
      }
      break;
    }
    case InitialKind::cosine:
      for (std::size_t k = 0; k < grid.size(); ++k) {
        const double x = grid.center(0, static_cast<int>(k % grid.nx()));
        u[k] = spec.value + spec.amplitude * std::cos(spec.mode * std::numbers::pi * x / L);
      }
      break;
    case InitialKind::file:
      u = read_field_csv(spec.path, grid, field_name);
      break;
  }
  return u;
}

Grid GridSpec::build() const {
  if (dim == 1) return Grid::make_1d(length_x, cells_x);
  if (dim == 2) return Grid::make_2d(length_x, length_y, cells_x, cells_y);
  throw ConfigError("grid dim must be 1 or 2");
}

DiscreteKernel RunConfig::build_kernel(const Grid& g) const {
  KernelSpec spec = kernel;
  if (interior_mass > 0.0) spec.amplitude = amplitude_for_interior_mass(spec, g, interior_mass);
  return DiscreteKernel::build(spec, g);
}

// ---------------------------------------------------------------------------

namespace {

class Reader {
 public:
  explicit Reader(const TomlTable& t) : t_(t) {}

  const TomlValue* find(const std::string& key) {
    used_.insert(key);
    const auto it = t_.find(key);
    return it == t_.end() ? nullptr : &it->second;
  }

  void real(const std::string& key, double& out) {
    if (const TomlValue* v = find(key)) out = as_real(*v, key);
  }
  void integer(const std::string& key, int& out) {
    if (const TomlValue* v = find(key)) out = as_int(*v, key);
  }
  void boolean(const std::string& key, bool& out) {
    if (const TomlValue* v = find(key)) {
      if (const bool* b = std::get_if<bool>(&v->value)) {
        out = *b;
      } else {
        fail(*v, key, "a boolean");
      }
    }
  }
  void string(const std::string& key, std::string& out) {
    if (const TomlValue* v = find(key)) out = as_string(*v, key);
  }
  template <class E, class Parse>
  void choice(const std::string& key, E& out, Parse parse) {
    if (const TomlValue* v = find(key)) {
      try {
        out = parse(as_string(*v, key));
      } catch (const ConfigError& e) {
        throw ConfigError(at_line(v->line, e.what()));
      }
    }
  }
  void reals(const std::string& key, std::vector<double>& out) {
    if (const TomlValue* v = find(key)) {
      const auto* arr = std::get_if<std::vector<TomlValue>>(&v->value);
      if (!arr) fail(*v, key, "an array of numbers");
      out.clear();
      for (const TomlValue& e : *arr) out.push_back(as_real(e, key));
    }
  }
  void seed(const std::string& key, std::uint64_t& out, bool& has) {
    if (const TomlValue* v = find(key)) {
      const double d = as_real(*v, key);
      if (!(d >= 0.0) || d != std::floor(d) || d > 9007199254740992.0) fail(*v, key, "a non-negative integer");
      out = static_cast<std::uint64_t>(d);
      has = true;
    }
  }

  void reject_unknown() const {
    for (const auto& [k, v] : t_)
      if (!used_.count(k)) throw ConfigError(at_line(v.line, "unknown key '" + k + "'"));
  }

 private:
  [[noreturn]] static void fail(const TomlValue& v, const std::string& key, const std::string& what) {
    throw ConfigError(at_line(v.line, "'" + key + "' must be " + what));
  }
  static double as_real(const TomlValue& v, const std::string& key) {
    if (const double* d = std::get_if<double>(&v.value)) return *d;
    fail(v, key, "a number");
  }
  static int as_int(const TomlValue& v, const std::string& key) {
    const double d = as_real(v, key);
    if (d != std::floor(d) || std::abs(d) > 2e9) fail(v, key, "an integer");
    return static_cast<int>(d);
  }
  static std::string as_string(const TomlValue& v, const std::string& key) {
    if (const std::string* s = std::get_if<std::string>(&v.value)) return *s;
    fail(v, key, "a string");
  }

  const TomlTable& t_;
  std::set<std::string> used_;
};

void read_initial(Reader& r, const std::string& prefix, InitialSpec& s) {
  r.choice(prefix, s.kind, parse_initial_kind);
  r.real(prefix + "_value", s.value);
  r.real(prefix + "_low", s.low);
  r.real(prefix + "_high", s.high);
  r.real(prefix + "_x0", s.x0);
  r.real(prefix + "_width", s.width);
  r.real(prefix + "_amplitude", s.amplitude);
  r.integer(prefix + "_mode", s.mode);
  r.seed(prefix + "_seed", s.seed, s.has_seed);
  r.string(prefix + "_file", s.path);
}

Splitting parse_splitting(const std::string& s) {
  if (s == "convex-split") return Splitting::convex_split;
  if (s == "fully-implicit") return Splitting::implicit_potential;
  throw ConfigError("unknown splitting '" + s + "' (convex-split or fully-implicit)");
}

std::string splitting_name(Splitting s) {
  return s == Splitting::convex_split ? "convex-split" : "fully-implicit";
}

}  // namespace

RunConfig config_from_table(const TomlTable& table) {
  RunConfig c;
  // The shipped physics: constant proliferation h1 = K keeps the mean away
  // from 0, where the regularized problem may undershoot.
  c.model.h1 = {SourceFamily::constant, 0.5};
  c.model.sigma_S = 0.8;
  c.phi0.kind = InitialKind::step;
  c.sigma0.kind = InitialKind::constant;
  c.sigma0.value = 0.5;

  Reader r(table);
  r.integer("grid.dim", c.grid.dim);
  r.real("grid.length", c.grid.length_x);
  r.real("grid.length_y", c.grid.length_y);
  r.integer("grid.cells", c.grid.cells_x);
  r.integer("grid.cells_y", c.grid.cells_y);

  r.choice("kernel.family", c.kernel.family, parse_kernel_family);
  r.real("kernel.width", c.kernel.width);
  r.real("kernel.amplitude", c.kernel.amplitude);
  bool has_cutoff = false;
  if (r.find("kernel.cutoff_radius")) {
    has_cutoff = true;
    r.real("kernel.cutoff_radius", c.kernel.cutoff_radius);
  }
  if (!has_cutoff) c.kernel.cutoff_radius = c.kernel.family == KernelFamily::gaussian ? 3.0 * c.kernel.width : c.kernel.width;
  bool explicit_amplitude = table.count("kernel.amplitude") > 0;
  c.interior_mass = explicit_amplitude ? 0.0 : c.interior_mass;
  r.real("kernel.interior_mass", c.interior_mass);
  if (explicit_amplitude && table.count("kernel.interior_mass") && c.interior_mass > 0.0)
    throw ConfigError(at_line(table.at("kernel.interior_mass").line,
                              "set either kernel.amplitude or kernel.interior_mass, not both"));

  r.real("potential.phi_bar", c.phi_bar);
  r.real("potential.lambda", c.lambda);
  r.real("potential.lambda_bar", c.lambda_bar);

  r.real("model.tau", c.model.tau);
  r.real("model.chi", c.model.chi);
  r.real("model.B", c.model.B);
  r.real("model.C", c.model.C);
  r.real("model.m", c.model.m);
  r.choice("model.h1", c.model.h1.family, parse_source_family);
  r.real("model.h1_value", c.model.h1.value);
  r.choice("model.h2", c.model.h2.family, parse_source_family);
  r.real("model.h2_value", c.model.h2.value);
  r.real("model.sigma_S", c.model.sigma_S);
  std::string mode = c.model.strict_mode ? "strict" : "lab";
  r.string("model.mode", mode);
  if (mode != "strict" && mode != "lab") throw ConfigError("model.mode must be \"strict\" or \"lab\"");
  c.model.strict_mode = mode == "strict";

  r.real("scheme.dt", c.scheme.dt);
  r.real("scheme.newton_tol", c.scheme.newton_tol);
  r.integer("scheme.newton_max_iter", c.scheme.newton_max_iter);
  r.choice("scheme.splitting", c.scheme.splitting, parse_splitting);
  r.integer("scheme.max_halvings", c.scheme.max_halvings);
  if (!(c.scheme.dt > 0.0)) throw ConfigError("scheme.dt must be positive");
  if (!(c.scheme.newton_tol > 0.0) || c.scheme.newton_max_iter < 1)
    throw ConfigError("scheme tolerances must be positive");

  read_initial(r, "initial.phi", c.phi0);
  read_initial(r, "initial.sigma", c.sigma0);

  r.real("run.T", c.T);
  r.integer("run.snapshot_every", c.snapshot_every);
  if (!(c.T >= 0.0)) throw ConfigError("run.T must be non-negative");
  r.string("output.dir", c.out_dir);

  r.reals("sweep.taus", c.taus);
  r.reals("sweep.lambdas", c.lambdas);
  r.real("compare.amplitude", c.compare_amplitude);
  r.integer("compare.mode", c.compare_mode);

  r.reject_unknown();
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  RunConfig c;
  try {
    c = config_from_table(parse_toml(ss.str()));
  } catch (const IoError& e) {
    throw IoError(path.string() + ": " + e.what(), e.line());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  c.base_dir = path.parent_path();
  for (InitialSpec* s : {&c.phi0, &c.sigma0})
    if (s->kind == InitialKind::file && std::filesystem::path(s->path).is_relative())
      s->path = (c.base_dir / s->path).string();
  return c;
}

namespace {

std::string q(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out + "\"";
}

void dump_initial(std::ostream& os, const std::string& p, const InitialSpec& s) {
  os << p << " = " << q(to_string(s.kind)) << "\n";
  os << p << "_value = " << format_real(s.value) << "\n";
  os << p << "_low = " << format_real(s.low) << "\n";
  os << p << "_high = " << format_real(s.high) << "\n";
  os << p << "_x0 = " << format_real(s.x0) << "\n";
  os << p << "_width = " << format_real(s.width) << "\n";
  os << p << "_amplitude = " << format_real(s.amplitude) << "\n";
  os << p << "_mode = " << s.mode << "\n";
  if (s.has_seed) os << p << "_seed = " << s.seed << "\n";
  if (!s.path.empty()) os << p << "_file = " << q(s.path) << "\n";
}

std::string list(const std::vector<double>& v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + format_real(v[i]);
  return out + "]";
}

}  // namespace

std::string to_toml(const RunConfig& c) {
  std::ostringstream os;
  os << "[grid]\ndim = " << c.grid.dim << "\nlength = " << format_real(c.grid.length_x)
     << "\nlength_y = " << format_real(c.grid.length_y) << "\ncells = " << c.grid.cells_x
     << "\ncells_y = " << c.grid.cells_y << "\n\n";
  os << "[kernel]\nfamily = " << q(to_string(c.kernel.family)) << "\nwidth = " << format_real(c.kernel.width)
     << "\ncutoff_radius = " << format_real(c.kernel.cutoff_radius) << "\n";
  if (c.interior_mass > 0.0) {
    os << "interior_mass = " << format_real(c.interior_mass) << "\n\n";
  } else {
    os << "amplitude = " << format_real(c.kernel.amplitude) << "\n\n";
  }
  os << "[potential]\nphi_bar = " << format_real(c.phi_bar) << "\nlambda = " << format_real(c.lambda)
     << "\nlambda_bar = " << format_real(c.lambda_bar) << "\n\n";
  os << "[model]\nmode = " << q(c.model.strict_mode ? "strict" : "lab") << "\ntau = " << format_real(c.model.tau)
     << "\nchi = " << format_real(c.model.chi) << "\nB = " << format_real(c.model.B)
     << "\nC = " << format_real(c.model.C) << "\nm = " << format_real(c.model.m)
     << "\nh1 = " << q(to_string(c.model.h1.family)) << "\nh1_value = " << format_real(c.model.h1.value)
     << "\nh2 = " << q(to_string(c.model.h2.family)) << "\nh2_value = " << format_real(c.model.h2.value)
     << "\nsigma_S = " << format_real(c.model.sigma_S) << "\n\n";
  os << "[scheme]\ndt = " << format_real(c.scheme.dt) << "\nnewton_tol = " << format_real(c.scheme.newton_tol)
     << "\nnewton_max_iter = " << c.scheme.newton_max_iter << "\nsplitting = " << q(splitting_name(c.scheme.splitting))
     << "\nmax_halvings = " << c.scheme.max_halvings << "\n\n";
  os << "[initial]\n";
  dump_initial(os, "phi", c.phi0);
  dump_initial(os, "sigma", c.sigma0);
  os << "\n[run]\nT = " << format_real(c.T) << "\nsnapshot_every = " << c.snapshot_every << "\n\n";
  os << "[output]\ndir = " << q(c.out_dir) << "\n\n";
  os << "[sweep]\ntaus = " << list(c.taus) << "\nlambdas = " << list(c.lambdas) << "\n\n";
  os << "[compare]\namplitude = " << format_real(c.compare_amplitude) << "\nmode = " << c.compare_mode << "\n";
  return os.str();
}

}  // namespace nlch

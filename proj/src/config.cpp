#include "ep/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "ep/csv.hpp"
#include "ep/errors.hpp"

namespace ep {

namespace {

// ---------------------------------------------------------------------------
// TOML subset: value tree

struct TomlValue {
  enum class Kind { str, num, boolean, arr, tab };
  Kind kind = Kind::num;
  std::string s;
  double d = 0.0;
  bool b = false;
  std::vector<TomlValue> items;
  std::vector<std::pair<std::string, TomlValue>> entries;
  int line = 0;

  const TomlValue* find(const std::string& key) const {
    for (const auto& e : entries)
      if (e.first == key) return &e.second;
    return nullptr;
  }
  TomlValue* findm(const std::string& key) {
    for (auto& e : entries)
      if (e.first == key) return &e.second;
    return nullptr;
  }
};

[[noreturn]] void parse_fail(int line, const std::string& msg) {
  fail(errc::config_error, "line " + std::to_string(line) + ": " + msg);
}

bool bare_key_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
         c == '_' || c == '-';
}

// Recursive descent over the value part of one "key = value" line.
struct ValueParser {
  const std::string& s;
  std::size_t pos = 0;
  int line = 0;

  void skip_ws() {
    while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t')) ++pos;
  }
  char peek() const { return pos < s.size() ? s[pos] : '\0'; }

  TomlValue parse_value() {
    skip_ws();
    const char c = peek();
    if (c == '"') return parse_string();
    if (c == '[') return parse_array();
    if (c == '{') return parse_inline_table();
    return parse_scalar();
  }

  TomlValue parse_string() {
    ++pos; // opening quote
    const std::size_t close = s.find('"', pos);
    if (close == std::string::npos) parse_fail(line, "unterminated string");
    TomlValue v;
    v.kind = TomlValue::Kind::str;
    v.s = s.substr(pos, close - pos);
    v.line = line;
    pos = close + 1;
    return v;
  }

  TomlValue parse_array() {
    ++pos; // '['
    TomlValue v;
    v.kind = TomlValue::Kind::arr;
    v.line = line;
    skip_ws();
    if (peek() == ']') {
      ++pos;
      return v;
    }
    while (true) {
      v.items.push_back(parse_value());
      skip_ws();
      if (peek() == ',') {
        ++pos;
        continue;
      }
      if (peek() == ']') {
        ++pos;
        return v;
      }
      parse_fail(line, "expected ',' or ']' in array");
    }
  }

  TomlValue parse_inline_table() {
    ++pos; // '{'
    TomlValue v;
    v.kind = TomlValue::Kind::tab;
    v.line = line;
    skip_ws();
    if (peek() == '}') {
      ++pos;
      return v;
    }
    while (true) {
      skip_ws();
      std::string key;
      while (pos < s.size() && bare_key_char(s[pos])) key += s[pos++];
      if (key.empty()) parse_fail(line, "expected a key in inline table");
      skip_ws();
      if (peek() != '=') parse_fail(line, "expected '=' after key '" + key + "'");
      ++pos;
      if (v.find(key)) parse_fail(line, "duplicate key '" + key + "'");
      v.entries.emplace_back(key, parse_value());
      skip_ws();
      if (peek() == ',') {
        ++pos;
        continue;
      }
      if (peek() == '}') {
        ++pos;
        return v;
      }
      parse_fail(line, "expected ',' or '}' in inline table");
    }
  }

  TomlValue parse_scalar() {
    std::string tok;
    while (pos < s.size()) {
      const char c = s[pos];
      if (c == ',' || c == ']' || c == '}' || c == ' ' || c == '\t') break;
      tok += c;
      ++pos;
    }
    if (tok.empty()) parse_fail(line, "expected a value");
    TomlValue v;
    v.line = line;
    if (tok == "true" || tok == "false") {
      v.kind = TomlValue::Kind::boolean;
      v.b = tok == "true";
      return v;
    }
    char* end = nullptr;
    v.kind = TomlValue::Kind::num;
    v.d = std::strtod(tok.c_str(), &end);
    if (end != tok.c_str() + tok.size()) parse_fail(line, "invalid value '" + tok + "'");
    return v;
  }
};

std::string strip_comment(const std::string& line) {
  bool in_string = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') in_string = !in_string;
    if (line[i] == '#' && !in_string) return line.substr(0, i);
  }
  return line;
}

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
  return s.substr(b, e - b);
}

TomlValue parse_toml(const std::string& text) {
  TomlValue root;
  root.kind = TomlValue::Kind::tab;
  TomlValue* current = &root;
  std::set<std::string> seen_sections;

  int line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t nl = text.find('\n', start);
    const std::string raw =
        text.substr(start, nl == std::string::npos ? std::string::npos : nl - start);
    start = nl == std::string::npos ? text.size() + 1 : nl + 1;
    ++line_no;

    const std::string line = trim(strip_comment(raw));
    if (line.empty()) continue;

    if (line.front() == '[') {
      const std::size_t close = line.find(']');
      if (close == std::string::npos) parse_fail(line_no, "missing ']' in section header");
      if (!trim(line.substr(close + 1)).empty())
        parse_fail(line_no, "unexpected text after section header");
      const std::string path = trim(line.substr(1, close - 1));
      if (path.empty()) parse_fail(line_no, "empty section name");
      if (!seen_sections.insert(path).second)
        parse_fail(line_no, "duplicate section [" + path + "]");

      current = &root;
      std::size_t p = 0;
      while (true) {
        const std::size_t dot = path.find('.', p);
        const std::string part =
            trim(path.substr(p, dot == std::string::npos ? std::string::npos : dot - p));
        if (part.empty()) parse_fail(line_no, "empty section name component");
        for (char c : part)
          if (!bare_key_char(c)) parse_fail(line_no, "invalid section name '" + part + "'");
        TomlValue* next = current->findm(part);
        if (!next) {
          TomlValue t;
          t.kind = TomlValue::Kind::tab;
          t.line = line_no;
          current->entries.emplace_back(part, std::move(t));
          next = &current->entries.back().second;
        } else if (next->kind != TomlValue::Kind::tab) {
          parse_fail(line_no, "'" + part + "' is not a table");
        }
        current = next;
        if (dot == std::string::npos) break;
        p = dot + 1;
      }
      continue;
    }

    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) parse_fail(line_no, "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) parse_fail(line_no, "empty key");
    for (char c : key)
      if (!bare_key_char(c)) parse_fail(line_no, "invalid key '" + key + "'");
    if (current->find(key)) parse_fail(line_no, "duplicate key '" + key + "'");

    const std::string value = trim(line.substr(eq + 1));
    ValueParser vp{value, 0, line_no};
    TomlValue v = vp.parse_value();
    vp.skip_ws();
    if (vp.pos != value.size()) parse_fail(line_no, "unexpected trailing characters");
    current->entries.emplace_back(key, std::move(v));
  }
  return root;
}

// ---------------------------------------------------------------------------
// Mapping onto RunConfig

[[noreturn]] void bad_value(const TomlValue& v, const std::string& where,
                            const std::string& expected) {
  fail(errc::config_error,
       "line " + std::to_string(v.line) + ": " + where + " must be " + expected);
}

double num_of(const TomlValue& v, const std::string& where) {
  if (v.kind != TomlValue::Kind::num) bad_value(v, where, "a number");
  return v.d;
}

int int_of(const TomlValue& v, const std::string& where) {
  if (v.kind != TomlValue::Kind::num || v.d != std::floor(v.d) || std::fabs(v.d) > 2147483647.0)
    bad_value(v, where, "an integer");
  return static_cast<int>(v.d);
}

std::string str_of(const TomlValue& v, const std::string& where) {
  if (v.kind != TomlValue::Kind::str) bad_value(v, where, "a string");
  return v.s;
}

std::vector<double> num_array_of(const TomlValue& v, const std::string& where) {
  if (v.kind != TomlValue::Kind::arr) bad_value(v, where, "an array of numbers");
  std::vector<double> out;
  out.reserve(v.items.size());
  for (const auto& item : v.items) out.push_back(num_of(item, where + " element"));
  return out;
}

ProfileSpec parse_profile(const TomlValue& v, const std::string& where) {
  if (v.kind != TomlValue::Kind::tab) bad_value(v, where, "a table");
  ProfileSpec p;
  bool have_kind = false;
  for (const auto& [key, val] : v.entries) {
    const std::string at = where + "." + key;
    if (key == "kind") {
      p.kind = str_of(val, at);
      have_kind = true;
    } else if (key == "amp") {
      p.amp = num_of(val, at);
    } else if (key == "k") {
      p.k = int_of(val, at);
    } else if (key == "coeffs") {
      p.coeffs = num_array_of(val, at);
    } else if (key == "x") {
      p.xs = num_array_of(val, at);
    } else if (key == "y") {
      p.ys = num_array_of(val, at);
    } else {
      fail(errc::config_error, "unknown key '" + at + "'");
    }
  }
  if (!have_kind) fail(errc::config_error, where + " needs a 'kind'");
  if (p.kind != "zero" && p.kind != "cospi" && p.kind != "sinpi" && p.kind != "poly" &&
      p.kind != "table")
    fail(errc::config_error, where + ": unknown profile kind '" + p.kind + "'");
  if (p.kind == "poly" && p.coeffs.empty())
    fail(errc::config_error, where + ": poly needs 'coeffs'");
  if (p.kind == "table" && (p.xs.size() != p.ys.size() || p.xs.size() < 2))
    fail(errc::config_error, where + ": table needs matching 'x' and 'y' with >= 2 knots");
  return p;
}

void apply_inlet(const TomlValue& t, RunConfig& cfg) {
  for (const auto& [key, v] : t.entries) {
    const std::string at = "inlet." + key;
    if (key == "gamma") cfg.inlet.gamma = num_of(v, at);
    else if (key == "rho0") cfg.inlet.rho0 = num_of(v, at);
    else if (key == "u10") cfg.inlet.u10 = num_of(v, at);
    else if (key == "u20") cfg.inlet.u20 = num_of(v, at);
    else if (key == "a0") cfg.inlet.a0 = num_of(v, at);
    else if (key == "e0") cfg.inlet.e0 = num_of(v, at);
    else if (key == "b0") cfg.inlet.b0 = num_of(v, at);
    else if (key == "r0") cfg.inlet.r0 = num_of(v, at);
    else if (key == "r1") cfg.inlet.r1 = num_of(v, at);
    else if (key == "n_nodes") cfg.n_nodes = int_of(v, at);
    else fail(errc::config_error, "unknown key '" + at + "'");
  }
}

void apply_grid(const TomlValue& t, RunConfig& cfg) {
  for (const auto& [key, v] : t.entries) {
    const std::string at = "grid." + key;
    if (key == "nr") cfg.nr = int_of(v, at);
    else if (key == "nz") cfg.nz = int_of(v, at);
    else fail(errc::config_error, "unknown key '" + at + "'");
  }
}

void apply_boundary(const TomlValue& t, RunConfig& cfg) {
  for (const auto& [key, v] : t.entries) {
    const std::string at = "boundary." + key;
    if (key == "eps") cfg.eps = num_of(v, at);
    else if (key == "u2_en") cfg.u2_en = parse_profile(v, at);
    else if (key == "u3_en") cfg.u3_en = parse_profile(v, at);
    else if (key == "a_en") cfg.a_en = parse_profile(v, at);
    else if (key == "k_en") cfg.k_en = parse_profile(v, at);
    else if (key == "phi_en") cfg.phi_en = parse_profile(v, at);
    else if (key == "u1_ex") cfg.u1_ex = parse_profile(v, at);
    else if (key == "phi_ex") cfg.phi_ex = parse_profile(v, at);
    else if (key == "b_radial") cfg.b_radial = parse_profile(v, at);
    else if (key == "b_axial") cfg.b_axial = parse_profile(v, at);
    else fail(errc::config_error, "unknown key '" + at + "'");
  }
}

void apply_check3d(const TomlValue& t, RunConfig& cfg) {
  for (const auto& [key, v] : t.entries) {
    const std::string at = "check3d." + key;
    if (key == "preset") cfg.check3d_preset = str_of(v, at);
    else cfg.check3d_params.emplace_back(key, num_of(v, at));
  }
  std::sort(cfg.check3d_params.begin(), cfg.check3d_params.end());
  if (cfg.check3d_preset != "background" && cfg.check3d_preset != "swirl" &&
      cfg.check3d_preset != "uniform")
    fail(errc::config_error, "check3d: unknown preset '" + cfg.check3d_preset + "'");
}

void apply_solver(const TomlValue& t, RunConfig& cfg) {
  for (const auto& [key, v] : t.entries) {
    const std::string at = "solver." + key;
    if (key == "tol") cfg.tol = num_of(v, at);
    else if (key == "max_iter") cfg.max_iter = int_of(v, at);
    else if (key == "delta_guard") cfg.delta_guard = num_of(v, at);
    else if (key == "outdir") cfg.outdir = str_of(v, at);
    else fail(errc::config_error, "unknown key '" + at + "'");
  }
}

void apply_sweep(const TomlValue& t, RunConfig& cfg) {
  for (const auto& [key, v] : t.entries) {
    const std::string at = "sweep." + key;
    if (key == "eps") {
      cfg.sweep_eps = num_array_of(v, at);
      if (cfg.sweep_eps.empty()) fail(errc::config_error, at + " must not be empty");
      for (double e : cfg.sweep_eps)
        if (!(e > 0.0)) fail(errc::config_error, at + " entries must be positive");
    } else {
      fail(errc::config_error, "unknown key '" + at + "'");
    }
  }
}

// ---------------------------------------------------------------------------
// Canonical serialization

std::string int_str(int v) { return std::to_string(v); }

std::string array_str(const std::vector<double>& xs) {
  if (xs.empty()) return "[]";
  std::string out = "[ ";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ", ";
    out += format_sig(xs[i]);
  }
  out += " ]";
  return out;
}

std::string profile_str(const ProfileSpec& p) {
  std::string out = "{ kind = \"" + p.kind + "\"";
  if (p.kind == "cospi" || p.kind == "sinpi")
    out += ", amp = " + format_sig(p.amp) + ", k = " + int_str(p.k);
  else if (p.kind == "poly")
    out += ", coeffs = " + array_str(p.coeffs);
  else if (p.kind == "table")
    out += ", x = " + array_str(p.xs) + ", y = " + array_str(p.ys);
  out += " }";
  return out;
}

} // namespace

Profile1D ProfileSpec::build() const {
  if (kind == "zero") return Profile1D();
  if (kind == "cospi") return Profile1D::cospi(amp, k);
  if (kind == "sinpi") return Profile1D::sinpi(amp, k);
  if (kind == "poly") return Profile1D::poly(coeffs);
  if (kind == "table") return Profile1D::table(xs, ys);
  fail(errc::config_error, "unknown profile kind '" + kind + "'");
}

BoundaryPerturbation RunConfig::boundary() const {
  BoundaryPerturbation bc;
  bc.eps = eps;
  bc.u2_en = u2_en.build();
  bc.u3_en = u3_en.build();
  bc.a_en = a_en.build();
  bc.k_en = k_en.build();
  bc.phi_en = phi_en.build();
  bc.u1_ex = u1_ex.build();
  bc.phi_ex = phi_ex.build();
  bc.b_radial = b_radial.build();
  bc.b_axial = b_axial.build();
  bc.check_compatibility();
  return bc;
}

RunConfig parse_config(const std::string& text) {
  const TomlValue root = parse_toml(text);
  RunConfig cfg;
  for (const auto& [key, v] : root.entries) {
    if (v.kind != TomlValue::Kind::tab)
      fail(errc::config_error,
           "line " + std::to_string(v.line) + ": top-level key '" + key +
               "' outside any section");
    if (key == "inlet") apply_inlet(v, cfg);
    else if (key == "grid") apply_grid(v, cfg);
    else if (key == "boundary") apply_boundary(v, cfg);
    else if (key == "check3d") apply_check3d(v, cfg);
    else if (key == "solver") apply_solver(v, cfg);
    else if (key == "sweep") apply_sweep(v, cfg);
    else fail(errc::config_error, "unknown section [" + key + "]");
  }

  // semantic validation; anything wrong with the data is a config error
  try {
    cfg.inlet.validate();
    (void)cfg.grid();
    (void)cfg.boundary();
    if (!(cfg.tol > 0.0)) fail(errc::invalid_argument, "solver.tol must be positive");
    if (cfg.max_iter < 1) fail(errc::invalid_argument, "solver.max_iter must be >= 1");
    if (cfg.n_nodes < 9) fail(errc::invalid_argument, "inlet.n_nodes must be >= 9");
    if (!(cfg.eps >= 0.0)) fail(errc::invalid_argument, "boundary.eps must be >= 0");
  } catch (const solver_error& e) {
    if (e.code() == errc::config_error) throw;
    fail(errc::config_error, e.what());
  }
  return cfg;
}

RunConfig load_config(const std::string& path) { return parse_config(read_text_file(path)); }

std::string write_config(const RunConfig& cfg) {
  std::string out;
  out += "[inlet]\n";
  out += "gamma = " + format_sig(cfg.inlet.gamma) + "\n";
  out += "rho0 = " + format_sig(cfg.inlet.rho0) + "\n";
  out += "u10 = " + format_sig(cfg.inlet.u10) + "\n";
  out += "u20 = " + format_sig(cfg.inlet.u20) + "\n";
  out += "a0 = " + format_sig(cfg.inlet.a0) + "\n";
  out += "e0 = " + format_sig(cfg.inlet.e0) + "\n";
  out += "b0 = " + format_sig(cfg.inlet.b0) + "\n";
  out += "r0 = " + format_sig(cfg.inlet.r0) + "\n";
  out += "r1 = " + format_sig(cfg.inlet.r1) + "\n";
  out += "n_nodes = " + int_str(cfg.n_nodes) + "\n";
  out += "\n[grid]\n";
  out += "nr = " + int_str(cfg.nr) + "\n";
  out += "nz = " + int_str(cfg.nz) + "\n";
  out += "\n[boundary]\n";
  out += "eps = " + format_sig(cfg.eps) + "\n";
  out += "u2_en = " + profile_str(cfg.u2_en) + "\n";
  out += "u3_en = " + profile_str(cfg.u3_en) + "\n";
  out += "a_en = " + profile_str(cfg.a_en) + "\n";
  out += "k_en = " + profile_str(cfg.k_en) + "\n";
  out += "phi_en = " + profile_str(cfg.phi_en) + "\n";
  out += "u1_ex = " + profile_str(cfg.u1_ex) + "\n";
  out += "phi_ex = " + profile_str(cfg.phi_ex) + "\n";
  out += "b_radial = " + profile_str(cfg.b_radial) + "\n";
  out += "b_axial = " + profile_str(cfg.b_axial) + "\n";
  out += "\n[check3d]\n";
  out += "preset = \"" + cfg.check3d_preset + "\"\n";
  for (const auto& [key, value] : cfg.check3d_params)
    out += key + " = " + format_sig(value) + "\n";
  out += "\n[solver]\n";
  out += "tol = " + format_sig(cfg.tol) + "\n";
  out += "max_iter = " + int_str(cfg.max_iter) + "\n";
  out += "delta_guard = " + format_sig(cfg.delta_guard) + "\n";
  out += "outdir = \"" + cfg.outdir + "\"\n";
  out += "\n[sweep]\n";
  out += "eps = " + array_str(cfg.sweep_eps) + "\n";
  return out;
}

} // namespace ep

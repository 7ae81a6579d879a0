#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "otto/runner.hpp"

namespace otto {

std::string to_string(RunMode mode) {
  switch (mode) {
    case RunMode::SingleCycle:
      return "single";
    case RunMode::LimitCycle:
      return "limit";
    case RunMode::FidelityReport:
      return "fidelity";
    case RunMode::CoherenceReport:
      return "coherence";
  }
  return "?";
}

RunMode parse_mode(std::string_view name) {
  if (name == "single" || name == "single-cycle") {
    return RunMode::SingleCycle;
  }
  if (name == "limit" || name == "limit-cycle") {
    return RunMode::LimitCycle;
  }
  if (name == "fidelity" || name == "fidelity-report") {
    return RunMode::FidelityReport;
  }
  if (name == "coherence" || name == "coherence-report") {
    return RunMode::CoherenceReport;
  }
  throw InvalidArgument("unknown mode '" + std::string(name) +
                        "' (expected single, limit, fidelity, coherence)");
}

std::vector<double> Grid::values() const {
  std::vector<double> out;
  if (count == 1) {
    out.push_back(min);
    return out;
  }
  for (int i = 0; i < count; ++i) {
    // Endpoints exact; interior points from one formula so they do not drift.
    out.push_back(i == count - 1 ? max : min + (max - min) * i / (count - 1));
  }
  return out;
}

namespace {

void require(bool ok, const std::string& key, const std::string& what) {
  if (!ok) {
    throw ConfigError(key + ": " + what, 0, key);
  }
}

bool finite_positive(double v) { return std::isfinite(v) && v > 0.0; }

void check_grid(const Grid& g, const std::string& prefix) {
  require(finite_positive(g.min), prefix + "_min", "must be positive");
  require(finite_positive(g.max), prefix + "_max", "must be positive");
  require(g.count >= 1, prefix + "_count", "must be >= 1");
  require(g.max >= g.min, prefix + "_max", "must be >= " + prefix + "_min");
  require(g.count == 1 || g.max > g.min, prefix + "_count",
          "must be 1 when the grid is a single value");
}

}  // namespace

void RunSpec::validate() const {
  const EngineConfig& e = engine;
  require(finite_positive(e.omega_c), "omega_c", "must be positive");
  require(finite_positive(e.omega_h), "omega_h", "must be positive");
  require(e.omega_h > e.omega_c, "omega_h", "must exceed omega_c");
  require(finite_positive(e.T_c), "T_c", "must be positive");
  require(finite_positive(e.T_h), "T_h", "must be positive");
  require(e.T_h > e.T_c, "T_h", "must exceed T_c");
  require(finite_positive(e.gamma_h), "gamma_h", "must be positive");
  require(finite_positive(e.gamma_c), "gamma_c", "must be positive");
  require(e.dim >= 2, "dim", "must be >= 2");
  require(e.propagation.min_steps >= 200, "steps", "must be >= 200");
  check_grid(tau_adi, "tau_adi");
  check_grid(tau_iso, "tau_iso");
  require(!variants.empty(), "variant", "needs at least one variant");
  require(workers >= 1, "workers", "must be >= 1");
  require(fidelity_tol > 0.0 && fidelity_tol <= 1.0, "fidelity_tol", "must lie in (0, 1]");
  require(max_cycles >= 1, "max_cycles", "must be >= 1");
  require(!output_dir.empty(), "output_dir", "must not be empty");
  try {
    EngineConfig probe = at(variants.front(), tau_adi.min, tau_iso.min);
    probe.validate();
  } catch (const TruncationError& err) {
    throw ConfigError(std::string("dim: ") + err.what(), 0, "dim");
  }
}

EngineConfig RunSpec::at(Variant v, double adi, double iso) const {
  EngineConfig c = engine;
  c.variant = v;
  c.tau_adi = adi;
  c.tau_iso = iso;
  return c;
}

std::string RunSpec::canonical() const {
  std::ostringstream os;
  auto line = [&](const char* key, const std::string& value) {
    os << key << " = " << value << "\n";
  };
  line("code_version", kCodeVersion);
  line("omega_c", format_number(engine.omega_c));
  line("omega_h", format_number(engine.omega_h));
  line("T_c", format_number(engine.T_c));
  line("T_h", format_number(engine.T_h));
  line("gamma_h", format_number(engine.gamma_h));
  line("gamma_c", format_number(engine.gamma_c));
  line("dim", std::to_string(engine.dim));
  line("steps", std::to_string(engine.propagation.min_steps));
  line("stiffness_limit", format_number(engine.propagation.stiffness_limit));
  line("substeps", std::to_string(engine.propagation.substeps));
  line("tau_adi", format_number(tau_adi.min) + ":" + format_number(tau_adi.max) + ":" +
                      std::to_string(tau_adi.count));
  line("tau_iso", format_number(tau_iso.min) + ":" + format_number(tau_iso.max) + ":" +
                      std::to_string(tau_iso.count));
  std::string vs;
  for (Variant v : variants) {
    vs += (vs.empty() ? "" : ",") + to_string(v);
  }
  line("variant", vs);
  line("mode", to_string(mode));
  line("fidelity_tol", format_number(fidelity_tol));
  line("max_cycles", std::to_string(max_cycles));
  return os.str();
}

std::uint64_t RunSpec::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
    s.remove_suffix(1);
  }
  return s;
}

struct Value {
  enum class Kind { Number, String, Array } kind = Kind::Number;
  double number = 0.0;
  std::string text;  // original spelling of a number, or the string
  std::vector<std::string> items;
};

class LineParser {
 public:
  LineParser(std::string_view text, int line, const std::string& source)
      : text_(text), line_(line), source_(source) {}

  [[noreturn]] void fail(const std::string& what, const std::string& key = {}) const {
    throw ConfigError(source_ + ":" + std::to_string(line_) + ": " + what, line_, key);
  }

  std::string parse_string() {
    // At an opening quote.
    ++pos_;
    std::string out;
    while (pos_ < text_.size() && text_[pos_] != '"') {
      if (text_[pos_] == '\\' && pos_ + 1 < text_.size()) {
        ++pos_;
        const char e = text_[pos_];
        out.push_back(e == 'n' ? '\n' : e == 't' ? '\t' : e);
      } else {
        out.push_back(text_[pos_]);
      }
      ++pos_;
    }
    if (pos_ >= text_.size()) {
      fail("unterminated string");
    }
    ++pos_;
    return out;
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
  }

  Value parse_value(const std::string& key) {
    skip_space();
    Value v;
    if (pos_ >= text_.size()) {
      fail("missing value for '" + key + "'", key);
    }
    if (text_[pos_] == '"') {
      v.kind = Value::Kind::String;
      v.text = parse_string();
    } else if (text_[pos_] == '[') {
      v.kind = Value::Kind::Array;
      ++pos_;
      skip_space();
      while (pos_ < text_.size() && text_[pos_] != ']') {
        if (text_[pos_] != '"') {
          fail("arrays hold quoted strings only", key);
        }
        v.items.push_back(parse_string());
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == ',') {
          ++pos_;
          skip_space();
        }
      }
      if (pos_ >= text_.size()) {
        fail("unterminated array", key);
      }
      ++pos_;
    } else {
      std::size_t end = pos_;
      while (end < text_.size() && text_[end] != '#' &&
             !std::isspace(static_cast<unsigned char>(text_[end]))) {
        ++end;
      }
      std::string token(text_.substr(pos_, end - pos_));
      std::erase(token, '_');
      const char* first = token.data();
      const char* last = first + token.size();
      if (!token.empty() && *first == '+') {
        ++first;
      }
      const auto [ptr, ec] = std::from_chars(first, last, v.number);
      if (ec != std::errc() || ptr != last) {
        fail("'" + std::string(text_.substr(pos_, end - pos_)) + "' is not a number", key);
      }
      v.text = token;
      pos_ = end;
    }
    skip_space();
    if (pos_ < text_.size() && text_[pos_] != '#') {
      fail("unexpected trailing text after value of '" + key + "'", key);
    }
    return v;
  }

  std::string parse_key() {
    skip_space();
    std::size_t end = pos_;
    while (end < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[end])) || text_[end] == '_')) {
      ++end;
    }
    if (end == pos_) {
      fail("expected a key");
    }
    std::string key(text_.substr(pos_, end - pos_));
    pos_ = end;
    skip_space();
    if (pos_ >= text_.size() || text_[pos_] != '=') {
      fail("expected '=' after '" + key + "'", key);
    }
    ++pos_;
    return key;
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  int line_;
  const std::string& source_;
};

}  // namespace

RunSpec parse_config(std::string_view text, const std::string& source) {
  RunSpec spec;
  std::set<std::string> seen;
  int line_no = 0;

  while (!text.empty()) {
    ++line_no;
    const std::size_t nl = text.find('\n');
    std::string_view raw = text.substr(0, nl);
    text = (nl == std::string_view::npos) ? std::string_view{} : text.substr(nl + 1);
    if (!raw.empty() && raw.back() == '\r') {
      raw.remove_suffix(1);
    }
    const std::string_view body = trim(raw);
    if (body.empty() || body.front() == '#') {
      continue;
    }
    LineParser p(body, line_no, source);
    if (body.front() == '[') {
      p.fail("tables are not supported; use flat keys");
    }
    const std::string key = p.parse_key();
    if (!seen.insert(key).second) {
      p.fail("duplicate key '" + key + "'", key);
    }
    const Value v = p.parse_value(key);

    auto number = [&]() {
      if (v.kind != Value::Kind::Number) {
        p.fail("'" + key + "' expects a number", key);
      }
      return v.number;
    };
    auto integer = [&]() {
      const double d = number();
      if (d != std::floor(d) || std::abs(d) > 1e9) {
        p.fail("'" + key + "' expects an integer", key);
      }
      return static_cast<int>(d);
    };
    auto string = [&]() {
      if (v.kind != Value::Kind::String) {
        p.fail("'" + key + "' expects a quoted string", key);
      }
      return v.text;
    };

    const std::map<std::string, std::function<void()>> setters{
        {"omega_c", [&] { spec.engine.omega_c = number(); }},
        {"omega_h", [&] { spec.engine.omega_h = number(); }},
        {"T_c", [&] { spec.engine.T_c = number(); }},
        {"T_h", [&] { spec.engine.T_h = number(); }},
        {"gamma_h", [&] { spec.engine.gamma_h = number(); }},
        {"gamma_c", [&] { spec.engine.gamma_c = number(); }},
        {"dim", [&] { spec.engine.dim = integer(); }},
        {"steps", [&] { spec.engine.propagation.min_steps = integer(); }},
        {"tau_adi_min", [&] { spec.tau_adi.min = number(); }},
        {"tau_adi_max", [&] { spec.tau_adi.max = number(); }},
        {"tau_adi_count", [&] { spec.tau_adi.count = integer(); }},
        {"tau_iso_min", [&] { spec.tau_iso.min = number(); }},
        {"tau_iso_max", [&] { spec.tau_iso.max = number(); }},
        {"tau_iso_count", [&] { spec.tau_iso.count = integer(); }},
        {"fidelity_tol", [&] { spec.fidelity_tol = number(); }},
        {"max_cycles", [&] { spec.max_cycles = integer(); }},
        {"workers", [&] { spec.workers = integer(); }},
        {"output_dir", [&] { spec.output_dir = string(); }},
        {"mode",
         [&] {
           try {
             spec.mode = parse_mode(string());
           } catch (const InvalidArgument& e) {
             p.fail(e.what(), key);
           }
         }},
        {"variant",
         [&] {
           std::vector<std::string> names;
           if (v.kind == Value::Kind::String) {
             names.push_back(v.text);
           } else if (v.kind == Value::Kind::Array) {
             names = v.items;
           } else {
             p.fail("'variant' expects a string or an array of strings", key);
           }
           spec.variants.clear();
           for (const auto& n : names) {
             try {
               const Variant parsed = parse_variant(n);
               if (std::find(spec.variants.begin(), spec.variants.end(), parsed) ==
                   spec.variants.end()) {
                 spec.variants.push_back(parsed);
               }
             } catch (const InvalidArgument& e) {
               p.fail(e.what(), key);
             }
           }
         }},
    };
    const auto it = setters.find(key);
    if (it == setters.end()) {
      p.fail("unknown key '" + key + "'", key);
    }
    it->second();
  }
  spec.validate();
  return spec;
}

RunSpec load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ConfigError("cannot open config file " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.string());
}

std::string format_number(double value) {
  if (std::isnan(value)) {
    return "nan";
  }
  if (std::isinf(value)) {
    return value > 0 ? "inf" : "-inf";
  }
  if (value == 0.0) {
    return "0";
  }
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 12);
  return std::string(buf, res.ptr);
}

}  // namespace otto

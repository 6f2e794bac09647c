#pragma once

#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "qwi/closed_form.hpp"
#include "qwi/errors.hpp"
#include "qwi/potential.hpp"

namespace qwi::io {

// Unreadable or malformed configuration; the message starts with "<source>:<line>:".
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct LoadedConfig {
  PiecewiseConstantPotential potential;
  std::optional<DoubleStructure> double_structure;
};

namespace detail {

inline std::size_t line_of_offset(std::string_view text, std::size_t offset) {
  offset = std::min(offset, text.size());
  std::size_t line = 1;
  for (std::size_t i = 0; i < offset; ++i) line += text[i] == '\n';
  return line;
}

inline std::size_t line_of_key(std::string_view text, std::string_view key) {
  const std::string quoted = "\"" + std::string(key) + "\"";
  const auto pos = text.find(quoted);
  return pos == std::string_view::npos ? 1 : line_of_offset(text, pos);
}

struct Context {
  std::string_view text;
  std::string_view source;

  [[noreturn]] void fail(std::string_view key, const std::string& what) const {
    std::ostringstream msg;
    msg << source << ":" << line_of_key(text, key) << ": key '" << key << "': " << what;
    throw ConfigError(msg.str());
  }

  double number(const nlohmann::json& doc, std::string_view key) const {
    const auto it = doc.find(std::string(key));
    if (it == doc.end()) fail(key, "missing");
    if (!it->is_number()) fail(key, "expected a number");
    return it->get<double>();
  }

  std::vector<double> numbers(const nlohmann::json& doc, std::string_view key) const {
    const auto it = doc.find(std::string(key));
    if (it == doc.end()) fail(key, "missing");
    if (!it->is_array()) fail(key, "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < it->size(); ++i) {
      if (!(*it)[i].is_number()) fail(key, "element " + std::to_string(i) + " is not a number");
      out.push_back((*it)[i].get<double>());
    }
    return out;
  }
};

}  // namespace detail

// Either {"boundaries": [...], "levels": [...], "mass": m} or the double-structure form
// {"a_nm": a, "b_nm": b, "U_b_eV": U, "mass": m}.
inline LoadedConfig parse_config(std::string_view text, std::string_view source = "<config>") {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    std::ostringstream msg;
    msg << source << ":" << detail::line_of_offset(text, e.byte == 0 ? 0 : e.byte - 1)
        << ": " << e.what();
    throw ConfigError(msg.str());
  }
  const detail::Context ctx{text, source};
  if (!doc.is_object()) {
    throw ConfigError(std::string(source) + ":1: top level must be an object");
  }
  if (doc.contains("boundaries")) {
    auto boundaries = ctx.numbers(doc, "boundaries");
    auto levels = ctx.numbers(doc, "levels");
    const double mass = ctx.number(doc, "mass");
    try {
      return {build_potential(std::move(boundaries), std::move(levels), mass), std::nullopt};
    } catch (const ValidationError& e) {
      const std::string what = e.what();
      const char* key = what.find("level") != std::string::npos ? "levels"
                        : what.find("mass") != std::string::npos ? "mass"
                                                                  : "boundaries";
      ctx.fail(key, what);
    }
  }
  if (doc.contains("a_nm")) {
    const double a = ctx.number(doc, "a_nm");
    const double b = ctx.number(doc, "b_nm");
    const double ub = ctx.number(doc, "U_b_eV");
    const double mass = ctx.number(doc, "mass");
    try {
      const auto s = make_double_structure(a, b, ub, mass);
      return {to_potential(s), s};
    } catch (const ValidationError& e) {
      const std::string what = e.what();
      const char* key = what.find("a must") != std::string::npos   ? "a_nm"
                        : what.find("b must") != std::string::npos ? "b_nm"
                        : what.find("mass") != std::string::npos   ? "mass"
                                                                   : "U_b_eV";
      ctx.fail(key, what);
    }
  }
  throw ConfigError(std::string(source) +
                    ":1: expected keys 'boundaries'/'levels'/'mass' or 'a_nm'/'b_nm'/'U_b_eV'/'mass'");
}

inline LoadedConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path + ":0: cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path);
}

// CSV with 17 significant digits, '.' decimal separator and '\n' line endings.
class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}

  using Cell = std::variant<double, long long, std::string>;

  void row(std::initializer_list<Cell> cells) {
    bool first = true;
    for (const auto& c : cells) {
      if (!first) out_ << ',';
      first = false;
      std::visit([this](const auto& v) { write(v); }, c);
    }
    out_ << '\n';
  }

 private:
  void write(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out_ << buf;
  }
  void write(long long v) { out_ << v; }
  void write(const std::string& v) { out_ << v; }

  std::ostream& out_;
};

}  // namespace qwi::io

#pragma once

// Argument plumbing for the command-line front end: angle parsing and the
// translation of JSON run manifests into ordinary command-line tokens.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <regex>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "io.hpp"
#include "model.hpp"

namespace dssh {

/// Radians from "pi/3", "2pi/3", "-pi", "0.25*pi", "3*pi/4" or a plain decimal.
inline double parse_angle(const std::string& text) {
  static const std::regex symbolic(R"(^\s*([+-]?(?:\d+\.?\d*|\.\d+)?(?:[eE][+-]?\d+)?|[+-])\s*\*?\s*pi\s*(?:/\s*(\d+\.?\d*|\.\d+))?\s*$)",
                                   std::regex::icase);
  std::smatch m;
  if (std::regex_match(text, m, symbolic)) {
    const std::string coeff = m[1].str();
    double a = 1.0;
    if (coeff == "-")
      a = -1.0;
    else if (!coeff.empty() && coeff != "+")
      a = std::stod(coeff);
    double den = 1.0;
    if (m[2].matched) den = std::stod(m[2].str());
    if (den == 0.0) throw std::invalid_argument("angle '" + text + "' divides by zero");
    return a * pi / den;
  }
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("cannot parse angle '" + text + "'");
  }
  while (used < text.size() && std::isspace(static_cast<unsigned char>(text[used]))) ++used;
  if (used != text.size() || !std::isfinite(v)) throw std::invalid_argument("cannot parse angle '" + text + "'");
  return v;
}

/// A manifest flattened into flag tokens, e.g. {"n": 64} -> "--n", "64".
struct ManifestArgs {
  std::string command;
  std::vector<std::string> tokens;
};

inline std::string manifest_value(const nlohmann::json& v, const std::string& key) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number_unsigned()) return std::to_string(v.get<unsigned long long>());
  if (v.is_number_float()) return format_double(v.get<double>());
  throw std::invalid_argument("manifest key '" + key + "' must be a string or a number");
}

inline void append_flags(const nlohmann::json& obj, const std::string& where, std::vector<std::string>& out) {
  if (!obj.is_object()) throw std::invalid_argument("manifest section '" + where + "' must be an object");
  for (const auto& [key, v] : obj.items()) {
    if (v.is_null()) continue;
    if (v.is_boolean()) {
      if (v.get<bool>()) out.push_back("--" + key);
      continue;
    }
    out.push_back("--" + key);
    out.push_back(manifest_value(v, key));
  }
}

/// Manifest layout:
///   {"command": "spectrum", "config": {...ModelConfig keys...},
///    "sweep": {"gamma-min": 0, ...}, "options": {...}, "seed": 1,
///    "output_path": "fig2.csv", "format": "csv"}
/// Every section is optional; keys are the long flag names without dashes.
inline ManifestArgs manifest_args(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("manifest must be a JSON object");
  ManifestArgs m;
  static const std::vector<std::string> known{"command", "config", "sweep", "options", "seed",
                                              "output_path", "output", "format", "description"};
  for (const auto& [key, v] : j.items())
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw std::invalid_argument("unknown manifest key '" + key + "'");
  if (j.contains("command")) m.command = j.at("command").get<std::string>();
  for (const char* section : {"config", "sweep", "options"})
    if (j.contains(section)) append_flags(j.at(section), section, m.tokens);
  if (j.contains("seed")) {
    m.tokens.push_back("--seed");
    m.tokens.push_back(manifest_value(j.at("seed"), "seed"));
  }
  for (const char* key : {"output_path", "output"})
    if (j.contains(key)) {
      m.tokens.push_back("--output");
      m.tokens.push_back(j.at(key).get<std::string>());
    }
  if (j.contains("format")) {
    const std::string f = j.at("format").get<std::string>();
    parse_format(f);
    m.tokens.push_back("--format");
    m.tokens.push_back(f);
  }
  return m;
}

inline ManifestArgs load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open manifest " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("malformed manifest " + path + ": " + e.what());
  }
  return manifest_args(j);
}

}  // namespace dssh

// SPDX-License-Identifier: Apache-2.0
//
// slp: symbol-level precoding simulator for multiuser MISO downlink
// Copyright (C) 2026 The slp authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "slp/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <vector>

namespace slp {

namespace pt = boost::property_tree;

ConfigError::ConfigError(std::string field, int line, const std::string& what)
    : InvalidInput((line > 0 ? "line " + std::to_string(line) + ": " : std::string()) + field + ": " + what),
      field_(std::move(field)),
      line_(line) {}

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// Line of `key` inside `section` ("" for the top level), for diagnostics.
int locate(std::string_view text, const std::string& section, const std::string& key) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::string current;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    const std::string t = trim(line);
    if (t.empty() || t[0] == ';' || t[0] == '#') continue;
    if (t.front() == '[' && t.back() == ']') {
      current = trim(std::string_view(t).substr(1, t.size() - 2));
      continue;
    }
    const auto eq = t.find('=');
    if (eq != std::string::npos && current == section && trim(std::string_view(t).substr(0, eq)) == key) return n;
  }
  return 0;
}

int locate_section(std::string_view text, const std::string& section) {
  std::istringstream in{std::string(text)};
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    const std::string t = trim(line);
    if (t.size() >= 2 && t.front() == '[' && t.back() == ']' &&
        trim(std::string_view(t).substr(1, t.size() - 2)) == section) {
      return n;
    }
  }
  return 0;
}

// "SlpHeuristic", "slp_heuristic" and "slp-heuristic" all map to "slpheuristic".
std::string normalize_name(std::string_view s) {
  std::string out;
  for (char ch : s) {
    if (ch == '_' || ch == '-' || std::isspace(static_cast<unsigned char>(ch))) continue;
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
  }
  return out;
}

struct Reader {
  std::string_view text;
  const pt::ptree& tree;
  std::string section;

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    const std::string field = section.empty() ? key : section + "." + key;
    throw ConfigError(field, locate(text, section, key), what);
  }

  template <class T>
  T number(const std::string& key, const std::string& raw) const {
    T value{};
    const std::string s = trim(raw);
    const char* first = s.data();
    const char* last = s.data() + s.size();
    if constexpr (std::is_floating_point_v<T>) {
      // from_chars for double is incomplete on older toolchains
      char* end = nullptr;
      value = std::strtod(first, &end);
      if (s.empty() || end != last) fail(key, "expected a number, got '" + s + "'");
    } else {
      const auto [ptr, ec] = std::from_chars(first, last, value);
      if (s.empty() || ec != std::errc() || ptr != last) fail(key, "expected an integer, got '" + s + "'");
    }
    return value;
  }

  template <class T>
  void get(const std::string& key, T& dst) const {
    if (auto v = tree.get_optional<std::string>(pt::ptree::path_type(key, '\0'))) dst = number<T>(key, *v);
  }

  void get_list(const std::string& key, std::vector<double>& dst) const {
    if (auto v = tree.get_optional<std::string>(pt::ptree::path_type(key, '\0'))) {
      dst.clear();
      for (const auto& item : split_list(*v)) dst.push_back(number<double>(key, item));
      if (dst.empty()) fail(key, "empty list");
    }
  }
};

void reject_unknown(std::string_view text, const pt::ptree& tree, const std::string& section,
                    const std::set<std::string>& known) {
  for (const auto& [key, child] : tree) {
    if (!child.empty()) continue;  // a section, checked separately
    if (!known.count(key)) {
      const std::string field = section.empty() ? key : section + "." + key;
      throw ConfigError(field, locate(text, section, key), "unknown key");
    }
  }
}

std::string strip_hash_comments(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::ostringstream out;
  std::string line;
  while (std::getline(in, line)) {
    const std::string t = trim(line);
    out << (!t.empty() && t[0] == '#' ? std::string() : line) << '\n';
  }
  return out.str();
}

}  // namespace

RunSettings parse_config(std::string_view text) {
  pt::ptree tree;
  {
    std::istringstream in(strip_hash_comments(text));
    try {
      pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
      throw ConfigError("<syntax>", static_cast<int>(e.line()), e.message());
    }
  }

  RunSettings out;
  SimConfig& c = out.sim;
  const Reader top{text, tree, ""};
  reject_unknown(text, tree, "",
                 {"seed", "n_antennas", "n_users", "block_len", "qam_level", "noise_var", "eps_grid", "n_channels",
                  "sep_trials", "failure_budget", "schemes"});
  top.get("seed", c.seed);
  top.get("n_antennas", c.n_antennas);
  top.get("n_users", c.n_users);
  top.get("block_len", c.block_len);
  top.get("qam_level", c.qam_level);
  top.get("noise_var", c.noise_var);
  top.get_list("eps_grid", c.eps_grid);
  top.get("n_channels", c.n_channels);
  top.get("sep_trials", c.sep_trials);
  top.get("failure_budget", out.failure_budget);
  if (out.failure_budget < 0) top.fail("failure_budget", "must be >= 0");

  std::vector<double> zetas{1.0};
  for (const auto& [name, child] : tree) {
    if (child.empty()) continue;
    const Reader sec{text, child, name};
    if (name == "block_solver") {
      reject_unknown(text, child, name, {"max_iter"});
      sec.get("max_iter", c.block_max_iter);
      continue;
    }
    if (name != "slp_heuristic") {
      throw ConfigError(name, locate_section(text, name), "unknown section [" + name + "]");
    }
    reject_unknown(text, child, name, {"zeta"});
    sec.get_list("zeta", zetas);
    for (double z : zetas) {
      if (!(z >= 1.0)) sec.fail("zeta", "must be >= 1");
    }
  }

  if (auto v = tree.get_optional<std::string>("schemes")) {
    c.schemes.clear();
    for (const auto& item : split_list(*v)) {
      std::string name = normalize_name(item);
      std::vector<double> own_zetas = zetas;
      if (const auto open = name.find('('); open != std::string::npos) {
        if (name.back() != ')' || name.substr(0, open) != "slpheuristic") {
          top.fail("schemes", "malformed scheme '" + item + "'");
        }
        own_zetas = {top.number<double>("schemes", name.substr(open + 1, name.size() - open - 2))};
        if (!(own_zetas[0] >= 1.0)) top.fail("schemes", "zeta must be >= 1");
        name = "slpheuristic";
      }
      if (name == "zf") {
        c.schemes.push_back({SchemeKind::ZF, 1.0});
      } else if (name == "linearbf") {
        c.schemes.push_back({SchemeKind::LinearBF, 1.0});
      } else if (name == "slpheuristic") {
        for (double z : own_zetas) c.schemes.push_back({SchemeKind::SlpHeuristic, z});
      } else if (name == "slpblockavg") {
        c.schemes.push_back({SchemeKind::SlpBlockAvg, 1.0});
      } else if (name == "slpblockpeak") {
        c.schemes.push_back({SchemeKind::SlpBlockPeak, 1.0});
      } else {
        top.fail("schemes", "unknown scheme '" + item + "'");
      }
    }
  } else {
    std::vector<Scheme> expanded;
    for (const auto& s : c.schemes) {
      if (s.kind != SchemeKind::SlpHeuristic) {
        expanded.push_back(s);
        continue;
      }
      for (double z : zetas) expanded.push_back({SchemeKind::SlpHeuristic, z});
    }
    c.schemes = expanded;
  }

  try {
    c.validate();
  } catch (const std::exception& e) {
    const std::string what = e.what();
    const auto colon = what.find(':');
    const std::string field = colon == std::string::npos ? "<config>" : what.substr(0, colon);
    const auto dot = field.find('.');
    const std::string section = dot == std::string::npos ? "" : field.substr(0, dot);
    const std::string key = dot == std::string::npos ? field : field.substr(dot + 1);
    throw ConfigError(field, locate(text, section, key),
                      colon == std::string::npos ? what : trim(std::string_view(what).substr(colon + 1)));
  }
  return out;
}

RunSettings load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("<file>", 0, "cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string render_config(const RunSettings& s) {
  const SimConfig& c = s.sim;
  auto num = [](double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  std::ostringstream out;
  out << "seed = " << c.seed << '\n'
      << "n_antennas = " << c.n_antennas << '\n'
      << "n_users = " << c.n_users << '\n'
      << "block_len = " << c.block_len << '\n'
      << "qam_level = " << c.qam_level << '\n'
      << "noise_var = " << num(c.noise_var) << '\n'
      << "eps_grid = ";
  for (std::size_t i = 0; i < c.eps_grid.size(); ++i) out << (i ? ", " : "") << num(c.eps_grid[i]);
  out << "\nn_channels = " << c.n_channels << '\n'
      << "sep_trials = " << c.sep_trials << '\n'
      << "failure_budget = " << s.failure_budget << '\n'
      << "schemes = ";
  std::vector<double> zetas;
  bool heuristic_listed = false;
  bool first = true;
  for (const auto& sc : c.schemes) {
    const char* name = nullptr;
    switch (sc.kind) {
      case SchemeKind::ZF:
        name = "zf";
        break;
      case SchemeKind::LinearBF:
        name = "linear_bf";
        break;
      case SchemeKind::SlpHeuristic:
        zetas.push_back(sc.zeta);
        if (heuristic_listed) continue;
        heuristic_listed = true;
        name = "slp_heuristic";
        break;
      case SchemeKind::SlpBlockAvg:
        name = "slp_block_avg";
        break;
      case SchemeKind::SlpBlockPeak:
        name = "slp_block_peak";
        break;
    }
    out << (first ? "" : ", ") << name;
    first = false;
  }
  out << '\n';
  if (!zetas.empty()) {
    out << "\n[slp_heuristic]\nzeta = ";
    for (std::size_t i = 0; i < zetas.size(); ++i) out << (i ? ", " : "") << num(zetas[i]);
    out << '\n';
  }
  if (c.block_max_iter > 0) out << "\n[block_solver]\nmax_iter = " << c.block_max_iter << '\n';
  return out.str();
}

}  // namespace slp

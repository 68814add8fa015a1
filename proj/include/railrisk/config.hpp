#pragma once

/// Structured text configuration files: `[section]` headers followed by
/// `key = value` lines. '#' starts a comment. List values are comma
/// separated. This is the format of the bundled scenario, model-parameter
/// and consequence-preset files.

#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "railrisk/csv.hpp"
#include "railrisk/error.hpp"

namespace railrisk {

class ConfigFile {
 public:
  using Section = std::map<std::string, std::string>;

  static ConfigFile load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");
    ConfigFile cfg;
    cfg.path_ = path;
    std::string line, section;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      std::string t = csv::trim(line);
      if (t.empty() || t[0] == '#') continue;
      if (t.front() == '[') {
        if (t.back() != ']') {
          throw ParseError(path + ":" + std::to_string(line_no) +
                           ": unterminated section header");
        }
        section = csv::trim(t.substr(1, t.size() - 2));
        cfg.sections_[section];  // record even if empty
        continue;
      }
      auto eq = t.find('=');
      if (eq == std::string::npos) {
        throw ParseError(path + ":" + std::to_string(line_no) +
                         ": expected 'key = value'");
      }
      std::string key = csv::trim(t.substr(0, eq));
      std::string value = csv::trim(t.substr(eq + 1));
      if (key.empty()) {
        throw ParseError(path + ":" + std::to_string(line_no) + ": empty key");
      }
      cfg.sections_[section][key] = value;
    }
    return cfg;
  }

  bool has_section(const std::string& s) const { return sections_.count(s) > 0; }

  bool has(const std::string& s, const std::string& k) const {
    auto it = sections_.find(s);
    return it != sections_.end() && it->second.count(k) > 0;
  }

  const std::string& get(const std::string& s, const std::string& k) const {
    auto it = sections_.find(s);
    if (it == sections_.end()) throw ParseError(path_ + ": missing section [" + s + "]");
    auto jt = it->second.find(k);
    if (jt == it->second.end()) {
      throw ParseError(path_ + ": missing key '" + k + "' in [" + s + "]");
    }
    return jt->second;
  }

  std::string get_or(const std::string& s, const std::string& k,
                     const std::string& dflt) const {
    return has(s, k) ? get(s, k) : dflt;
  }

  double get_double(const std::string& s, const std::string& k) const {
    return csv::parse_double(get(s, k), path_ + " [" + s + "] " + k);
  }

  double get_double_or(const std::string& s, const std::string& k, double dflt) const {
    return has(s, k) ? get_double(s, k) : dflt;
  }

  long get_long(const std::string& s, const std::string& k) const {
    return csv::parse_long(get(s, k), path_ + " [" + s + "] " + k);
  }

  long get_long_or(const std::string& s, const std::string& k, long dflt) const {
    return has(s, k) ? get_long(s, k) : dflt;
  }

  std::vector<std::string> get_list(const std::string& s, const std::string& k) const {
    return csv::split(get(s, k), ',');
  }

  /// Section names in deterministic (lexicographic) order.
  std::vector<std::string> section_names() const {
    std::vector<std::string> out;
    for (const auto& [name, _] : sections_) out.push_back(name);
    return out;
  }

  const Section& section(const std::string& s) const {
    auto it = sections_.find(s);
    if (it == sections_.end()) throw ParseError(path_ + ": missing section [" + s + "]");
    return it->second;
  }

  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::map<std::string, Section> sections_;
};

}  // namespace railrisk

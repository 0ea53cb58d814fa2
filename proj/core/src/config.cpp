#include "auvsim/config.hpp"

#include "auvsim/error.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace auvsim {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool valid_name(std::string_view s) {
  if (s.empty()) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '-';
  });
}

std::string_view strip_comment(std::string_view line) {
  // A comment starts at '#' or ';' at line start or after whitespace.
  for (std::size_t i = 0; i < line.size(); ++i) {
    if ((line[i] == '#' || line[i] == ';') &&
        (i == 0 || std::isspace(static_cast<unsigned char>(line[i - 1])))) {
      return line.substr(0, i);
    }
  }
  return line;
}

double parse_double(std::string_view text, const std::string& key, int line,
                    const std::string& source) {
  text = trim(text);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ConfigError("'" + key + "': expected a number, got '" + std::string(text) + "'", line, source);
  }
  return v;
}

}  // namespace

const ConfigSection::Entry& ConfigSection::entry(const std::string& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) {
    throw ConfigError("missing required key '" + key + "' in [" + name_ + "]", line_, source_);
  }
  it->second.used = true;
  return it->second;
}

std::string ConfigSection::get_string(const std::string& key) const { return entry(key).value; }

std::string ConfigSection::get_string(const std::string& key, const std::string& fallback) const {
  return has(key) ? get_string(key) : fallback;
}

double ConfigSection::get_double(const std::string& key) const {
  const auto& e = entry(key);
  return parse_double(e.value, key, e.line, source_);
}

double ConfigSection::get_double(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

long long ConfigSection::get_int(const std::string& key) const {
  const auto& e = entry(key);
  std::string_view text = trim(e.value);
  long long v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ConfigError("'" + key + "': expected an integer, got '" + e.value + "'", e.line, source_);
  }
  return v;
}

long long ConfigSection::get_int(const std::string& key, long long fallback) const {
  return has(key) ? get_int(key) : fallback;
}

bool ConfigSection::get_bool(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const auto& e = entry(key);
  std::string v(trim(e.value));
  std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
  if (v == "true" || v == "yes" || v == "on" || v == "1") return true;
  if (v == "false" || v == "no" || v == "off" || v == "0") return false;
  throw ConfigError("'" + key + "': expected true/false, got '" + e.value + "'", e.line, source_);
}

std::vector<double> ConfigSection::get_doubles(const std::string& key) const {
  const auto& e = entry(key);
  std::vector<double> out;
  std::string_view rest = e.value;
  while (true) {
    auto comma = rest.find(',');
    auto item = trim(rest.substr(0, comma));
    if (!item.empty()) out.push_back(parse_double(item, key, e.line, source_));
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  return out;
}

Vec3 ConfigSection::get_vec3(const std::string& key) const {
  auto v = get_doubles(key);
  if (v.size() != 3) {
    throw ConfigError("'" + key + "': expected 3 comma-separated numbers", line_of(key), source_);
  }
  return {v[0], v[1], v[2]};
}

Vec3 ConfigSection::get_vec3(const std::string& key, const Vec3& fallback) const {
  return has(key) ? get_vec3(key) : fallback;
}

int ConfigSection::line_of(const std::string& key) const {
  auto it = entries_.find(key);
  return it == entries_.end() ? line_ : it->second.line;
}

void ConfigSection::set(const std::string& key, std::string value, int line) {
  auto& e = entries_[key];
  e.value = std::move(value);
  e.line = line;
}

ConfigDocument ConfigDocument::parse(std::string_view text, std::string source) {
  ConfigDocument doc;
  doc.source_ = std::move(source);
  ConfigSection* current = nullptr;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    auto raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;

    auto line = trim(strip_comment(raw));
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("unterminated section header", line_no, doc.source_);
      std::string name(trim(line.substr(1, line.size() - 2)));
      if (!valid_name(name)) throw ConfigError("invalid section name '" + name + "'", line_no, doc.source_);
      if (doc.sections_.count(name)) throw ConfigError("duplicate section [" + name + "]", line_no, doc.source_);
      doc.sections_.emplace(name, ConfigSection(name, line_no, doc.source_));
      doc.order_.push_back(name);
      current = &doc.sections_.at(name);
      continue;
    }

    auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError("expected 'key = value'", line_no, doc.source_);
    std::string key(trim(line.substr(0, eq)));
    std::string value(trim(line.substr(eq + 1)));
    if (!valid_name(key)) throw ConfigError("invalid key '" + key + "'", line_no, doc.source_);
    if (!current) throw ConfigError("key '" + key + "' outside of any [section]", line_no, doc.source_);
    if (current->has(key)) {
      throw ConfigError("duplicate key '" + key + "' in [" + current->name() + "]", line_no, doc.source_);
    }
    current->set(key, std::move(value), line_no);
  }
  return doc;
}

ConfigDocument ConfigDocument::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path.string());
}

const ConfigSection& ConfigDocument::section(const std::string& name) const {
  auto it = sections_.find(name);
  if (it == sections_.end()) throw ConfigError("missing required section [" + name + "]");
  it->second.used_ = true;
  return it->second;
}

const ConfigSection& ConfigDocument::section_or_empty(const std::string& name) const {
  static const ConfigSection empty;
  auto it = sections_.find(name);
  if (it == sections_.end()) return empty;
  it->second.used_ = true;
  return it->second;
}

std::vector<std::string> ConfigDocument::children(const std::string& prefix) const {
  std::vector<std::string> out;
  const std::string head = prefix + ".";
  for (const auto& name : order_) {
    if (name.rfind(head, 0) == 0 && name.find('.', head.size()) == std::string::npos) {
      out.push_back(name);
    }
  }
  return out;
}

void ConfigDocument::apply_override(std::string_view assignment) {
  auto eq = assignment.find('=');
  if (eq == std::string_view::npos) {
    throw ConfigError("override '" + std::string(assignment) + "' is not section.key=value");
  }
  std::string path(trim(assignment.substr(0, eq)));
  std::string value(trim(assignment.substr(eq + 1)));
  auto dot = path.rfind('.');
  if (dot == std::string::npos || dot == 0 || dot + 1 == path.size()) {
    throw ConfigError("override key '" + path + "' must be section.key");
  }
  std::string sec = path.substr(0, dot);
  std::string key = path.substr(dot + 1);
  auto it = sections_.find(sec);
  if (it == sections_.end()) {
    it = sections_.emplace(sec, ConfigSection(sec, 0, "override")).first;
    order_.push_back(sec);
  }
  it->second.set(key, std::move(value), 0);
}

void ConfigDocument::reject_unused() const {
  for (const auto& name : order_) {
    const auto& sec = sections_.at(name);
    if (!sec.used_) {
      throw ConfigError("unknown section [" + name + "]", sec.line(), source_);
    }
    for (const auto& [key, e] : sec.entries()) {
      if (!e.used) {
        throw ConfigError("unknown key '" + key + "' in [" + name + "]", e.line, source_);
      }
    }
  }
}

std::string ConfigDocument::dump() const {
  std::ostringstream out;
  for (const auto& name : order_) {
    out << "[" << name << "]\n";
    for (const auto& [key, e] : sections_.at(name).entries()) out << key << " = " << e.value << "\n";
  }
  return out.str();
}

}  // namespace auvsim

#pragma once

#include "auvsim/types.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace auvsim {

/// One `[section]` of a config file. Every read marks the key as consumed so
/// the document can reject keys nobody asked for.
class ConfigSection {
 public:
  struct Entry {
    std::string value;
    int line = 0;
    mutable bool used = false;
  };

  ConfigSection() = default;
  ConfigSection(std::string name, int line, std::string source = {})
      : name_(std::move(name)), source_(std::move(source)), line_(line) {}

  const std::string& name() const { return name_; }
  const std::string& source() const { return source_; }
  int line() const { return line_; }
  bool has(const std::string& key) const { return entries_.count(key) != 0; }

  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  long long get_int(const std::string& key) const;
  long long get_int(const std::string& key, long long fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  Vec3 get_vec3(const std::string& key) const;
  Vec3 get_vec3(const std::string& key, const Vec3& fallback) const;
  std::vector<double> get_doubles(const std::string& key) const;

  /// Line of `key`, or the section header line if absent.
  int line_of(const std::string& key) const;

  void set(const std::string& key, std::string value, int line);
  const std::map<std::string, Entry>& entries() const { return entries_; }

 private:
  const Entry& entry(const std::string& key) const;

  std::string name_;
  std::string source_;
  int line_ = 0;
  mutable bool used_ = false;
  std::map<std::string, Entry> entries_;

  friend class ConfigDocument;
};

/// Parsed `key = value` document with `[dotted.section]` headers.
class ConfigDocument {
 public:
  static ConfigDocument parse(std::string_view text, std::string source = "<string>");
  static ConfigDocument load(const std::filesystem::path& path);

  const std::string& source() const { return source_; }
  bool has_section(const std::string& name) const { return sections_.count(name) != 0; }
  const ConfigSection& section(const std::string& name) const;
  /// Returns an empty placeholder when the section does not exist.
  const ConfigSection& section_or_empty(const std::string& name) const;

  /// Names of sections whose name is `prefix.<child>` (one level only), in file order.
  std::vector<std::string> children(const std::string& prefix) const;

  /// Applies a `section.key=value` override; creates the section if needed.
  void apply_override(std::string_view assignment);

  /// Throws ConfigError naming the first key or section that nothing consumed.
  void reject_unused() const;

  /// Canonical `key = value` rendering of every section (for run summaries).
  std::string dump() const;

 private:
  std::string source_;
  std::map<std::string, ConfigSection> sections_;
  std::vector<std::string> order_;
};

}  // namespace auvsim

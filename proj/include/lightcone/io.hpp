// io.hpp
//
// Plain-text plumbing: key=value config files, RFC-4180 CSV, run manifests.

#pragma once

#include <filesystem>
#include <initializer_list>
#include <map>
#include <string>
#include <vector>

namespace lightcone {

/// Shortest round-trip decimal form of a double ("%.17g").
std::string format_double(double x);

/// Quotes a CSV field if it contains a comma, quote or line break.
std::string csv_escape(const std::string& field);

class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);

  void row(const std::vector<std::string>& fields);
  std::size_t columns() const { return columns_; }
  const std::string& str() const { return text_; }

 private:
  std::size_t columns_;
  std::string text_;
};

using KeyValues = std::map<std::string, std::string>;

/// Parses "key = value" lines; '#' starts a comment, blank lines are skipped.
KeyValues parse_key_values(const std::string& text);
KeyValues read_key_values(const std::filesystem::path& path);
std::string format_key_values(const KeyValues& kv);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

std::string build_id();
/// UTC timestamp, ISO 8601.
std::string utc_now();

struct RunManifest {
  std::string subcommand;
  KeyValues config;
  std::string build = build_id();
  std::string start = utc_now();
  std::string end;
  std::vector<std::string> outputs;
  std::string status = "running";

  std::string to_json() const;
  /// Writes manifest.json and run_config.txt into `dir`.
  void write(const std::filesystem::path& dir);
};

}  // namespace lightcone

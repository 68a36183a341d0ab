#pragma once

// Flat key=value run configuration.
//
//   # comment
//   B = 0:2:61          linspace lo:hi:count  -> sweep axis
//   theta = 0, pi/4     comma list            -> sweep axis
//   T = 0.2             scalar                -> fixed parameter
//
// Numbers accept a pi suffix or factor: pi, 0.5pi, 0.5*pi, pi/4. Axes are
// ordered by first appearance. Later assignments replace earlier ones, which
// is how command-line overrides apply on top of a file.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "compass/sweep.hpp"

namespace compass {

using ConfigEntries = std::vector<std::pair<std::string, std::string>>;

/// Throws ConfigError (key "line N") on malformed lines.
[[nodiscard]] ConfigEntries parse_config(std::istream& in);
[[nodiscard]] ConfigEntries parse_config_file(const std::filesystem::path& path);

/// "key=value" from the command line.
[[nodiscard]] std::pair<std::string, std::string> parse_assignment(const std::string& text);

/// Replaces an existing key in place or appends it.
void set_entry(ConfigEntries& entries, const std::string& key, const std::string& value);

[[nodiscard]] double parse_number(const std::string& text, const std::string& key);
/// Comma list or lo:hi:count.
[[nodiscard]] std::vector<double> parse_values(const std::string& text, const std::string& key);

/// Applies entries on top of `base`, then validates. Unknown keys throw
/// ConfigError naming the key.
[[nodiscard]] SweepSpec apply_config(SweepSpec base, const ConfigEntries& entries);

}  // namespace compass

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace radbound::config {

/// Sectioned key/value configuration text:
///
///   [section]
///   key = value        # trailing comments allowed
///
/// Parsing is strict: duplicate keys, keys outside a section, and malformed
/// lines are itemized errors. Consumers mark keys as read; unread keys are
/// rejected afterwards (unknown-key strictness).
class Config {
  public:
    static Config parse(const std::string& text);

    bool has(const std::string& section, const std::string& key) const;
    std::string get(const std::string& section, const std::string& key) const;
    std::string get_or(const std::string& section, const std::string& key,
                       const std::string& fallback) const;

    double number(const std::string& section, const std::string& key) const;
    double number_or(const std::string& section, const std::string& key,
                     double fallback) const;
    std::uint64_t integer(const std::string& section,
                          const std::string& key) const;
    std::uint64_t integer_or(const std::string& section, const std::string& key,
                             std::uint64_t fallback) const;

    /// Grid syntax: "log:lo:hi:k", "lin:lo:hi:k", or a comma list of numbers.
    std::vector<double> grid(const std::string& section,
                             const std::string& key) const;

    /// Keys requested but absent, or present but never requested.
    std::vector<std::string> unread_keys() const;

    /// FNV-1a over the sorted canonical "section.key=value" lines; stable
    /// under key reordering.
    std::string canonical_hash() const;

    const std::map<std::string, std::string>& entries() const { return values_; }

  private:
    std::map<std::string, std::string> values_;  // "section.key" -> value
    mutable std::map<std::string, bool> read_;
};

std::vector<double> parse_grid(const std::string& text);

/// Raised with the full itemized list of configuration problems.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::vector<std::string>& items);
    std::vector<std::string> items;
};

}  // namespace radbound::config

#include "radbound/config.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "radbound/bounds.hpp"

namespace radbound::config {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

std::string join(const std::vector<std::string>& items) {
    std::ostringstream os;
    os << "configuration errors:";
    for (const auto& item : items) os << "\n  - " << item;
    return os.str();
}

}  // namespace

ConfigError::ConfigError(const std::vector<std::string>& list)
    : std::runtime_error(join(list)), items(list) {}

Config Config::parse(const std::string& text) {
    Config cfg;
    std::vector<std::string> errors;
    std::istringstream in(text);
    std::string line, section;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                errors.push_back("line " + std::to_string(lineno) +
                                 ": unterminated section header");
                continue;
            }
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty())
                errors.push_back("line " + std::to_string(lineno) +
                                 ": empty section name");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            errors.push_back("line " + std::to_string(lineno) +
                             ": expected key = value");
            continue;
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (section.empty()) {
            errors.push_back("line " + std::to_string(lineno) +
                             ": key outside any [section]");
            continue;
        }
        if (key.empty()) {
            errors.push_back("line " + std::to_string(lineno) + ": empty key");
            continue;
        }
        const std::string path = section + "." + key;
        if (cfg.values_.count(path)) {
            errors.push_back("line " + std::to_string(lineno) +
                             ": duplicate key '" + path + "'");
            continue;
        }
        cfg.values_[path] = value;
    }
    if (!errors.empty()) throw ConfigError(errors);
    return cfg;
}

bool Config::has(const std::string& section, const std::string& key) const {
    return values_.count(section + "." + key) > 0;
}

std::string Config::get(const std::string& section, const std::string& key) const {
    const std::string path = section + "." + key;
    auto it = values_.find(path);
    if (it == values_.end())
        throw ConfigError({"missing required key '" + path + "'"});
    read_[path] = true;
    return it->second;
}

std::string Config::get_or(const std::string& section, const std::string& key,
                           const std::string& fallback) const {
    if (!has(section, key)) return fallback;
    return get(section, key);
}

double Config::number(const std::string& section, const std::string& key) const {
    const std::string raw = get(section, key);
    try {
        std::size_t used = 0;
        const double value = std::stod(raw, &used);
        if (used != raw.size()) throw std::invalid_argument(raw);
        return value;
    } catch (const std::exception&) {
        throw ConfigError({"key '" + section + "." + key +
                           "' is not a number: '" + raw + "'"});
    }
}

double Config::number_or(const std::string& section, const std::string& key,
                         double fallback) const {
    return has(section, key) ? number(section, key) : fallback;
}

std::uint64_t Config::integer(const std::string& section,
                              const std::string& key) const {
    const std::string raw = get(section, key);
    try {
        std::size_t used = 0;
        const unsigned long long value = std::stoull(raw, &used);
        if (used != raw.size()) throw std::invalid_argument(raw);
        return value;
    } catch (const std::exception&) {
        throw ConfigError({"key '" + section + "." + key +
                           "' is not an integer: '" + raw + "'"});
    }
}

std::uint64_t Config::integer_or(const std::string& section,
                                 const std::string& key,
                                 std::uint64_t fallback) const {
    return has(section, key) ? integer(section, key) : fallback;
}

std::vector<double> parse_grid(const std::string& text) {
    auto split = [](const std::string& s, char sep) {
        std::vector<std::string> parts;
        std::string part;
        std::istringstream in(s);
        while (std::getline(in, part, sep)) parts.push_back(trim(part));
        return parts;
    };
    if (text.rfind("log:", 0) == 0 || text.rfind("lin:", 0) == 0) {
        const auto parts = split(text, ':');
        if (parts.size() != 4)
            throw ConfigError({"grid '" + text + "': expected kind:lo:hi:k"});
        const double lo = std::stod(parts[1]);
        const double hi = std::stod(parts[2]);
        const std::size_t k = std::stoul(parts[3]);
        return parts[0] == "log" ? bounds::log_grid(lo, hi, k)
                                 : bounds::lin_grid(lo, hi, k);
    }
    std::vector<double> grid;
    for (const auto& part : split(text, ',')) {
        if (part.empty()) continue;
        grid.push_back(std::stod(part));
    }
    if (grid.empty()) throw ConfigError({"grid '" + text + "' is empty"});
    return grid;
}

std::vector<double> Config::grid(const std::string& section,
                                 const std::string& key) const {
    try {
        return parse_grid(get(section, key));
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception&) {
        throw ConfigError({"key '" + section + "." + key +
                           "' is not a valid grid"});
    }
}

std::vector<std::string> Config::unread_keys() const {
    std::vector<std::string> unread;
    for (const auto& [path, _] : values_)
        if (!read_.count(path)) unread.push_back(path);
    return unread;
}

std::string Config::canonical_hash() const {
    // Entries iterate in sorted order already (std::map).
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    auto mix = [&hash](const std::string& s) {
        for (unsigned char c : s) {
            hash ^= c;
            hash *= 0x100000001b3ULL;
        }
    };
    for (const auto& [path, value] : values_) {
        mix(path);
        mix("=");
        mix(value);
        mix("\n");
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(hash));
    return buf;
}

}  // namespace radbound::config

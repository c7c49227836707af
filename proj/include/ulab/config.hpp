#pragma once

#include <string>
#include <vector>

namespace ulab {

// Plain key = value configuration grouped into [sections].  Entry order is
// preserved so parse -> format -> parse is the identity.  '#' or ';' in the
// first column starts a comment line; comments and blank lines are dropped.
struct Config {
    struct Section {
        std::string name;  // "" for the leading unnamed section
        std::vector<std::pair<std::string, std::string>> entries;
        bool operator==(const Section&) const = default;
    };
    std::vector<Section> sections;
    bool operator==(const Config&) const = default;

    // First match in order; nullptr when absent.
    const std::string* find(const std::string& section, const std::string& key) const;
    std::string get(const std::string& section, const std::string& key,
                    const std::string& fallback) const;
    std::string require(const std::string& section, const std::string& key) const;
};

// Throws std::runtime_error naming the 1-based line and column on malformed
// input (missing '=', empty key, bad section header, duplicate key within a
// section).
Config parse_config(const std::string& text);
std::string format_config(const Config& c);
Config load_config(const std::string& path);

}  // namespace ulab

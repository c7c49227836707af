#include "ulab/config.hpp"

#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ulab {

namespace {

std::string trim(const std::string& s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace((unsigned char)s[b])) ++b;
    while (e > b && std::isspace((unsigned char)s[e - 1])) --e;
    return s.substr(b, e - b);
}

[[noreturn]] void fail(const char* why, size_t line, size_t col) {
    throw std::runtime_error("config: " + std::string(why) + " at line " + std::to_string(line) +
                             ", column " + std::to_string(col));
}

}  // namespace

const std::string* Config::find(const std::string& section, const std::string& key) const {
    for (const auto& s : sections) {
        if (s.name != section) continue;
        for (const auto& [k, v] : s.entries)
            if (k == key) return &v;
    }
    return nullptr;
}

std::string Config::get(const std::string& section, const std::string& key,
                        const std::string& fallback) const {
    const std::string* v = find(section, key);
    return v ? *v : fallback;
}

std::string Config::require(const std::string& section, const std::string& key) const {
    const std::string* v = find(section, key);
    if (!v)
        throw std::runtime_error("config: missing required key '" + key + "'" +
                                 (section.empty() ? "" : " in section [" + section + "]"));
    return *v;
}

Config parse_config(const std::string& text) {
    Config c;
    c.sections.push_back({"", {}});
    std::istringstream in(text);
    std::string raw;
    size_t lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        if (!raw.empty() && raw.back() == '\r') raw.pop_back();
        size_t first = raw.find_first_not_of(" \t");
        if (first == std::string::npos) continue;
        char lead = raw[first];
        if (lead == '#' || lead == ';') continue;
        if (lead == '[') {
            size_t close = raw.find(']', first);
            if (close == std::string::npos) fail("unterminated section header", lineno, first + 1);
            std::string name = trim(raw.substr(first + 1, close - first - 1));
            if (name.empty()) fail("empty section name", lineno, first + 2);
            if (!trim(raw.substr(close + 1)).empty())
                fail("trailing characters after section header", lineno, close + 2);
            c.sections.push_back({name, {}});
            continue;
        }
        size_t eq = raw.find('=');
        if (eq == std::string::npos) fail("expected 'key = value'", lineno, first + 1);
        std::string key = trim(raw.substr(0, eq));
        if (key.empty()) fail("empty key", lineno, first + 1);
        std::string val = trim(raw.substr(eq + 1));
        auto& sec = c.sections.back();
        for (const auto& [k, v] : sec.entries)
            if (k == key) fail("duplicate key in section", lineno, first + 1);
        sec.entries.emplace_back(std::move(key), std::move(val));
    }
    // a leading unnamed section with no entries vanishes on format; drop it
    // up front so round-trips are exact
    if (c.sections.size() > 1 && c.sections.front().entries.empty()) c.sections.erase(c.sections.begin());
    return c;
}

std::string format_config(const Config& c) {
    std::string out;
    for (size_t i = 0; i < c.sections.size(); ++i) {
        const auto& s = c.sections[i];
        if (!s.name.empty()) out += "[" + s.name + "]\n";
        for (const auto& [k, v] : s.entries) out += k + " = " + v + "\n";
    }
    return out;
}

Config load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("config: cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

}  // namespace ulab

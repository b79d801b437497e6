#include "boxgas/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "boxgas/common.hpp"

namespace boxgas {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

[[noreturn]] void bad(const std::string& what) { throw std::runtime_error("config: " + what); }

}  // namespace

Config Config::from_string(const std::string& text) {
    Config cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            bad("missing '=' on line " + std::to_string(lineno) + ": " + line);
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) bad("empty key on line " + std::to_string(lineno));
        if (cfg.values_.count(key)) bad("duplicate key '" + key + "'");
        cfg.values_[key] = value;
    }
    return cfg;
}

Config Config::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) bad("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_string(buf.str());
}

bool Config::has(const std::string& key) const {
    seen_.insert(key);
    return values_.count(key) != 0;
}

std::string Config::get(const std::string& key, const std::string& fallback) const {
    seen_.insert(key);
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

std::string Config::get_required(const std::string& key) const {
    seen_.insert(key);
    const auto it = values_.find(key);
    if (it == values_.end()) bad("missing required key '" + key + "'");
    return it->second;
}

double Config::get_num(const std::string& key, double fallback) const {
    seen_.insert(key);
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    const char* s = it->second.c_str();
    char* end = nullptr;
    const double v = std::strtod(s, &end);
    if (end == s || *end != '\0') bad("key '" + key + "' is not a number: " + it->second);
    return v;
}

long long Config::get_int(const std::string& key, long long fallback) const {
    seen_.insert(key);
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    const char* s = it->second.c_str();
    char* end = nullptr;
    const long long v = std::strtoll(s, &end, 10);
    if (end == s || *end != '\0') bad("key '" + key + "' is not an integer: " + it->second);
    return v;
}

bool Config::get_bool(const std::string& key, bool fallback) const {
    seen_.insert(key);
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    const std::string& v = it->second;
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    bad("key '" + key + "' is not a boolean: " + v);
}

std::vector<double> Config::get_list(const std::string& key,
                                     const std::vector<double>& fallback) const {
    seen_.insert(key);
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    std::vector<double> out;
    std::string item;
    std::istringstream in(it->second);
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        const char* s = item.c_str();
        char* end = nullptr;
        const double v = std::strtod(s, &end);
        if (end == s || *end != '\0') bad("key '" + key + "' has a bad list entry: " + item);
        out.push_back(v);
    }
    if (out.empty()) bad("key '" + key + "' is an empty list");
    return out;
}

void Config::set(const std::string& key, const std::string& value) {
    values_[key] = value;
}

void Config::set_num(const std::string& key, double value) { values_[key] = fmt17(value); }

std::string Config::dump() const {
    std::ostringstream out;
    for (const auto& [k, v] : values_) out << k << " = " << v << '\n';
    return out.str();
}

std::vector<std::string> Config::unknown_keys() const {
    std::vector<std::string> out;
    for (const auto& [k, v] : values_)
        if (!seen_.count(k)) out.push_back(k);
    return out;
}

}  // namespace boxgas

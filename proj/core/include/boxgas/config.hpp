#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

namespace boxgas {

// Flat key-value text with dotted section names: one `key = value` per line,
// '#' starts a comment, blank lines ignored. parse -> dump -> parse is the
// identity on the key-value map.
class Config {
  public:
    Config() = default;

    static Config from_string(const std::string& text);
    static Config load(const std::string& path);

    bool has(const std::string& key) const;
    std::string get(const std::string& key, const std::string& fallback) const;
    std::string get_required(const std::string& key) const;
    double get_num(const std::string& key, double fallback) const;
    long long get_int(const std::string& key, long long fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::vector<double> get_list(const std::string& key,
                                 const std::vector<double>& fallback) const;

    void set(const std::string& key, const std::string& value);
    void set_num(const std::string& key, double value);

    std::string dump() const;

    // Keys present in the file that no accessor ever touched. Typos surface
    // as validation failures instead of silently picking defaults.
    std::vector<std::string> unknown_keys() const;

    const std::map<std::string, std::string>& entries() const { return values_; }

  private:
    std::map<std::string, std::string> values_;
    mutable std::set<std::string> seen_;
};

}  // namespace boxgas

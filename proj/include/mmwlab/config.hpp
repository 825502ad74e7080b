// SPDX-License-Identifier: Apache-2.0
//
// mmwlab: indoor millimeter-wave network laboratory
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef MMWLAB_CONFIG_HPP
#define MMWLAB_CONFIG_HPP

// Flat dotted-key configuration:
//
//     # comment
//     arena.radius_m = 12
//     scenarios = Hallway/App, Office/Hand
//
// Values are kept as text and converted on access. Every conversion error
// names the key it came from.

#include <cctype>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "mmwlab/error.hpp"

namespace mmwlab::config {

namespace detail {

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

inline bool valid_key(const std::string& k) {
    if (k.empty() || k.front() == '.' || k.back() == '.') return false;
    for (char c : k)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '-')) return false;
    return true;
}

} // namespace detail

class FlatConfig {
public:
    /// Parses `key = value` lines. `source` prefixes error messages.
    static FlatConfig parse(std::istream& in, const std::string& source = "config") {
        FlatConfig c;
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const std::string t = detail::trim(line);
            if (t.empty() || t.front() == '#') continue;
            const auto eq = t.find('=');
            const std::string where = source + ":" + std::to_string(lineno);
            if (eq == std::string::npos) throw ConfigError("config", where + ": expected 'key = value'");
            const std::string key = detail::trim(std::string_view(t).substr(0, eq));
            const std::string value = detail::trim(std::string_view(t).substr(eq + 1));
            if (!detail::valid_key(key)) throw ConfigError("config", where + ": malformed key '" + key + "'");
            if (c.entries_.count(key)) throw ConfigError("config", where + ": key '" + key + "' given twice");
            c.entries_[key] = value;
        }
        return c;
    }

    static FlatConfig parse_string(const std::string& text, const std::string& source = "config") {
        std::istringstream in(text);
        return parse(in, source);
    }

    static FlatConfig load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("config", "cannot open '" + path + "'");
        return parse(in, path);
    }

    void set(const std::string& key, const std::string& value) {
        if (!detail::valid_key(key)) throw ConfigError("config", "malformed key '" + key + "'");
        entries_[key] = value;
    }

    bool contains(const std::string& key) const { return entries_.count(key) != 0; }
    const std::map<std::string, std::string>& entries() const { return entries_; }

    /// Entries of `other` replace ours.
    void merge(const FlatConfig& other) {
        for (const auto& [k, v] : other.entries_) entries_[k] = v;
    }

    const std::string& text(const std::string& key) const {
        auto it = entries_.find(key);
        if (it == entries_.end()) throw ConfigError("config", "missing key '" + key + "'");
        return it->second;
    }

    std::string get_string(const std::string& key) const { return text(key); }

    double get_double(const std::string& key) const { return to_double(key, text(key)); }

    long long get_int(const std::string& key) const { return to_int(key, text(key)); }

    std::uint64_t get_u64(const std::string& key) const {
        const std::string& v = text(key);
        std::uint64_t x = 0;
        const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
        if (ec != std::errc() || p != v.data() + v.size())
            throw ConfigError("config", "key '" + key + "': expected a non-negative integer, got '" + v + "'");
        return x;
    }

    bool get_bool(const std::string& key) const {
        const std::string& v = text(key);
        if (v == "true" || v == "1" || v == "yes") return true;
        if (v == "false" || v == "0" || v == "no") return false;
        throw ConfigError("config", "key '" + key + "': expected true or false, got '" + v + "'");
    }

    std::vector<std::string> get_list(const std::string& key) const {
        std::vector<std::string> out;
        std::stringstream ss(text(key));
        std::string item;
        while (std::getline(ss, item, ',')) {
            item = detail::trim(item);
            if (item.empty()) throw ConfigError("config", "key '" + key + "': empty list item");
            out.push_back(item);
        }
        if (out.empty()) throw ConfigError("config", "key '" + key + "': list is empty");
        return out;
    }

    std::vector<double> get_double_list(const std::string& key) const {
        std::vector<double> out;
        for (const auto& s : get_list(key)) out.push_back(to_double(key, s));
        return out;
    }

    std::vector<int> get_int_list(const std::string& key) const {
        std::vector<int> out;
        for (const auto& s : get_list(key)) out.push_back(static_cast<int>(to_int(key, s)));
        return out;
    }

    /// One `key = value` line per entry, keys sorted. parse() reads it back.
    void write(std::ostream& os) const {
        for (const auto& [k, v] : entries_) os << k << " = " << v << "\n";
    }

private:
    static double to_double(const std::string& key, const std::string& v) {
        double x = 0.0;
        const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
        if (ec != std::errc() || p != v.data() + v.size())
            throw ConfigError("config", "key '" + key + "': expected a number, got '" + v + "'");
        return x;
    }

    static long long to_int(const std::string& key, const std::string& v) {
        long long x = 0;
        const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
        if (ec != std::errc() || p != v.data() + v.size())
            throw ConfigError("config", "key '" + key + "': expected an integer, got '" + v + "'");
        return x;
    }

    std::map<std::string, std::string> entries_;
};

struct KeySpec {
    std::string key;
    std::string default_value;
    std::string help;
};

/// Defaults of `schema` overridden by `overrides`. Keys outside the schema
/// are rejected.
inline FlatConfig resolve(const std::vector<KeySpec>& schema, const FlatConfig& overrides) {
    FlatConfig out;
    for (const auto& s : schema) out.set(s.key, s.default_value);
    for (const auto& [k, v] : overrides.entries()) {
        if (!out.contains(k)) throw ConfigError("config", "unknown key '" + k + "'");
        out.set(k, v);
    }
    return out;
}

} // namespace mmwlab::config

#endif // MMWLAB_CONFIG_HPP

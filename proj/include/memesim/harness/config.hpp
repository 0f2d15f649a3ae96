#pragma once

#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "memesim/csv.hpp"
#include "memesim/error.hpp"

namespace memesim::harness {

/// Flat view of a TOML-style file: `[section]` headers and `key = value`
/// lines, addressed as "section.key". Values are numbers, booleans, quoted
/// strings, or bracketed comma lists of those. `#` starts a comment.
class KeyValueConfig {
public:
    KeyValueConfig() = default;

    static KeyValueConfig parse(std::istream& is, const std::string& origin = "<config>")
    {
        KeyValueConfig cfg;
        std::string line, section;
        std::size_t lineno = 0;
        while (std::getline(is, line)) {
            ++lineno;
            const auto where = origin + ":" + std::to_string(lineno);
            auto text = std::string(csv::trim(strip_comment(line)));
            if (text.empty())
                continue;
            if (text.front() == '[') {
                if (text.back() != ']')
                    throw ConfigError(where + ": unterminated section header");
                section = std::string(csv::trim(std::string_view(text).substr(1, text.size() - 2)));
                continue;
            }
            auto eq = text.find('=');
            if (eq == std::string::npos)
                throw ConfigError(where + ": expected key = value");
            auto key = std::string(csv::trim(std::string_view(text).substr(0, eq)));
            auto value = std::string(csv::trim(std::string_view(text).substr(eq + 1)));
            if (key.empty())
                throw ConfigError(where + ": empty key");
            cfg.values_[section.empty() ? key : section + "." + key] = unquote(value);
        }
        return cfg;
    }

    static KeyValueConfig load(const std::string& path)
    {
        std::ifstream f(path);
        if (!f)
            throw ConfigError("cannot open config file '" + path + "'");
        return parse(f, path);
    }

    bool has(const std::string& key) const { return values_.count(key) > 0; }
    void set(const std::string& key, const std::string& value) { values_[key] = value; }
    const std::map<std::string, std::string>& values() const { return values_; }

    std::optional<std::string> get_string(const std::string& key) const
    {
        auto it = values_.find(key);
        if (it == values_.end())
            return std::nullopt;
        return it->second;
    }

    template <class T>
    std::optional<T> get(const std::string& key) const
    {
        auto s = get_string(key);
        if (!s)
            return std::nullopt;
        return convert<T>(key, *s);
    }

    template <class T>
    std::optional<std::vector<T>> get_list(const std::string& key) const
    {
        auto s = get_string(key);
        if (!s)
            return std::nullopt;
        std::string_view body = csv::trim(*s);
        if (!body.empty() && body.front() == '[') {
            if (body.back() != ']')
                throw ConfigError("config key '" + key + "': unterminated list");
            body = body.substr(1, body.size() - 2);
        }
        std::vector<T> out;
        if (csv::trim(body).empty())
            return out;
        for (auto& item : csv::split(body))
            out.push_back(convert<T>(key, unquote(item)));
        return out;
    }

private:
    static std::string strip_comment(const std::string& line)
    {
        bool quoted = false;
        for (std::size_t i = 0; i < line.size(); ++i) {
            if (line[i] == '"')
                quoted = !quoted;
            else if (line[i] == '#' && !quoted)
                return line.substr(0, i);
        }
        return line;
    }

    static std::string unquote(const std::string& v)
    {
        auto t = std::string(csv::trim(v));
        if (t.size() >= 2 && t.front() == '"' && t.back() == '"')
            return t.substr(1, t.size() - 2);
        return t;
    }

    template <class T>
    static T convert(const std::string& key, const std::string& s)
    {
        if constexpr (std::is_same_v<T, std::string>) {
            return s;
        } else if constexpr (std::is_same_v<T, bool>) {
            if (s == "true" || s == "1")
                return true;
            if (s == "false" || s == "0")
                return false;
            throw ConfigError("config key '" + key + "': expected true or false, got '" + s + "'");
        } else {
            T out{};
            if (!csv::parse(s, out))
                throw ConfigError("config key '" + key + "': cannot parse '" + s + "'");
            return out;
        }
    }

    std::map<std::string, std::string> values_;
};

} // namespace memesim::harness

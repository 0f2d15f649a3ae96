#pragma once

#include <charconv>
#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <system_error>
#include <type_traits>
#include <vector>

#include "memesim/error.hpp"

namespace memesim::csv {

inline std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r' || s.front() == '\n'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r' || s.back() == '\n'))
        s.remove_suffix(1);
    return s;
}

inline std::vector<std::string> split(std::string_view line, char sep = ',')
{
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        auto pos = line.find(sep, start);
        out.emplace_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
        if (pos == std::string_view::npos)
            break;
        start = pos + 1;
    }
    return out;
}

/// Comma-separated table with a mandatory header row.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::size_t> line_numbers;

    /// Column index by name; throws InputError when absent.
    std::size_t column(std::string_view name) const
    {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name)
                return i;
        throw InputError("missing CSV column '" + std::string(name) + "'");
    }
};

inline Table read(std::istream& is)
{
    Table t;
    std::string line;
    std::size_t lineno = 0;
    bool have_header = false;
    while (std::getline(is, line)) {
        ++lineno;
        if (lineno == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0)
            line.erase(0, 3);
        if (trim(line).empty())
            continue;
        if (!have_header) {
            t.header = split(line);
            have_header = true;
            continue;
        }
        t.rows.push_back(split(line));
        t.line_numbers.push_back(lineno);
    }
    if (!have_header)
        throw InputError("empty CSV input (no header row)");
    return t;
}

/// Parses a numeric field; returns false on malformed input.
template <class T>
bool parse(std::string_view s, T& out)
{
    s = trim(s);
    if (s.empty())
        return false;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && p == s.data() + s.size();
}

/// Shortest round-trip text for a double; identical values always print
/// identically.
inline std::string fmt(double v)
{
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, p);
}

template <class T>
    requires std::is_integral_v<T>
std::string fmt(T v)
{
    return std::to_string(v);
}

inline std::string fmt(const std::string& s) { return s; }
inline std::string fmt(const char* s) { return s; }

/// Writes one comma-joined row.
template <class... Ts>
void row(std::ostream& os, const Ts&... fields)
{
    bool first = true;
    ((os << (first ? "" : ",") << fmt(fields), first = false), ...);
    os << '\n';
}

} // namespace memesim::csv

#pragma once

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "memesim/error.hpp"

namespace memesim::harness {

inline constexpr const char* kVersion = "1.0.0";

inline std::uint64_t fnv1a64(std::string_view data)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string hex64(std::uint64_t v)
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

/// Writes result files into one directory and remembers their hashes for the
/// manifest. Files are written in one piece after their content is built.
class OutputSet {
public:
    explicit OutputSet(std::filesystem::path dir)
        : dir_(std::move(dir))
    {
        std::error_code ec;
        std::filesystem::create_directories(dir_, ec);
        if (ec || !std::filesystem::is_directory(dir_))
            throw std::runtime_error("cannot create output directory '" + dir_.string() + "'");
        // probe writability up front so a long run does not fail at the end
        const auto probe = dir_ / ".memesim_write_probe";
        {
            std::ofstream f(probe);
            if (!f)
                throw std::runtime_error("output directory '" + dir_.string() + "' is not writable");
        }
        std::filesystem::remove(probe, ec);
    }

    const std::filesystem::path& dir() const { return dir_; }

    void write(const std::string& name, const std::string& content)
    {
        std::ofstream f(dir_ / name, std::ios::binary);
        if (!f)
            throw std::runtime_error("cannot write '" + (dir_ / name).string() + "'");
        f << content;
        if (!f)
            throw std::runtime_error("failed writing '" + (dir_ / name).string() + "'");
        files_[name] = {content.size(), fnv1a64(content)};
    }

    nlohmann::json file_list() const
    {
        auto arr = nlohmann::json::array();
        for (const auto& [name, info] : files_)
            arr.push_back({{"name", name}, {"bytes", info.first}, {"fnv1a64", hex64(info.second)}});
        return arr;
    }

    std::vector<std::string> names() const
    {
        std::vector<std::string> out;
        for (const auto& [name, info] : files_)
            out.push_back(name);
        return out;
    }

private:
    std::filesystem::path dir_;
    std::map<std::string, std::pair<std::size_t, std::uint64_t>> files_;
};

class Stopwatch {
public:
    double seconds() const
    {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

} // namespace memesim::harness

#pragma once

#include <unistd.h>

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "covote/types.hpp"

namespace covote::testutil {

// Self-cleaning scratch directory under the system temp root.
struct TempDir {
    std::filesystem::path path;

    explicit TempDir(std::string_view tag) {
        static std::atomic<std::uint64_t> counter{0};
        auto unique = counter.fetch_add(1);
        path = std::filesystem::temp_directory_path() /
               ("covote_" + std::string(tag) + "_" + std::to_string(unique) + "_" +
                std::to_string(::getpid()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    std::string file(std::string_view name) const { return (path / name).string(); }
};

inline void write_file(const std::string& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

inline Member member(std::string id, std::string name, std::string group,
                     std::string country = "XX", std::string party = "P1",
                     std::string from = "2019-07-02", std::string to = "2024-07-15",
                     std::string handle = "") {
    Member m;
    m.id = std::move(id);
    m.full_name = std::move(name);
    m.group = std::move(group);
    m.country = std::move(country);
    m.national_party = std::move(party);
    m.twitter_handle = std::move(handle);
    m.active_from = *Date::parse(from);
    m.active_to = *Date::parse(to);
    return m;
}

inline RollCall rollcall(std::string id, std::string date, std::string area,
                         std::map<std::string, VoteValue> votes) {
    RollCall rc;
    rc.id = std::move(id);
    rc.date = *Date::parse(date);
    rc.policy_area = std::move(area);
    rc.votes = std::move(votes);
    return rc;
}

} // namespace covote::testutil

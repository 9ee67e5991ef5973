#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace capenc::cli {

/// Records how an output was produced: tool version, subcommand, resolved
/// configuration, SHA-256 of every input file and the run duration.
class RunManifest {
public:
    explicit RunManifest(std::string subcommand);

    void set(const std::string& key, nlohmann::json value) { config_[key] = std::move(value); }
    void set_seed(std::uint64_t seed) { seed_ = seed; }
    /// Hashes the raw bytes of path; the path is recorded as given.
    void add_input(const std::string& role, const std::filesystem::path& path);

    std::string to_json() const;
    void write(const std::filesystem::path& path) const;

private:
    std::string subcommand_;
    nlohmann::json config_ = nlohmann::json::object();
    nlohmann::json inputs_ = nlohmann::json::object();
    std::optional<std::uint64_t> seed_;
    std::chrono::steady_clock::time_point start_;
};

std::string sha256_hex(std::string_view bytes);

/// out.csv -> out.manifest.json
std::filesystem::path manifest_path_for_file(const std::filesystem::path& output);

}  // namespace capenc::cli

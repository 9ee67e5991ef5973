#include "manifest.hpp"

#include <openssl/evp.h>

#include "capenc/error.hpp"
#include "capenc/text.hpp"

#ifndef CAPENC_VERSION
#define CAPENC_VERSION "0.0.0"
#endif

namespace capenc::cli {

std::string sha256_hex(std::string_view bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr) != 1)
        throw Error("SHA-256 computation failed");
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * length);
    for (unsigned int i = 0; i < length; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xF];
    }
    return out;
}

std::filesystem::path manifest_path_for_file(const std::filesystem::path& output) {
    auto p = output;
    p.replace_extension(".manifest.json");
    return p;
}

RunManifest::RunManifest(std::string subcommand)
    : subcommand_(std::move(subcommand)), start_(std::chrono::steady_clock::now()) {}

void RunManifest::add_input(const std::string& role, const std::filesystem::path& path) {
    inputs_[role] = {{"path", path.generic_string()}, {"sha256", sha256_hex(text::read_file(path))}};
}

std::string RunManifest::to_json() const {
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start_;
    nlohmann::json doc = {{"tool", "capenc"},
                          {"tool_version", CAPENC_VERSION},
                          {"subcommand", subcommand_},
                          {"config", config_},
                          {"inputs", inputs_},
                          {"seed", seed_ ? nlohmann::json(*seed_) : nlohmann::json()},
                          {"wall_clock_seconds", elapsed.count()}};
    return doc.dump(2) + "\n";
}

void RunManifest::write(const std::filesystem::path& path) const {
    text::write_file(path, to_json());
}

}  // namespace capenc::cli

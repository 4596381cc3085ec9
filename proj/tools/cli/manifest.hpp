#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace awls::cli {

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::filesystem::path& path);

/// Files a command wrote; volatile ones (wall-clock timings) are listed
/// without a checksum.
struct Artifacts {
    std::filesystem::path dir;
    std::vector<std::string> files;
    std::vector<std::string> volatile_files;

    std::filesystem::path path(const std::string& name) const { return dir / name; }
    std::filesystem::path add(const std::string& name) {
        files.push_back(name);
        return dir / name;
    }
    std::filesystem::path add_volatile(const std::string& name) {
        volatile_files.push_back(name);
        return dir / name;
    }
};

/// manifest.json: command, effective config and its hash, seed, checksums.
void write_manifest(const std::string& command, const nlohmann::json& config, const Artifacts& artifacts);

}  // namespace awls::cli

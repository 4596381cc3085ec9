#include "manifest.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include <openssl/evp.h>

namespace awls::cli {

std::string sha256_hex(const std::string& bytes) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("SHA-256 failed");
    std::ostringstream out;
    for (unsigned int i = 0; i < len; ++i) out << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
    return out.str();
}

std::string sha256_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return sha256_hex(ss.str());
}

void write_manifest(const std::string& command, const nlohmann::json& config, const Artifacts& artifacts) {
    nlohmann::json m;
    m["schema"] = "awls.manifest/1";
    m["command"] = command;
    m["config"] = config;
    m["config_sha256"] = sha256_hex(config.dump());
    m["seed"] = config.at("seed");
    m["artifacts"] = nlohmann::json::array();
    for (const std::string& f : artifacts.files)
        m["artifacts"].push_back({{"path", f}, {"sha256", sha256_file(artifacts.path(f))}});
    m["volatile"] = artifacts.volatile_files;
    std::ofstream out(artifacts.path("manifest.json"));
    out << m.dump(2) << '\n';
    if (!out) throw std::runtime_error("cannot write manifest.json");
}

}  // namespace awls::cli

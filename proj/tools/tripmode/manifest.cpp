#include "manifest.hpp"

#include <filesystem>
#include <fstream>
#include <memory>

#include <openssl/evp.h>

#include "tripmode/error.hpp"

namespace tripmode::cli {

std::string sha256_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path + "'");
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) throw Error("SHA-256 unavailable");
    std::vector<char> buf(1 << 16);
    while (in) {
        in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
        if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
    }
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx.get(), md, &len);
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 15];
    }
    return out;
}

Manifest::Manifest(std::string subcommand) {
    root_["tool"] = "tripmode";
    root_["version"] = kToolVersion;
    root_["subcommand"] = std::move(subcommand);
    root_["parameters"] = nlohmann::ordered_json::object();
    root_["inputs"] = nlohmann::ordered_json::array();
    root_["seeds"] = nlohmann::ordered_json::object();
    root_["counts"] = nlohmann::ordered_json::object();
    root_["outputs"] = nlohmann::ordered_json::array();
    root_["warnings"] = nlohmann::ordered_json::array();
}

void Manifest::input(const std::string& role, const std::string& path) {
    root_["inputs"].push_back({{"role", role}, {"path", path}, {"sha256", sha256_file(path)}});
}

void Manifest::output(const std::string& path) {
    root_["outputs"].push_back(std::filesystem::path(path).filename().string());
}

void Manifest::warning(const std::string& text) { root_["warnings"].push_back(text); }

void Manifest::write(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write '" + path + "'");
    out << root_.dump(2) << '\n';
}

std::string manifest_path_for(const std::string& output_file) {
    std::filesystem::path p(output_file);
    return (p.parent_path() / (p.stem().string() + ".manifest.json")).string();
}

}  // namespace tripmode::cli

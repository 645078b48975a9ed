#pragma once

#include <string>

#include "json.hpp"

namespace tripmode::cli {

inline constexpr const char* kToolVersion = "1.0.0";

/// Hex SHA-256 of a file's bytes.
std::string sha256_file(const std::string& path);

/// Run record written next to a command's outputs. Holds no timestamps or
/// worker counts, so identical runs produce identical manifests.
class Manifest {
public:
    explicit Manifest(std::string subcommand);

    nlohmann::ordered_json& params() { return root_["parameters"]; }
    nlohmann::ordered_json& seeds() { return root_["seeds"]; }
    nlohmann::ordered_json& counts() { return root_["counts"]; }

    void input(const std::string& role, const std::string& path);
    void output(const std::string& path);
    void warning(const std::string& text);

    void write(const std::string& path) const;

private:
    nlohmann::ordered_json root_;
};

/// Manifest path for a file output: "<stem>.manifest.json" in the same directory.
std::string manifest_path_for(const std::string& output_file);

}  // namespace tripmode::cli

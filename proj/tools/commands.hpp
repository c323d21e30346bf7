#pragma once

#include "qcurv/io.hpp"

#include <string>
#include <utility>
#include <vector>

namespace qcurv::cli {

struct RunOptions {
    double tol = -1.0;  // negative: per-command default or the config value
    int threads = 0;
};

struct Outputs {
    std::vector<std::pair<std::string, std::string>> files;  // name, content
    Json summary;
    std::uint64_t seed = 0;
};

const std::vector<std::string>& command_names();

// Fills defaults and folds the --tol override into cfg[command] so the embedded
// config in the manifest is complete.
Json resolve_config(const std::string& command, const Json& cfg, const RunOptions& opt);

// Validates and runs. Throws ConfigError for bad input.
Outputs run_command(const std::string& command, const Json& cfg, const RunOptions& opt);

// A manifest file may be passed wherever a config is expected.
Json unwrap_manifest(const Json& doc, const std::string& command);

Json make_manifest(const std::string& command, const Json& cfg, const Outputs& out, const RunOptions& opt);

std::string sha256_hex(const std::string& data);

}  // namespace qcurv::cli

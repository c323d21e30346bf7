#pragma once

#include "qcurv/assembler.hpp"
#include "qcurv/balancing.hpp"
#include "qcurv/constants.hpp"
#include "qcurv/delaunay.hpp"
#include "qcurv/interactions.hpp"

#include <json.hpp>

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace qcurv {

using Json = nlohmann::json;

// Malformed or out-of-range configuration. `where` is a dotted path into the document.
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& where, const std::string& what);
    const std::string& where() const { return where_; }
    const std::string& reason() const { return reason_; }

private:
    std::string where_;
    std::string reason_;
};

const Json& require(const Json& obj, const std::string& key, const std::string& where);
double get_number(const Json& obj, const std::string& key, const std::string& where);
double get_number_or(const Json& obj, const std::string& key, double def, const std::string& where);
int get_int(const Json& obj, const std::string& key, const std::string& where);
int get_int_or(const Json& obj, const std::string& key, int def, const std::string& where);
bool get_bool_or(const Json& obj, const std::string& key, bool def, const std::string& where);
std::string get_string_or(const Json& obj, const std::string& key, const std::string& def, const std::string& where);
std::vector<double> get_numbers(const Json& obj, const std::string& key, const std::string& where);
std::vector<Point> get_points(const Json& obj, const std::string& key, int n, const std::string& where);

// {n, sigma} at the top level; ParamError from derive_params becomes ConfigError.
ProblemParams params_from_config(const Json& cfg);

Json to_json(const ProblemParams& P);
Json to_json(const InteractionConstants& C);
Json to_json(const OracleFit& f);
Json to_json(const BalancedConfig& B);
Json to_json(const JacobianReport& J);
Json to_json(const NeckSweep& s);
Json to_json(const WeightSpec& w);
Json to_json(const ResidualReport& r, bool with_samples = false);

// Shortest round-trip decimal form.
std::string fmt(double x);

Json read_json_file(const std::filesystem::path& path);
// Writes to a sibling temporary and renames over the target.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace qcurv

#include "qcurv/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace qcurv {

ConfigError::ConfigError(const std::string& where, const std::string& what)
    : std::runtime_error(where.empty() ? what : where + ": " + what), where_(where), reason_(what) {}

namespace {

std::string join(const std::string& where, const std::string& key) { return where.empty() ? key : where + "." + key; }

}  // namespace

const Json& require(const Json& obj, const std::string& key, const std::string& where) {
    if (!obj.is_object()) throw ConfigError(where, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) throw ConfigError(join(where, key), "missing");
    return *it;
}

double get_number(const Json& obj, const std::string& key, const std::string& where) {
    const Json& v = require(obj, key, where);
    if (!v.is_number()) throw ConfigError(join(where, key), "expected a number");
    return v.get<double>();
}

double get_number_or(const Json& obj, const std::string& key, double def, const std::string& where) {
    if (!obj.is_object() || !obj.contains(key)) return def;
    return get_number(obj, key, where);
}

int get_int(const Json& obj, const std::string& key, const std::string& where) {
    const Json& v = require(obj, key, where);
    if (!v.is_number_integer()) throw ConfigError(join(where, key), "expected an integer");
    return v.get<int>();
}

int get_int_or(const Json& obj, const std::string& key, int def, const std::string& where) {
    if (!obj.is_object() || !obj.contains(key)) return def;
    return get_int(obj, key, where);
}

bool get_bool_or(const Json& obj, const std::string& key, bool def, const std::string& where) {
    if (!obj.is_object() || !obj.contains(key)) return def;
    const Json& v = obj.at(key);
    if (!v.is_boolean()) throw ConfigError(join(where, key), "expected true or false");
    return v.get<bool>();
}

std::string get_string_or(const Json& obj, const std::string& key, const std::string& def, const std::string& where) {
    if (!obj.is_object() || !obj.contains(key)) return def;
    const Json& v = obj.at(key);
    if (!v.is_string()) throw ConfigError(join(where, key), "expected a string");
    return v.get<std::string>();
}

std::vector<double> get_numbers(const Json& obj, const std::string& key, const std::string& where) {
    const Json& v = require(obj, key, where);
    if (!v.is_array()) throw ConfigError(join(where, key), "expected an array of numbers");
    std::vector<double> out;
    for (const Json& e : v) {
        if (!e.is_number()) throw ConfigError(join(where, key), "expected an array of numbers");
        out.push_back(e.get<double>());
    }
    return out;
}

std::vector<Point> get_points(const Json& obj, const std::string& key, int n, const std::string& where) {
    const Json& v = require(obj, key, where);
    std::string w = join(where, key);
    if (!v.is_array() || v.empty()) throw ConfigError(w, "expected a non-empty array of points");
    std::vector<Point> out;
    for (const Json& p : v) {
        if (!p.is_array() || static_cast<int>(p.size()) != n)
            throw ConfigError(w, "each point needs " + std::to_string(n) + " coordinates");
        Point x;
        for (const Json& c : p) {
            if (!c.is_number()) throw ConfigError(w, "coordinates must be numbers");
            x.push_back(c.get<double>());
        }
        out.push_back(x);
    }
    return out;
}

ProblemParams params_from_config(const Json& cfg) {
    int n = get_int(cfg, "n", "");
    double sigma = get_number(cfg, "sigma", "");
    try {
        return derive_params(n, sigma);
    } catch (const ParamError& e) {
        throw ConfigError("n/sigma", e.what());
    }
}

Json to_json(const ProblemParams& P) {
    return Json{{"n", P.n},         {"sigma", P.sigma},           {"gamma", P.gamma_s},
                {"gamma_dual", P.gamma_s_dual}, {"p", P.nonlin_exp}, {"c_ns", P.c_ns},
                {"Q_ns", P.q_ns},   {"riesz_const", P.riesz_const}};
}

Json to_json(const InteractionConstants& C) {
    return Json{{"A1", C.A1}, {"A2", C.A2}, {"A3", C.A3}, {"method", method_name(C.method)}, {"est_error", C.est_error}};
}

Json to_json(const OracleFit& f) {
    return Json{{"A2", f.A2},
                {"A3", f.A3},
                {"lambdas", f.lambdas},
                {"A2_samples", f.A2_samples},
                {"A3_samples", f.A3_samples},
                {"standard_factor", f.standard_factor},
                {"d", f.d}};
}

Json to_json(const BalancedConfig& B) {
    return Json{{"q", B.q},
                {"R", B.R},
                {"a0_hat", B.a0_hat},
                {"L", B.L},
                {"L_i", B.L_i},
                {"residual_B1", B.residual_B1},
                {"residual_B2", B.residual_B2},
                {"iterations", B.iterations}};
}

Json to_json(const JacobianReport& J) {
    return Json{{"dF_q", J.dF_q},
                {"dF_R", J.dF_R},
                {"q_block_singular", J.q_block_singular},
                {"q_kernel_dim", J.q_kernel_dim},
                {"kernel_angle", J.kernel_angle},
                {"dF_R_of_R", J.dF_R_of_R},
                {"dF_R_diag_of_R", J.dF_R_diag_of_R},
                {"homogeneity_error", J.homogeneity_error},
                {"diag_homogeneity_error", J.diag_homogeneity_error},
                {"min_singular", J.min_singular},
                {"ill_conditioned", J.ill_conditioned}};
}

Json to_json(const NeckSweep& s) {
    Json rows = Json::array();
    for (const SweepRow& r : s.rows) {
        Json j{{"L", r.L}, {"ok", r.ok}};
        if (r.ok) {
            j["eps"] = r.eps;
            j["psi_sup"] = r.psi_sup;
            j["resid"] = r.resid;
            j["iters"] = r.iters;
            j["constant"] = r.constant;
        } else {
            j["error"] = r.error;
        }
        rows.push_back(j);
    }
    Json out{{"rows", rows}, {"fitted", s.fitted}};
    if (s.fitted) {
        out["slope_eps"] = s.slope_eps;
        out["slope_psi"] = s.slope_psi;
    }
    return out;
}

Json to_json(const WeightSpec& w) {
    return Json{{"zeta1", w.zeta1}, {"tau", w.tau}, {"kind", w.kind == WeightKind::star ? "star" : "starstar"}};
}

Json to_json(const ResidualReport& r, bool with_samples) {
    Json spots = Json::array();
    for (const auto& s : r.spot_checks)
        spots.push_back(Json{{"x", s.x}, {"zonal", s.zonal}, {"oracle", s.oracle}, {"rel", s.rel}});
    Json out{{"L", r.L},
             {"weight", to_json(r.weight)},
             {"seed", r.seed},
             {"near", r.near},
             {"transition", r.transition},
             {"far", r.far},
             {"weighted", r.weighted},
             {"sup_abs", r.sup_abs},
             {"counts", {{"near", r.counts[0]}, {"transition", r.counts[1]}, {"far", r.counts[2]}}},
             {"spot_checks", spots},
             {"zonal_tail", r.zonal_tail}};
    if (with_samples) {
        Json smp = Json::array();
        for (std::size_t k = 0; k < r.samples.size(); ++k)
            smp.push_back(Json{{"x", r.samples[k].x},
                               {"region", region_name(r.samples[k].region)},
                               {"dist", r.samples[k].dist},
                               {"value", r.values[k]}});
        out["samples"] = smp;
    }
    return out;
}

std::string fmt(double x) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

Json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path.string(), "cannot open");
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return Json::parse(ss.str());
    } catch (const Json::parse_error& e) {
        throw ConfigError(path.string(), std::string("invalid JSON: ") + e.what());
    }
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << content;
        if (!out) throw std::runtime_error("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace qcurv

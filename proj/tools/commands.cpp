#include "commands.hpp"

#include "qcurv/assembler.hpp"
#include "qcurv/fit.hpp"
#include "qcurv/kernels.hpp"
#include "qcurv/parallel.hpp"
#include "qcurv/toda.hpp"
#include "qcurv/zonal.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <iomanip>
#include <memory>
#include <random>
#include <sstream>

namespace qcurv::cli {

namespace {

constexpr const char* kVersion = "0.3.0";
constexpr int kManifestVersion = 1;

const Json& block(const Json& cfg, const std::string& name) {
    static const Json empty = Json::object();
    if (!cfg.contains(name)) return empty;
    const Json& b = cfg.at(name);
    if (!b.is_object()) throw ConfigError(name, "expected an object");
    return b;
}

double positive(double v, const std::string& where) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(where, "must be positive");
    return v;
}

std::vector<double> positive_list(const Json& b, const std::string& key, const std::string& where) {
    auto v = get_numbers(b, key, where);
    if (v.empty()) throw ConfigError(where + "." + key, "must not be empty");
    for (double x : v) positive(x, where + "." + key);
    return v;
}

std::string csv_row(const std::vector<std::string>& cells) {
    std::string s;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) s += ',';
        s += cells[i];
    }
    return s + '\n';
}

// kernel -------------------------------------------------------------------

Outputs cmd_kernel(const Json& cfg, const ProblemParams& P, const RunOptions& opt) {
    const Json& b = block(cfg, "kernel");
    double t_min = get_number_or(b, "t_min", 0.0, "kernel");
    double t_max = get_number_or(b, "t_max", 16.0, "kernel");
    double step = positive(get_number_or(b, "step", 0.25, "kernel"), "kernel.step");
    double fit_lo = get_number_or(b, "fit_lo", 8.0, "kernel");
    double fit_hi = get_number_or(b, "fit_hi", 16.0, "kernel");
    double tol = positive(get_number_or(b, "tol", 1e-10, "kernel"), "kernel.tol");
    if (!(t_max > t_min)) throw ConfigError("kernel.t_max", "must exceed t_min");
    if (t_min < 0.0) throw ConfigError("kernel.t_min", "must be non-negative");
    if (!(fit_hi > fit_lo)) throw ConfigError("kernel.fit_hi", "must exceed fit_lo");
    (void)opt;

    int count = static_cast<int>(std::floor((t_max - t_min) / step + 1e-9)) + 1;
    std::vector<double> grid, sgrid;
    for (int k = 0; k < count; ++k) {
        double t = t_min + k * step;
        grid.push_back(t);
        if (t >= 1e-3) sgrid.push_back(t);
    }
    double kappa = calibrated_kappa(P);
    CylKernelTable riesz = make_kernel_table(P, KernelKind::riesz, grid, kappa, tol);
    CylKernelTable sing = make_kernel_table(P, KernelKind::singular, sgrid, 1.0, tol);

    auto slope = [&](const CylKernelTable& T) {
        std::vector<double> x, y;
        for (std::size_t k = 0; k < T.grid.size(); ++k)
            if (T.grid[k] >= fit_lo - 1e-12 && T.grid[k] <= fit_hi + 1e-12) {
                x.push_back(T.grid[k]);
                y.push_back(T.values[k]);
            }
        if (x.size() < 2) throw ConfigError("kernel.fit_lo", "fit window holds fewer than two grid points");
        return fit_log(x, y).slope;
    };
    auto monotone = [](const CylKernelTable& T) {
        for (std::size_t k = 1; k < T.values.size(); ++k)
            if (!(T.values[k] < T.values[k - 1])) return false;
        return true;
    };

    Outputs out;
    std::ostringstream r, s;
    write_kernel_csv(r, riesz);
    write_kernel_csv(s, sing);
    out.files.push_back({"kernel_riesz.csv", r.str()});
    out.files.push_back({"kernel_singular.csv", s.str()});
    double sr = slope(riesz), ss = slope(sing);
    out.summary = Json{{"kappa", kappa},
                       {"slope_riesz", sr},
                       {"slope_singular", ss},
                       {"target_riesz", -P.gamma_s},
                       {"target_singular", -P.gamma_s_dual},
                       {"rel_riesz", std::abs(sr / -P.gamma_s - 1.0)},
                       {"rel_singular", std::abs(ss / -P.gamma_s_dual - 1.0)},
                       {"monotone_riesz", monotone(riesz)},
                       {"monotone_singular", monotone(sing)}};
    return out;
}

// delaunay -----------------------------------------------------------------

Outputs cmd_delaunay(const Json& cfg, const ProblemParams& P, const RunOptions& opt) {
    const Json& b = block(cfg, "delaunay");
    std::vector<double> Ls = b.contains("L") ? positive_list(b, "L", "delaunay") : std::vector<double>{2, 2.5, 3, 3.5, 4};
    int M = get_int_or(b, "M", 800, "delaunay");
    if (M < 16) throw ConfigError("delaunay.M", "must be at least 16");
    double tol = positive(get_number_or(b, "tol", 1e-10, "delaunay"), "delaunay.tol");

    NeckSweep sw = neck_sweep(Ls, P, M, tol, opt.threads);
    Outputs out;
    std::ostringstream os;
    write_sweep_csv(os, sw);
    out.files.push_back({"delaunay.csv", os.str()});
    out.summary = to_json(sw);
    out.summary["target_slope"] = -P.gamma_s;
    return out;
}

// constants ----------------------------------------------------------------

Outputs cmd_constants(const Json& cfg, const ProblemParams& P, const RunOptions&) {
    const Json& b = block(cfg, "constants");
    double tol = positive(get_number_or(b, "tol", 1e-10, "constants"), "constants.tol");
    const Json& ob = block(b, "oracle");
    bool oracle = get_bool_or(ob, "enabled", true, "constants.oracle");
    double d = positive(get_number_or(ob, "d", 2.0, "constants.oracle"), "constants.oracle.d");
    std::vector<double> lambdas =
        ob.contains("lambdas") ? positive_list(ob, "lambdas", "constants.oracle") : std::vector<double>{1e-2, 1e-3};
    double otol = positive(get_number_or(ob, "tol", 1e-9, "constants.oracle"), "constants.oracle.tol");
    const Json& pb = block(b, "psi");
    std::vector<double> ells;
    if (pb.contains("ell")) {
        ells = get_numbers(pb, "ell", "constants.psi");
        for (double l : ells)
            if (l < 0.0) throw ConfigError("constants.psi.ell", "must be non-negative");
    } else {
        for (int l = 0; l <= 12; ++l) ells.push_back(l);
    }

    InteractionConstants C = interaction_constants(P, tol);
    Json report{{"closed", to_json(C)}};
    if (oracle) {
        OracleFit f = oracle_fit(P, d, lambdas, otol);
        ConstantsComparison cmp = compare_constants(C, f);
        report["oracle"] = to_json(f);
        report["comparison"] = Json{{"rel_A2", cmp.rel_A2}, {"rel_A3", cmp.rel_A3}, {"agree", cmp.agree}};
    }
    std::string psi_csv = "ell,psi\n";
    std::vector<double> fx, fy;
    for (double l : ells) {
        double v = psi(l, P);
        psi_csv += csv_row({fmt(l), fmt(v)});
        if (l >= 6.0 && l <= 12.0 && v != 0.0) {
            fx.push_back(l);
            fy.push_back(v);
        }
    }
    if (fx.size() >= 2) report["psi_slope"] = fit_log(fx, fy).slope;
    report["psi_target_slope"] = -P.gamma_s;

    Outputs out;
    out.files.push_back({"constants.json", report.dump(2) + "\n"});
    out.files.push_back({"psi.csv", psi_csv});
    out.summary = report;
    return out;
}

// balance ------------------------------------------------------------------

struct PointSet {
    SingularSet S;
    std::vector<double> q;
};

PointSet read_points(const Json& b, const std::string& where, const ProblemParams& P) {
    PointSet ps;
    auto pts = get_points(b, "points", P.n, where);
    ps.q = b.contains("q") ? positive_list(b, "q", where) : std::vector<double>(pts.size(), 1.0);
    if (ps.q.size() != pts.size()) throw ConfigError(where + ".q", "needs one entry per point");
    try {
        ps.S = make_singular_set(pts, P);
    } catch (const ParamError& e) {
        throw ConfigError(where + ".points", e.what());
    }
    return ps;
}

Outputs cmd_balance(const Json& cfg, const ProblemParams& P, const RunOptions&) {
    const Json& b = block(cfg, "balance");
    PointSet ps = read_points(b, "balance", P);
    double L = positive(get_number(b, "L", "balance"), "balance.L");
    double tol = positive(get_number_or(b, "tol", 1e-12, "balance"), "balance.tol");

    InteractionConstants C = interaction_constants(P);
    BalancedConfig B = balance(ps.S, ps.q, L, C, P, tol);
    JacobianReport J = balance_jacobian(ps.S, B.q, B.R, C, P);
    Json report{{"constants", to_json(C)}, {"config", to_json(B)}, {"jacobian", to_json(J)}};

    std::string csv = "i,q,R,L_i";
    for (int c = 0; c < P.n; ++c) csv += ",a0_" + std::to_string(c);
    csv += '\n';
    for (int i = 0; i < ps.S.size(); ++i) {
        std::vector<std::string> row{std::to_string(i), fmt(B.q[i]), fmt(B.R[i]), fmt(B.L_i[i])};
        for (double a : B.a0_hat[i]) row.push_back(fmt(a));
        csv += csv_row(row);
    }
    Outputs out;
    out.files.push_back({"balance.json", report.dump(2) + "\n"});
    out.files.push_back({"balance.csv", csv});
    out.summary = report;
    return out;
}

// assemble -----------------------------------------------------------------

WeightSpec read_weight(const Json& b, const ProblemParams& P) {
    const Json& wb = block(b, "weight");
    std::string kind = get_string_or(wb, "kind", "starstar", "assemble.weight");
    WeightKind wk;
    if (kind == "star")
        wk = WeightKind::star;
    else if (kind == "starstar")
        wk = WeightKind::starstar;
    else
        throw ConfigError("assemble.weight.kind", "expected \"star\" or \"starstar\"");
    double tau = get_number_or(wb, "tau", 0.1, "assemble.weight");
    WeightSpec w;
    try {
        w = default_weight(P, wk, tau);
        if (wb.contains("zeta1")) w.zeta1 = get_number(wb, "zeta1", "assemble.weight");
        validate_weight(w, P);
    } catch (const ParamError& e) {
        throw ConfigError("assemble.weight", e.what());
    }
    return w;
}

Outputs cmd_assemble(const Json& cfg, const ProblemParams& P, const RunOptions& opt) {
    const Json& b = block(cfg, "assemble");
    PointSet ps = read_points(b, "assemble", P);
    std::vector<double> Ls = b.contains("L") ? positive_list(b, "L", "assemble") : std::vector<double>{2.5, 3, 3.5};
    std::vector<double> uq;
    if (b.contains("unbalanced_q")) {
        uq = positive_list(b, "unbalanced_q", "assemble");
        if (uq.size() != ps.q.size()) throw ConfigError("assemble.unbalanced_q", "needs one entry per point");
    }
    int seed = get_int_or(b, "seed", 1, "assemble");
    if (seed < 0) throw ConfigError("assemble.seed", "must be non-negative");
    int per_ray = get_int_or(b, "per_ray", 16, "assemble");
    int extra = get_int_or(b, "extra", 2, "assemble");
    if (per_ray < 2 || extra < 0) throw ConfigError("assemble.per_ray", "per_ray >= 2 and extra >= 0 required");
    int spots = get_int_or(b, "spot_checks", 3, "assemble");
    double tol = positive(get_number_or(b, "tol", 1e-7, "assemble"), "assemble.tol");
    bool beta = get_bool_or(b, "beta", true, "assemble");
    WeightSpec w = read_weight(b, P);
    AssembleOptions aopt;
    aopt.M = get_int_or(b, "M", 800, "assemble");
    if (aopt.M < 16) throw ConfigError("assemble.M", "must be at least 16");
    const Json& zb = block(b, "zonal");
    ZonalOptions zopt;
    zopt.h = positive(get_number_or(zb, "h", zopt.h, "assemble.zonal"), "assemble.zonal.h");
    zopt.kmax = get_int_or(zb, "kmax", zopt.kmax, "assemble.zonal");
    zopt.nodes = get_int_or(zb, "nodes", zopt.nodes, "assemble.zonal");
    zopt.threads = opt.threads;
    if (zopt.kmax < 1 || zopt.nodes < 4) throw ConfigError("assemble.zonal", "kmax >= 1 and nodes >= 4 required");

    InteractionConstants C = interaction_constants(P);
    Outputs out;
    out.seed = static_cast<std::uint64_t>(seed);
    Json reports = Json::array();
    std::string table = "label,L,weighted,near,transition,far,sup_abs,beta00,beta00_leading\n";
    std::vector<double> lx, ly, bx, by;

    auto run = [&](const std::string& label, const std::vector<double>& q, double L) {
        BalancedConfig B = balance(ps.S, ps.q, L, C, P);
        if (!q.empty()) {
            // unbalanced control: same R, perturbed weights
            B.q = q;
            B.L_i = periods_from_q(B.q, L, P);
            B.a0_hat = solve_B2(ps.S, B.q, B.R, C, P);
        }
        auto u = std::make_shared<const ApproxSolution>(assemble(ps.S, B, {}, P, aopt));
        ResidualField F(u, zopt);
        auto samples = make_samples(*u, out.seed, per_ray, extra);
        ResidualReport rep = residual(F, w, samples, spots, tol);
        double b00 = 0.0, lead = 0.0;
        if (beta) {
            b00 = beta_projection(F, {0, 0, 0}, zopt.h, zopt.nodes);
            lead = beta00_leading(ps.S, B.q, B.R, C.A2, L, 0, P);
        }
        table += csv_row({label, fmt(L), fmt(rep.weighted), fmt(rep.near), fmt(rep.transition), fmt(rep.far),
                          fmt(rep.sup_abs), beta ? fmt(b00) : "", beta ? fmt(lead) : ""});

        std::string sc = "";
        for (int c = 0; c < P.n; ++c) sc += "x" + std::to_string(c) + ",";
        sc += "region,dist,value\n";
        for (std::size_t k = 0; k < rep.samples.size(); ++k) {
            std::vector<std::string> row;
            for (double xc : rep.samples[k].x) row.push_back(fmt(xc));
            row.push_back(region_name(rep.samples[k].region));
            row.push_back(fmt(rep.samples[k].dist));
            row.push_back(fmt(rep.values[k]));
            sc += csv_row(row);
        }
        out.files.push_back({"samples_" + label + "_L" + fmt(L) + ".csv", sc});

        Json j = to_json(rep);
        j["label"] = label;
        j["config"] = to_json(B);
        if (beta) {
            j["beta00"] = b00;
            j["beta00_leading"] = lead;
        }
        reports.push_back(j);
        return std::pair{rep.weighted, b00};
    };

    for (double L : Ls) {
        auto [wn, b00] = run("balanced", {}, L);
        lx.push_back(L);
        ly.push_back(wn);
        if (beta) {
            bx.push_back(L);
            by.push_back(b00);
        }
    }
    Json summary{{"target_slope", -P.gamma_s}, {"weight", to_json(w)}};
    if (lx.size() >= 2) summary["residual_slope"] = fit_log(lx, ly).slope;
    if (bx.size() >= 2) summary["beta00_slope"] = fit_log(bx, by).slope;
    if (!uq.empty()) {
        double L = Ls.back();
        auto [wn, b00] = run("unbalanced", uq, L);
        summary["unbalanced_L"] = L;
        summary["unbalanced_ratio"] = wn / ly.back();
        (void)b00;
    }
    out.files.insert(out.files.begin(), {"residual.csv", table});
    out.files.push_back({"reports.json", reports.dump(2) + "\n"});
    out.summary = summary;
    return out;
}

// toda ---------------------------------------------------------------------

Outputs cmd_toda(const Json& cfg, const ProblemParams&, const RunOptions&) {
    const Json& b = block(cfg, "toda");
    std::string kind = get_string_or(b, "kind", "translation", "toda");
    TodaKind tk;
    if (kind == "translation")
        tk = TodaKind::translation;
    else if (kind == "dilation")
        tk = TodaKind::dilation;
    else
        throw ConfigError("toda.kind", "expected \"translation\" or \"dilation\"");
    int K = get_int_or(b, "K", 200, "toda");
    if (K < 2) throw ConfigError("toda.K", "must be at least 2");
    double L = get_number_or(b, "L", 3.0, "toda");
    std::vector<double> taus = b.contains("tau") ? positive_list(b, "tau", "toda") : std::vector<double>{0.1, 0.5};
    int seed = get_int_or(b, "seed", 1, "toda");
    int samples = get_int_or(b, "samples", 8, "toda");
    if (seed < 0) throw ConfigError("toda.seed", "must be non-negative");
    if (samples < 1) throw ConfigError("toda.samples", "must be positive");

    TodaOperator op;
    try {
        op = make_toda(tk, K, L);
    } catch (const ParamError& e) {
        throw ConfigError("toda", e.what());
    }
    Outputs out;
    out.seed = static_cast<std::uint64_t>(seed);
    std::string csv = "tau,amplification,sampled,identity_error\n";
    Json rows = Json::array();
    std::mt19937_64 rng(out.seed);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (double tau : taus) {
        WeightedSeq bseq(K, 1, tau);
        for (int j = 0; j < K; ++j) bseq.at(j) = U(rng) * std::exp(-(2.0 * j + 1.0) * tau);
        WeightedSeq back = apply(op, invert(op, bseq, tau));
        double err = 0.0;
        for (int j = 0; j < K; ++j) err = std::max(err, std::abs(back.at(j) - bseq.at(j)));
        double amp = inverse_amplification(op, tau);
        double smp = sampled_amplification(op, tau, samples, out.seed);
        csv += csv_row({fmt(tau), fmt(amp), fmt(smp), fmt(err)});
        rows.push_back(Json{{"tau", tau}, {"amplification", amp}, {"sampled", smp}, {"identity_error", err}});
    }
    out.files.push_back({"toda.csv", csv});
    out.summary = Json{{"kind", kind}, {"K", K}, {"L", L}, {"rows", rows}};
    return out;
}

using Handler = Outputs (*)(const Json&, const ProblemParams&, const RunOptions&);

Handler handler(const std::string& command) {
    if (command == "kernel") return cmd_kernel;
    if (command == "delaunay") return cmd_delaunay;
    if (command == "constants") return cmd_constants;
    if (command == "balance") return cmd_balance;
    if (command == "assemble") return cmd_assemble;
    if (command == "toda") return cmd_toda;
    throw ConfigError("command", "unknown command " + command);
}

}  // namespace

const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names{"kernel", "delaunay", "constants", "balance", "assemble", "toda"};
    return names;
}

Json resolve_config(const std::string& command, const Json& cfg, const RunOptions& opt) {
    if (!cfg.is_object()) throw ConfigError("", "config must be a JSON object");
    handler(command);
    Json out = cfg;
    if (!out.contains(command)) out[command] = Json::object();
    if (!out[command].is_object()) throw ConfigError(command, "expected an object");
    if (opt.tol > 0.0) out[command]["tol"] = opt.tol;
    return out;
}

Outputs run_command(const std::string& command, const Json& cfg, const RunOptions& opt) {
    Handler h = handler(command);
    ProblemParams P = params_from_config(cfg);
    return h(cfg, P, opt);
}

Json unwrap_manifest(const Json& doc, const std::string& command) {
    if (!doc.is_object() || !doc.contains("manifest_version")) return doc;
    std::string recorded = get_string_or(doc, "command", "", "manifest");
    if (recorded != command)
        throw ConfigError("manifest.command", "manifest was written by '" + recorded + "', not '" + command + "'");
    return require(doc, "config", "manifest");
}

std::string sha256_hex(const std::string& data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("sha256 failed");
    std::ostringstream os;
    for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
    return os.str();
}

Json make_manifest(const std::string& command, const Json& cfg, const Outputs& out, const RunOptions& opt) {
    ProblemParams P = params_from_config(cfg);
    Json files = Json::object();
    for (const auto& [name, content] : out.files) files[name] = sha256_hex(content);
    return Json{{"manifest_version", kManifestVersion},
                {"qcurv_version", kVersion},
                {"command", command},
                {"config", cfg},
                {"config_sha256", sha256_hex(cfg.dump())},
                {"seed", out.seed},
                {"threads", thread_count(opt.threads)},
                {"constants", {{"params", to_json(P)}, {"kappa", calibrated_kappa(P)}}},
                {"outputs", files},
                {"summary", out.summary}};
}

}  // namespace qcurv::cli

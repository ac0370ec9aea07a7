// Command-line front end: builds the operator described by a JSON config,
// runs one task (kernel / decay / cancel / solve / holder / check), writes
// CSV outputs, and prints a one-line JSON summary to stdout.
//
// Exit codes: 0 success, 2 validation/config error, 3 numerical-convergence
// failure, 64 usage error.

#include "aniso_heat/product_ops.hpp"
#include "aniso_heat/sigma_geometry.hpp"
#include "aniso_heat/solver.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <random>
#include <sstream>

using namespace aniso_heat;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string fnv1a_hex(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

json load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw validation_error("config: cannot open " + path);
    try {
        return json::parse(is);
    } catch (const json::parse_error& e) {
        throw validation_error(std::string("config: ") + e.what());
    }
}

const json& require(const json& j, const char* key, const std::string& where) {
    if (!j.is_object() || !j.contains(key))
        throw validation_error("config." + where + ": missing \"" + key + "\"");
    return j[key];
}

struct Operator {
    double sigma = 1.0;
    int dim = 1;
    std::optional<SymbolField> symbol;
    std::optional<KernelProfile> profile;       // built lazily
    std::optional<ProductProfile> product;      // when the config asks for it
    const KernelProfile& kernel() const { return product ? product->assembled : *profile; }
};

SpatialGrid parse_grid(const json& cfg, int dim) {
    if (!cfg.contains("grid")) return SpatialGrid::defaults_for(dim);
    const json& g = cfg["grid"];
    const int n = require(g, "n", "grid").get<int>();
    const double box = require(g, "box", "grid").get<double>();
    return SpatialGrid(dim, n, box);
}

Operator build_operator(const json& cfg) {
    const json& op = require(cfg, "operator", "");
    Operator out;
    out.sigma = require(op, "sigma", "operator").get<double>();
    const json& measure = require(op, "measure", "operator");
    SpectralMeasure mu = measure_from_spec(measure, out.sigma);
    out.dim = mu.dim();
    if (op.contains("dimension") && op["dimension"].get<int>() != out.dim)
        throw validation_error("config.operator.dimension: does not match the measure");
    out.symbol.emplace(std::move(mu), out.sigma);

    const SpatialGrid grid = parse_grid(cfg, out.dim);
    if (cfg.contains("product")) {
        const json& pj = cfg["product"];
        BlockPartition part;
        part.sigma = out.sigma;
        part.blocks = require(pj, "blocks", "product").get<std::vector<int>>();
        std::vector<SpatialGrid> factor_grids;
        if (pj.contains("factor_n")) {
            const int fn = pj["factor_n"].get<int>();
            const double fbox = require(pj, "factor_box", "product").get<double>();
            for (int b : part.blocks) factor_grids.emplace_back(b, fn, fbox);
        }
        out.product = product_profile(part, grid, factor_grids);
    } else {
        out.profile = build_profile(*out.symbol, grid);
    }
    return out;
}

Forcing parse_forcing(const json& fj, int dim, double sigma) {
    const std::string kind = require(fj, "kind", "task.forcing").get<std::string>();
    if (kind == "constant") return forcing_constant(dim, fj.value("value", 1.0));
    if (kind == "gaussian-bump")
        return forcing_gaussian_bump(dim, fj.value("amplitude", 1.0), fj.value("width", 2.0),
                                     fj.value("center", std::vector<double>{}));
    if (kind == "sin-traveling")
        return forcing_sin_traveling(dim, fj.value("amplitude", 1.0), fj.value("wavenumber", 1.0),
                                     fj.value("omega", 1.0), sigma);
    if (kind == "holder-cusp")
        return forcing_holder_cusp(dim, fj.value("amplitude", 1.0), fj.value("alpha", 0.5), sigma,
                                   fj.value("center", std::vector<double>{}),
                                   fj.value("t_center", 0.5));
    if (kind == "csv") {
        const std::string path = require(fj, "path", "task.forcing").get<std::string>();
        std::ifstream is(path);
        if (!is) throw validation_error("task.forcing.path: cannot open " + path);
        SpaceTimeField field = read_space_time_csv(is, sigma);
        return forcing_from_field(std::move(field), require(fj, "alpha", "task.forcing").get<double>(),
                                  fj.value("seminorm", 1.0));
    }
    throw validation_error("task.forcing.kind: unknown kind \"" + kind + "\"");
}

PvParams parse_pv(const json& task) {
    PvParams pv;
    if (!task.contains("pv")) return pv;
    const json& p = task["pv"];
    if (p.contains("eps_fractions")) pv.eps_fractions = p["eps_fractions"].get<std::vector<double>>();
    pv.s_nodes = p.value("s_nodes", pv.s_nodes);
    pv.rho_nodes = p.value("rho_nodes", pv.rho_nodes);
    pv.head_rho_nodes = p.value("head_rho_nodes", pv.head_rho_nodes);
    pv.outer_rho_nodes = p.value("outer_rho_nodes", pv.outer_rho_nodes);
    pv.theta_nodes = p.value("theta_nodes", pv.theta_nodes);
    pv.s_cut_fraction = p.value("s_cut_fraction", pv.s_cut_fraction);
    pv.richardson_check = p.value("richardson", pv.richardson_check);
    return pv;
}

SolveTargets parse_targets(const json& task, int dim) {
    SolveTargets tg;
    const json& lat = require(task, "lattice", "task");
    tg.lattice = SampleLattice::centered(dim, require(lat, "n", "task.lattice").get<int>(),
                                         require(lat, "box", "task.lattice").get<double>());
    tg.times = require(task, "times", "task").get<std::vector<double>>();
    return tg;
}

std::ofstream open_output(const fs::path& dir, const std::string& name, json& summary) {
    fs::create_directories(dir);
    const fs::path path = dir / name;
    std::ofstream os(path);
    if (!os) throw validation_error("output: cannot open " + path.string());
    summary["outputs"].push_back(path.string());
    return os;
}

int run_task(const std::string& command, const json& cfg, const fs::path& outdir) {
    json summary;
    summary["command"] = command;
    summary["config_hash"] = fnv1a_hex(cfg.dump());
    summary["outputs"] = json::array();
    const json task = cfg.value("task", json::object());

    Operator op = build_operator(cfg);
    const KernelProfile& profile = op.kernel();
    const std::uint64_t seed = cfg.value("seed", 20250810u);

    if (command == "kernel") {
        auto os = open_output(outdir, "kernel.csv", summary);
        export_csv(profile, os, task.value("stride", 1));
        if (task.value("binary", false)) {
            const fs::path cache = outdir / "kernel.anhk";
            save_binary(profile, cache.string());
            summary["outputs"].push_back(cache.string());
        }
        double x0[3] = {0.0, 0.0, 0.0};
        summary["phi0"] = profile.eval(KernelComponent::phi, x0);
        summary["mass"] = profile.mass;
        summary["max_phi"] = profile.max_phi;
    } else if (command == "decay") {
        const double r_min = task.value("r_min", 3.0);
        const double r_max = task.value("r_max", 30.0);
        const int num_r = task.value("num_r", 16);
        auto os = open_output(outdir, "decay.csv", summary);
        os << "r,avg_phi,avg_absLphi\n";
        char buf[96];
        for (int i = 0; i < num_r; ++i) {
            const double r = r_min * std::pow(r_max / r_min, static_cast<double>(i) / (num_r - 1));
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", r,
                          spherical_average(profile, KernelComponent::phi, r),
                          spherical_average(profile, KernelComponent::abs_lphi, r));
            os << buf;
        }
        summary["slope_phi"] = decay_slope(profile, KernelComponent::phi, r_min, r_max, num_r);
        summary["slope_absLphi"] =
            decay_slope(profile, KernelComponent::abs_lphi, r_min, r_max, num_r);
        if (task.contains("axis")) {
            const auto axis = task["axis"].get<std::vector<double>>();
            if (static_cast<int>(axis.size()) != profile.dim())
                throw validation_error("task.axis: dimension mismatch");
            summary["slope_axis"] =
                directional_slope(profile, KernelComponent::phi, axis.data(), r_min, r_max, num_r);
        }
    } else if (command == "cancel") {
        std::vector<std::pair<double, double>> pairs = {{1.0, 2.0}, {1.0, 4.0}};
        if (task.contains("pairs")) {
            pairs.clear();
            for (const auto& p : task["pairs"]) pairs.emplace_back(p.at(0), p.at(1));
        }
        const int s_nodes = task.value("s_nodes", 256);
        const int rho_nodes = task.value("rho_nodes", 256);
        const double s_frac = task.value("s_max_fraction", 0.25);
        auto os = open_output(outdir, "cancel.csv", summary);
        os << "a,b,integral,abs_integral,ratio\n";
        char buf[128];
        json ratios = json::array();
        for (const auto& [a, b] : pairs) {
            const auto c = cancellation_integral(profile, a, b, s_nodes, rho_nodes, s_frac);
            const double ratio = c.abs_integral > 0 ? std::abs(c.integral) / c.abs_integral : 0.0;
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g\n", a, b, c.integral,
                          c.abs_integral, ratio);
            os << buf;
            ratios.push_back(ratio);
        }
        summary["ratios"] = ratios;
    } else if (command == "solve" || command == "holder") {
        const std::string mode = task.value("mode", "forced");
        SpaceTimeField u;
        if (mode == "homogeneous") {
            const Forcing u0f = parse_forcing(require(task, "u0", "task"), op.dim, op.sigma);
            std::vector<double> u0(static_cast<std::size_t>(profile.grid.size()));
            for (std::int64_t i = 0; i < profile.grid.size(); ++i) {
                int kv[3];
                std::int64_t rem = i;
                double x[3];
                for (int d = profile.dim() - 1; d >= 0; --d) {
                    kv[d] = static_cast<int>(rem % profile.grid.n);
                    rem /= profile.grid.n;
                }
                for (int d = 0; d < profile.dim(); ++d) x[d] = profile.grid.coord(kv[d]);
                u0[static_cast<std::size_t>(i)] = u0f(x, 0.0);
            }
            u = solve_homogeneous(profile, u0,
                                  require(task, "times", "task").get<std::vector<double>>());
            summary["mode"] = "homogeneous";
        } else if (mode == "forced") {
            const Forcing f = parse_forcing(require(task, "forcing", "task"), op.dim, op.sigma);
            const PvParams pv = parse_pv(task);
            PvDiagnostics diag;
            u = solve_forced(profile, f, pv, parse_targets(task, op.dim), &diag);
            summary["mode"] = "forced";
            summary["pv_targets"] = diag.targets;
            summary["pv_rate_flagged"] = diag.rate_flagged;
        } else {
            throw validation_error("task.mode: unknown mode \"" + mode + "\"");
        }

        if (command == "holder") {
            HolderOptions opt;
            opt.pair_budget = task.value("pair_budget", static_cast<std::int64_t>(200000));
            opt.seed = seed;
            const double alpha = require(task, "alpha", "task").get<double>();
            summary["alpha"] = alpha;
            summary["seminorm"] = holder_seminorm(u, alpha, opt);
            if (alpha >= std::min(op.sigma, 1.0))
                summary["alpha_warning"] = "alpha >= min(sigma, 1): outside the regularity theorems";
        }
        double sup = 0.0;
        for (double v : u.values) sup = std::max(sup, std::abs(v));
        summary["sup_u"] = sup;
        auto os = open_output(outdir, "solution.csv", summary);
        write_csv(u, os);
    } else if (command == "check") {
        json suites;
        const SymbolField& sym = *op.symbol;
        // symbol homogeneity and two-sided bounds on seeded frequencies
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> gauss;
        bool homog = true, bounds = true;
        for (int i = 0; i < 256; ++i) {
            double xi[3] = {0, 0, 0};
            double norm = 0.0;
            for (int d = 0; d < op.dim; ++d) {
                xi[d] = 3.0 * gauss(rng);
                norm += xi[d] * xi[d];
            }
            norm = std::sqrt(norm);
            if (norm < 1e-9) continue;
            const double m = sym.m(xi);
            double xi2[3] = {2 * xi[0], 2 * xi[1], 2 * xi[2]};
            homog = homog &&
                    std::abs(sym.m(xi2) - std::pow(2.0, op.sigma) * m) <= 1e-12 * sym.m(xi2);
            const double lo = sym.lambda() * sym.c_sigma() * std::pow(norm, op.sigma);
            const double hi = sym.mass() * sym.c_sigma() * std::pow(norm, op.sigma);
            bounds = bounds && m >= lo * (1 - 1e-9) && m <= hi * (1 + 1e-9);
        }
        suites["symbol-homogeneity"] = homog ? "pass" : "fail";
        suites["symbol-bounds"] = bounds ? "pass" : "fail";
        suites["ellipticity-positive"] = sym.lambda() > 0 ? "pass" : "fail";
        suites["profile-mass"] = std::abs(profile.mass - 1.0) <= 1e-6 ? "pass" : "fail";
        {
            // The spectral double-application identity holds on FFT-built
            // grids; product-assembled profiles check it factor by factor.
            bool ok = true;
            auto parseval = [&](const KernelProfile& p) {
                const auto once = apply_operator(p.symbol, p.grid, p.phi);
                const auto twice = apply_operator(p.symbol, p.grid, once);
                double ref = 0.0, err = 0.0;
                for (std::size_t i = 0; i < twice.size(); ++i) {
                    ref = std::max(ref, std::abs(p.l2phi[i]));
                    err = std::max(err, std::abs(twice[i] - p.l2phi[i]));
                }
                return err <= 1e-8 * std::max(ref, 1e-30);
            };
            if (op.product)
                for (const auto& f : op.product->factors) ok = ok && parseval(f);
            else
                ok = parseval(profile);
            suites["parseval-l2"] = ok ? "pass" : "fail";
        }
        suites["profile-equation"] = profile_equation_residual(profile) <= 1e-3 ? "pass" : "fail";
        {
            // Product fields are clean sections of much larger factor boxes,
            // so their s-range may safely extend further.
            const double s_frac = op.product ? 0.8 : 0.25;
            const auto c = cancellation_integral(profile, 1.0, 2.0, 256, 256, s_frac);
            suites["cancellation"] =
                std::abs(c.integral) <= 1e-3 * c.abs_integral ? "pass" : "fail";
        }
        summary["suites"] = suites;
        bool all = true;
        for (const auto& [k, v] : suites.items()) all = all && v == "pass";
        summary["all_passed"] = all;
        std::cout << summary.dump() << "\n";
        return all ? 0 : 3;
    }

    std::cout << summary.dump() << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"anisotropic stable heat-kernel toolkit"};
    app.require_subcommand(1);
    static const std::vector<std::string> commands = {"kernel", "decay", "cancel",
                                                      "solve", "holder", "check"};
    std::string config_path, outdir = "out", format = "csv";
    for (const auto& name : commands) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "JSON config path")->required();
        sub->add_option("--out", outdir, "output directory");
        sub->add_option("--format", format, "output format (csv)");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << app.help() << "\n";
        std::cerr << "error: " << e.what() << "\n";
        return 64;
    }

    try {
        if (format != "csv") throw validation_error("--format: only csv is supported");
        const json cfg = load_config(config_path);
        for (const auto& name : commands)
            if (app.got_subcommand(name)) return run_task(name, cfg, outdir);
        return 64;
    } catch (const validation_error& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const range_error& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const convergence_error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

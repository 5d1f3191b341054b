// quasikit -- command-line front end for the quasilinear singular SPDE
// toolkit.  Five subcommands cover the pipeline end to end:
//
//   symbols      enumerate the negative-degree symbol set of the driving
//                rule, or test the integrability (super-regularity) bounds
//                at a chosen noise regularity
//   counterterm  derive the local counterterm polynomial from the jet
//                expansion of the solution map
//   solve        run one renormalised (or bare) solve against synthesized
//                noise and dump the field as CSV
//   constants    evaluate the renormalisation constants C1, C2 and their
//                Ward-type identity on a grid of (eps, c) pairs
//   converge     run the coupled Cauchy-in-eps convergence study and write
//                its CSV report (optionally with a log-log chart)
//
// All options can also be supplied through a `key = value` config file via
// --config; subcommand options live in an INI section named after the
// subcommand.  QUASIKIT_THREADS caps the OpenMP team size.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "CLI11.hpp"

#include "quasikit/constants.h"
#include "quasikit/jet.h"
#include "quasikit/qlsolve.h"
#include "quasikit/rules.h"
#include "quasikit/xcli.h"

namespace {

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        std::size_t used = 0;
        const double v = std::stod(item, &used);
        if (used != item.size())
            throw std::invalid_argument("bad number in list: '" + item + "'");
        out.push_back(v);
    }
    if (out.empty()) throw std::invalid_argument("empty numeric list");
    return out;
}

qk::ScalingSpec parse_scaling(const std::string& text) {
    qk::ScalingSpec sc;
    sc.s.clear();
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        const int v = std::stoi(item, &used);
        if (used != item.size() || v <= 0)
            throw std::invalid_argument("bad scaling component: '" + item + "'");
        sc.s.push_back(v);
    }
    if (sc.s.size() != 2)
        throw std::invalid_argument("scaling needs exactly two components, e.g. 2,1");
    return sc;
}

// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const int n = (int)x.size();
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (int i = 0; i < n; ++i) {
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

struct SymbolsOpts {
    std::string alpha = "-3/2+1k";
    std::string beta = "2";
    std::string scaling = "2,1";
    std::string cutoff = "0+1k";
    std::string rule = "gkpz";
    bool list = false;
    bool count = false;
    bool check_superreg = false;
};

int run_symbols(const SymbolsOpts& o) {
    if (o.rule != "gkpz")
        throw std::invalid_argument("unknown rule '" + o.rule + "' (have: gkpz)");
    qk::DegreeParams deg;
    deg.alpha = qk::parse_degree(o.alpha);
    const qk::Degree beta_deg = qk::parse_degree(o.beta);
    if (beta_deg.m != 0)
        throw std::invalid_argument("kernel order must be a plain rational, e.g. 2");
    deg.beta = beta_deg.r;
    deg.scaling = parse_scaling(o.scaling);

    qk::GenerateParams gp;
    gp.cutoff = qk::parse_degree(o.cutoff);

    if (o.check_superreg) {
        // Generate the set at the rule's canonical regularity (generation at a
        // supercritical alpha would never terminate); the bounds themselves
        // are then tested at the requested --alpha, which only re-evaluates
        // degrees on the fixed set.
        gp.deg.beta = deg.beta;
        gp.deg.scaling = deg.scaling;
        const qk::GenerateResult res = qk::generate(qk::gkpz_rule(), gp);
        const auto violations =
            qk::check_superregularity(res.rhs, deg.alpha, deg.beta, deg.scaling);
        if (violations.empty()) {
            std::cout << "superregular: yes (" << res.rhs.size()
                      << " symbols at alpha = " << deg.alpha.str() << ")\n";
            return 0;
        }
        std::set<std::string> bad;
        for (const auto& v : violations) {
            bad.insert(qk::sym_format(v.sym));
            std::cout << "violation: " << qk::sym_format(v.sym) << "  degree "
                      << v.degree.str() << "  bound " << v.bound.str() << "  ["
                      << v.condition << "]\n";
        }
        std::cout << "superregular: no (" << violations.size() << " violations across "
                  << bad.size() << " of " << res.rhs.size() << " symbols at alpha = "
                  << deg.alpha.str() << ")\n";
        return 1;
    }

    gp.deg = deg;
    qk::GenerateResult res = qk::generate(qk::gkpz_rule(), gp);
    if (o.count) {
        std::cout << res.rhs.size() << "\n";
        return 0;
    }
    std::sort(res.rhs.begin(), res.rhs.end(), qk::SymLess{});
    for (const auto& t : res.rhs) std::cout << qk::sym_format(t) << "\n";
    return 0;
}

struct CountertermOpts {
    bool raw = false;
    bool with_identity = false;
    bool semilinear = false;
};

int run_counterterm(const CountertermOpts& o) {
    const qk::SystemJets sys = qk::expand_system();
    const qk::CountertermResult res = qk::counterterm(sys, !o.raw);
    if (o.raw) {
        std::cout << "shift: " << res.numerator.str() << "\n";
        std::cout << "sexpr: " << res.numerator.sexpr() << "\n";
        std::cout << "quotient: " << res.quotient.str() << "\n";
        std::cout << "remainder: " << res.remainder.str() << "\n";
        std::cout << "divisible: " << (res.divisible ? "yes" : "no") << "\n";
    } else {
        std::cout << "counterterm: " << res.quotient_c1.str() << "\n";
        std::cout << "sexpr: " << res.quotient_c1.sexpr() << "\n";
    }
    if (o.semilinear) {
        const qk::TheoremMap tm = qk::theorem_constant_map(res);
        std::cout << "product form -(C1(a)/a)*(a F1' F1 + F1^2 F0 - a' F1^2): "
                  << (tm.matches ? "yes" : "no") << "\n";
        std::cout << "semilinear: " << tm.semilinear.str() << "\n";
        std::cout << "sexpr: " << tm.semilinear.sexpr() << "\n";
    }
    return 0;
}

struct SolveOpts {
    std::string method = "fd";
    int nx = 256;
    int nt = 8192;
    double T = 0.25;
    std::uint64_t seed = 1;
    double eps = 0.1;
    double nu = 0.75;
    std::string counterterm = "on";
    std::string out;
};

int run_solve(const SolveOpts& o) {
    qk::ExperimentSpec spec;
    spec.problem = qk::default_problem();
    spec.noise.nu = o.nu;
    spec.noise.seed = o.seed;
    spec.noise.grid = qk::GridSpec{o.nx, o.nt, o.T};
    spec.renormalise = (o.counterterm == "on");
    spec.use_fixedpoint = (o.method == "fixedpoint");

    const qk::Field xi = qk::sample_noise(spec.noise);
    const qk::SolveReport rep = qk::run_with_field(spec, xi, o.eps, spec.mol_a);
    qk::write_text_file(
        o.out, qk::csv_solve(spec.noise.grid, rep.u, rep.t0, rep.iterations, rep.residual));

    std::cout << std::setprecision(12);
    std::cout << "wrote " << o.out << "  (" << o.method << ", t0 " << rep.t0 << ", "
              << rep.iterations << " iterations, residual " << rep.residual << ")\n";
    if (rep.truncated)
        std::cout << "note: fixed-point solution truncated at t0 = " << rep.t0
                  << " by the gradient threshold\n";
    return 0;
}

struct ConstantsOpts {
    double nu = 0.5;
    std::string eps_list = "0.1";
    std::string c_list = "0.6,1.0,1.8";
    bool check_identity = false;
    bool check_scaling = false;
    bool charts = false;
    std::string out;
};

int run_constants(const ConstantsOpts& o) {
    const std::vector<double> eps_list = parse_list(o.eps_list);
    const std::vector<double> c_list = parse_list(o.c_list);
    qk::CovarianceSpec cov;
    cov.nu = o.nu;
    const qk::MollifierSpec mol;
    const double half_mass = 0.5 * qk::covariance_mass(cov);

    std::cout << std::setprecision(12);
    std::vector<qk::ConstantsRow> rows;
    int flagged = 0;
    for (const double eps : eps_list) {
        const qk::CovarianceTable tab = qk::mollified_covariance(cov, mol, eps);
        const qk::SpectralTable st = qk::build_spectral_table(tab);
        for (const double c : c_list) {
            qk::ConstantsRow row;
            row.eps = eps;
            row.c = c;
            row.cbar = c;
            row.C1 = qk::compute_C1(c, tab);
            row.C2 = qk::compute_C2(c, c, st);
            row.identity_residual = std::fabs(row.C1 - c * row.C2) / std::fabs(row.C1);
            rows.push_back(row);
            std::cout << "eps " << eps << "  c " << c << "  C1 " << row.C1 << "  C2 "
                      << row.C2 << "  identity residual " << row.identity_residual
                      << "\n";
        }
        if (o.check_identity) {
            // Whole-line route: C1 = c*C2 up to quadrature error.  Torus
            // route: the zero mode survives in C1 only, so the defect must
            // equal half the covariance mass; drift beyond quadrature error
            // is flagged.
            for (const double c : c_list) {
                const double defect =
                    qk::periodic_C1(c, st) - c * qk::periodic_C2(c, c, st);
                const double drift = std::fabs(defect - half_mass) / half_mass;
                const bool ok = drift <= 1e-4;
                std::cout << "periodic defect eps " << eps << "  c " << c << "  value "
                          << defect << "  half mass " << half_mass << "  drift "
                          << drift << (ok ? "  [ok]" : "  [FLAGGED]") << "\n";
                if (!ok) ++flagged;
            }
        }
    }
    if (o.check_identity) {
        for (const auto& row : rows) {
            const bool ok = row.identity_residual <= 1e-3;
            std::cout << "identity eps " << row.eps << "  c " << row.c << "  residual "
                      << row.identity_residual << (ok ? "  [ok]" : "  [FLAGGED]")
                      << "\n";
            if (!ok) ++flagged;
        }
    }

    if (o.check_scaling) {
        if (eps_list.size() < 2)
            throw std::invalid_argument("--check-scaling needs at least two eps values");
        qk::CovarianceSpec pure = cov;
        pure.pure_power = true;
        std::vector<double> c1(eps_list.size());
        for (std::size_t i = 0; i < eps_list.size(); ++i) {
            const qk::CovarianceTable tab = qk::mollified_covariance(pure, mol, eps_list[i]);
            c1[i] = qk::compute_C1(1.0, tab);
        }
        const double slope = loglog_slope(eps_list, c1);
        std::cout << "pure-power C1(1) scaling slope " << slope << "  (nu - 1 = "
                  << o.nu - 1.0 << ")\n";
    }

    if (!o.out.empty()) {
        qk::write_text_file(o.out, qk::csv_constants(rows));
        std::cout << "wrote " << o.out << "\n";
        if (o.charts && eps_list.size() >= 2) {
            std::vector<std::vector<double>> series(c_list.size());
            for (std::size_t ci = 0; ci < c_list.size(); ++ci)
                for (std::size_t ei = 0; ei < eps_list.size(); ++ei)
                    series[ci].push_back(rows[ei * c_list.size() + ci].C1);
            const std::string svg_path =
                std::filesystem::path(o.out).replace_extension(".svg").string();
            qk::write_text_file(svg_path, qk::svg_loglog(eps_list, series, "eps", "C1"));
            std::cout << "wrote " << svg_path << "\n";
        }
    }
    return flagged > 0 ? 1 : 0;
}

struct ConvergeOpts {
    double nu = 0.75;
    std::string eps = "0.1,0.05,0.025";
    int samples = 8;
    std::string renormalise = "on";
    std::string mollifier = "bump";
    std::string out_dir;
    bool charts = false;
};

int run_converge(const ConvergeOpts& o) {
    qk::ExperimentSpec spec;
    spec.problem = qk::default_problem();
    spec.noise.nu = o.nu;
    spec.eps_levels = parse_list(o.eps);
    spec.samples = o.samples;
    spec.renormalise = (o.renormalise == "on");
    spec.mol_a = qk::MollifierSpec{o.mollifier == "bump2" ? 1 : 0};

    const qk::ConvergenceTable table = qk::convergence_study(spec);

    std::filesystem::create_directories(o.out_dir);
    const std::string csv_path = o.out_dir + "/converge.csv";
    qk::write_text_file(csv_path, qk::csv_convergence(table));

    std::cout << std::setprecision(12);
    for (std::size_t k = 0; k + 1 < spec.eps_levels.size(); ++k)
        std::cout << "eps " << spec.eps_levels[k] << " -> " << spec.eps_levels[k + 1]
                  << "  median D " << table.median_D[k] << "\n";
    for (std::size_t k = 0; k < table.ratio.size(); ++k)
        std::cout << "contraction ratio " << table.ratio[k] << "\n";
    std::cout << "surviving samples " << table.surviving << " of " << spec.samples
              << (table.partial ? "  (partial)" : "") << "\n";
    std::cout << "wrote " << csv_path << "\n";

    if (o.charts) {
        const std::vector<double> x(spec.eps_levels.begin(), spec.eps_levels.end() - 1);
        const std::string svg_path = o.out_dir + "/converge.svg";
        qk::write_text_file(svg_path,
                            qk::svg_loglog(x, {table.median_D}, "eps", "median D"));
        std::cout << "wrote " << svg_path << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
#ifdef _OPENMP
    if (const char* threads = std::getenv("QUASIKIT_THREADS")) {
        const int n = std::atoi(threads);
        if (n > 0) omp_set_num_threads(n);
    }
#endif

    CLI::App app{"quasilinear singular SPDE toolkit: symbol enumeration, counterterm "
                 "derivation, renormalised solves, constants, convergence studies"};
    app.set_config("--config", "", "read options from a key = value file");
    app.require_subcommand(1);

    SymbolsOpts so;
    CLI::App* sym = app.add_subcommand(
        "symbols", "enumerate the negative-degree symbols of the driving rule");
    sym->add_option("--alpha", so.alpha, "noise regularity, e.g. -3/2+1k")
        ->capture_default_str();
    sym->add_option("--beta", so.beta, "kernel order")->capture_default_str();
    sym->add_option("--scaling", so.scaling, "anisotropic scaling s_t,s_x")
        ->capture_default_str();
    sym->add_option("--cutoff", so.cutoff, "keep symbols of degree below this")
        ->capture_default_str();
    sym->add_option("--rule", so.rule, "generation rule")->capture_default_str();
    CLI::Option* f_list =
        sym->add_flag("--list", so.list, "print one canonical symbol per line (default)");
    CLI::Option* f_count = sym->add_flag("--count", so.count, "print only the count");
    CLI::Option* f_sr = sym->add_flag("--check-superreg", so.check_superreg,
                                      "test the integrability bounds at --alpha");
    f_count->excludes(f_list);
    f_sr->excludes(f_list);
    f_sr->excludes(f_count);

    CountertermOpts co;
    CLI::App* ct = app.add_subcommand(
        "counterterm", "derive the local counterterm polynomial of the solution map");
    CLI::Option* f_raw = ct->add_flag(
        "--raw", co.raw, "stop before the chain-rule identity; show shift and obstruction");
    CLI::Option* f_id = ct->add_flag("--with-identity", co.with_identity,
                                     "apply the identity and divide (default)");
    ct->add_flag("--semilinear", co.semilinear,
                 "also print the constant-coefficient specialization");
    f_raw->excludes(f_id);

    SolveOpts vo;
    CLI::App* sol = app.add_subcommand(
        "solve", "one solve against synthesized noise, field dumped as CSV");
    sol->add_option("--method", vo.method, "solver family")
        ->check(CLI::IsMember({"fixedpoint", "fd"}))
        ->capture_default_str();
    sol->add_option("--nx", vo.nx, "spatial points")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sol->add_option("--nt", vo.nt, "time steps")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sol->add_option("--T", vo.T, "final time")->capture_default_str();
    sol->add_option("--seed", vo.seed, "noise seed")->capture_default_str();
    sol->add_option("--eps", vo.eps, "mollification scale")->capture_default_str();
    sol->add_option("--nu", vo.nu, "spectral exponent")->capture_default_str();
    sol->add_option("--counterterm", vo.counterterm, "subtract the counterterm")
        ->check(CLI::IsMember({"on", "off"}))
        ->capture_default_str();
    sol->add_option("--out", vo.out, "output CSV path")->required();

    ConstantsOpts ko;
    CLI::App* con = app.add_subcommand(
        "constants", "renormalisation constants C1, C2 and their identity");
    con->add_option("--nu", ko.nu, "covariance exponent")->capture_default_str();
    con->add_option("--eps-list", ko.eps_list, "comma-separated mollification scales")
        ->capture_default_str();
    con->add_option("--c-list", ko.c_list, "comma-separated diffusivities")
        ->capture_default_str();
    con->add_flag("--check-identity", ko.check_identity,
                  "flag identity residuals and the torus-route defect");
    con->add_flag("--check-scaling", ko.check_scaling,
                  "fit the pure-power C1(1) log-log slope across eps");
    con->add_flag("--charts", ko.charts, "also write a C1-vs-eps SVG next to --out");
    con->add_option("--out", ko.out, "output CSV path");

    ConvergeOpts go;
    CLI::App* cv = app.add_subcommand(
        "converge", "coupled Cauchy-in-eps convergence study on the default problem");
    cv->add_option("--nu", go.nu, "spectral exponent")->capture_default_str();
    cv->add_option("--eps", go.eps, "comma-separated decreasing scales")
        ->capture_default_str();
    cv->add_option("--samples", go.samples, "independent noise samples")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cv->add_option("--renormalise", go.renormalise, "subtract the counterterm")
        ->check(CLI::IsMember({"on", "off"}))
        ->capture_default_str();
    cv->add_option("--mollifier", go.mollifier, "mollifier profile")
        ->check(CLI::IsMember({"bump", "bump2"}))
        ->capture_default_str();
    cv->add_option("--out-dir", go.out_dir, "report directory")->required();
    cv->add_flag("--charts", go.charts, "also write a log-log D-vs-eps SVG");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sym->parsed()) return run_symbols(so);
        if (ct->parsed()) return run_counterterm(co);
        if (sol->parsed()) return run_solve(vo);
        if (con->parsed()) return run_constants(ko);
        if (cv->parsed()) return run_converge(go);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

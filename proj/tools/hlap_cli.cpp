// Command-line front end: block spectra with catalog matching, verification
// suites, Novikov-Shubin estimation, D-group reports, and parameter sweeps.

#include <CLI11.hpp>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <thread>

#include "hlap/catalog.hpp"
#include "hlap/dgroup.hpp"
#include "hlap/heat.hpp"
#include "hlap/heisenberg.hpp"
#include "hlap/step_two.hpp"
#include "hlap/step_two_io.hpp"

using nlohmann::json;
using namespace hlap;

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out << text;
}

void diagnostic(const std::string& kind, const std::string& message) {
    std::string one_line = message;
    for (auto& c : one_line)
        if (c == '\n') c = ' ';
    std::cerr << "error kind=" << kind << " message=\"" << one_line << "\"\n";
}

/// Deterministic parallel map: results land in preassigned slots.
template <typename Fn>
void parallel_for(std::size_t count, int workers, Fn&& fn) {
    if (workers <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    auto pump = [&] {
        for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
    };
    std::vector<std::thread> pool;
    const int spawn = std::min<int>(workers, static_cast<int>(count));
    for (int w = 0; w < spawn; ++w) pool.emplace_back(pump);
    for (auto& th : pool) th.join();
}

// ---------------------------------------------------------------- spectrum
int run_spectrum(int n, int p, double k, int gamma_max, int g_max, const std::string& format,
                 const std::string& output, int workers) {
    heisenberg::HeisenbergContext ctx(n, k, p);
    const auto gammas = heisenberg::enumerate_gammas(ctx, gamma_max);
    std::vector<SpectrumResult> specs(gammas.size());
    parallel_for(gammas.size(), workers,
                 [&](std::size_t i) { specs[i] = heisenberg::block_spectrum(ctx, gammas[i]); });

    const int reflected = (p <= n) ? p : 2 * n + 1 - p;
    const auto entries = catalog::eigenvalues(n, reflected, k, g_max + 8);
    std::vector<double> all;
    for (const auto& s : specs) all.insert(all.end(), s.raw.begin(), s.raw.end());
    std::sort(all.begin(), all.end());
    const auto report = catalog::match_spectrum(all, n, reflected, k, g_max);

    auto gamma_str = [](const MultiIndex& g) {
        std::string out;
        for (std::size_t i = 0; i < g.size(); ++i) out += (i ? ";" : "") + std::to_string(g[i]);
        return out;
    };
    auto find_match = [&](double v) -> const catalog::CatalogEntry* {
        for (const auto& e : entries)
            if (std::abs(e.value - v) <= 1e-8) return &e;
        return nullptr;
    };

    if (format == "csv") {
        std::string text = "gamma,eigenvalue,residual,catalog_family,catalog_g,catalog_r\n";
        for (std::size_t i = 0; i < gammas.size(); ++i)
            for (double v : specs[i].raw) {
                text += gamma_str(gammas[i]) + "," + fmt17(v) + "," + fmt17(specs[i].residual) +
                        ",";
                if (const auto* e = find_match(v))
                    text += std::to_string(e->family) + "," + std::to_string(e->g) + "," +
                            std::to_string(e->r);
                else
                    text += ",,";
                text += "\n";
            }
        write_text(output, text);
    } else {
        json out;
        out["params"] = {{"n", n}, {"p", p}, {"k", k}, {"gamma_max", gamma_max}, {"g_max", g_max}};
        out["blocks"] = json::array();
        for (std::size_t i = 0; i < gammas.size(); ++i) {
            json b;
            b["gamma"] = gammas[i].entries();
            b["eigenvalues"] = specs[i].raw;
            b["residual"] = specs[i].residual;
            out["blocks"].push_back(std::move(b));
        }
        out["match"] = {{"matched", report.matched},
                        {"orphan_numeric", report.orphan_numeric},
                        {"orphan_catalog_count", report.orphan_catalog.size()}};
        write_text(output, out.dump(2) + "\n");
    }
    if (!report.clean()) {
        diagnostic("catalog-mismatch",
                   "orphans: numeric=" + std::to_string(report.orphan_numeric.size()) +
                       " catalog=" + std::to_string(report.orphan_catalog.size()));
        return 1;
    }
    return 0;
}

// ------------------------------------------------------------------ verify
bool suite_commutators(int n, int p, double k, int gamma_max) {
    heisenberg::HeisenbergContext ctx(n, k, p);
    LinearRule lap = heisenberg::build_laplacian(ctx, heisenberg::LapMode::Explicit);
    std::vector<LinearRule> ops;
    for (int j = 1; j <= n; ++j) ops.push_back(heisenberg::build_Ujj(j, ctx));
    for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= n; ++j)
            if (i != j) ops.push_back(heisenberg::build_Uij(i, j, ctx));
    for (int i = 1; i < n; ++i)
        for (int j = i + 1; j <= n; ++j) ops.push_back(heisenberg::build_chi(i, j, ctx));
    for (const auto& gamma : heisenberg::enumerate_gammas(ctx, gamma_max)) {
        auto block = heisenberg::enumerate_block(ctx, gamma);
        for (const auto& op : ops) {
            LinearRule comm = LinearRule::commutator(op, lap);
            for (const auto& x : block.basis)
                if (comm.apply(x).norm() > 1e-10 * (1 + k * k)) return false;
        }
    }
    return true;
}

bool suite_appendix_a(int n, int p, double k, int gamma_max) {
    heisenberg::HeisenbergContext ctx(n, k, p);
    LinearRule composed = heisenberg::build_laplacian(ctx, heisenberg::LapMode::Composed);
    LinearRule explicit_ = heisenberg::build_laplacian(ctx, heisenberg::LapMode::Explicit);
    for (const auto& gamma : heisenberg::enumerate_gammas(ctx, gamma_max)) {
        auto block = heisenberg::enumerate_block(ctx, gamma);
        const Matrix mc = matrix_of(composed, block.basis, block.basis);
        const Matrix me = matrix_of(explicit_, block.basis, block.basis);
        if (max_abs(Matrix(mc - me)) > 1e-10) return false;
    }
    return true;
}

bool suite_kernel(int n, int p, double k, int gamma_max) {
    if (n < 2) return false;
    heisenberg::HeisenbergContext ctx(n, k, p);
    for (const auto& gamma : heisenberg::enumerate_gammas(ctx, gamma_max)) {
        if (gamma[1] < 2 || gamma[0] < 0) continue;
        try {
            if (heisenberg::kernel_lemma_check(ctx, gamma) <= 1e-8) return false;
        } catch (const std::domain_error&) {
        }
    }
    return true;
}

bool suite_hodge(int n, double k, int gamma_max) {
    const double cutoff = k * k + (n + 2) * k - 1e-6;
    for (int p = 0; p <= n; ++p) {
        heisenberg::HeisenbergContext lhs(n, k, p), rhs(n, k, 2 * n + 1 - p);
        auto a = heisenberg::low_spectrum(lhs, gamma_max, cutoff);
        auto b = heisenberg::low_spectrum(rhs, gamma_max, cutoff);
        if (a.size() != b.size()) return false;
        for (std::size_t i = 0; i < a.size(); ++i)
            if (std::abs(a[i] - b[i]) > 1e-8) return false;
    }
    return true;
}

bool suite_htype(int n, const std::string& algebra_path) {
    if (!algebra_path.empty()) {
        // user-supplied algebra: report its H-type status and Pfaffian
        auto algebra = nilpotent::algebra_from_file(algebra_path);
        auto rep = nilpotent::is_htype(algebra);
        nilpotent::CentralFunctional lambda(std::vector<double>(static_cast<std::size_t>(algebra.l), 0.0));
        lambda.lambda[0] = 1.0;
        std::cout << "algebra m=" << algebra.m << " l=" << algebra.l
                  << " htype=" << (rep.is_htype ? "yes" : "no")
                  << " deviation=" << fmt17(rep.max_deviation)
                  << " degenerate_direction=" << (algebra.has_degenerate_direction() ? "yes" : "no")
                  << " pf_W1=" << fmt17(nilpotent::pfaffian(algebra, lambda)) << "\n";
        return rep.is_htype;
    }
    if (!nilpotent::is_htype(nilpotent::StepTwoAlgebra::heisenberg(n)).is_htype) return false;
    if (!nilpotent::is_htype(nilpotent::StepTwoAlgebra::double_heisenberg(n)).is_htype)
        return false;
    nilpotent::StepTwoAlgebra degen(2, 2);
    degen.set_bracket(1, 2, 1, 1.0);
    if (nilpotent::is_htype(degen).is_htype) return false;
    const double pf = nilpotent::pfaffian(nilpotent::StepTwoAlgebra::heisenberg(n),
                                          nilpotent::CentralFunctional{1.5});
    return std::abs(pf - std::pow(1.5, n)) < 1e-10 * std::pow(1.5, n);
}

bool suite_dgroup(int n) {
    dgroup::DGroupContext ctx(std::max(2, n), nilpotent::CentralFunctional{0.6, 0.8});
    MultiIndex beta(std::vector<int>(static_cast<std::size_t>(2 * ctx.n), 1));
    if (dgroup::family_eigencheck(ctx, beta).max_residual > 1e-9) return false;
    for (int b = 1; b <= 10; ++b)
        for (int m = 1; m <= 10; ++m)
            if (!dgroup::cubic_bounds(b, m, 1.0).certified) return false;
    dgroup::DGroupContext small(1, nilpotent::CentralFunctional{1.0, 0.0});
    auto br = dgroup::lowest_bracket(1, 1.0);
    auto low = dgroup::global_low_spectrum(small, br.upper + 1.0, 6);
    return !low.eigenvalues.empty() && low.eigenvalues[0] > br.lower &&
           low.eigenvalues[0] < br.upper;
}

int run_verify(const std::string& suite, int n, int p, double k, int gamma_max,
               const std::string& algebra_path) {
    bool ok = false;
    if (suite == "commutators")
        ok = suite_commutators(n, p, k, gamma_max);
    else if (suite == "appendixA")
        ok = suite_appendix_a(n, p, k, gamma_max);
    else if (suite == "kernel")
        ok = suite_kernel(n, p, k, gamma_max);
    else if (suite == "hodge")
        ok = suite_hodge(n, k, gamma_max);
    else if (suite == "htype")
        ok = suite_htype(n, algebra_path);
    else if (suite == "dgroup")
        ok = suite_dgroup(n);
    else {
        diagnostic("argument", "unknown suite: " + suite);
        return 2;
    }
    std::cout << "suite=" << suite << " status=" << (ok ? "pass" : "fail") << "\n";
    if (!ok) diagnostic("suite-failure", "suite " + suite + " failed");
    return ok ? 0 : 1;
}

// ---------------------------------------------------------------------- ns
int run_ns(const std::string& group, int n, int p, const std::string& mode, double t_lo,
           double t_hi, int t_points, const std::string& output, const std::string& csv_path) {
    heat::HeatTraceConfig config;
    config.t_grid = heat::HeatTraceConfig::log_grid(t_lo, t_hi, t_points);
    config.mode = (mode == "full") ? heat::TraceMode::FullTrace : heat::TraceMode::LowestBand;

    json jconfig = {{"group", group},   {"n", n},       {"p", p},        {"mode", mode},
                    {"t_lo", t_lo},     {"t_hi", t_hi}, {"t_points", t_points}};

    std::vector<double> theta;
    heat::NSEstimate est;
    if (group == "heisenberg") {
        heat::HeisenbergHeatTracer tracer(n, p, config);
        for (double t : config.t_grid) theta.push_back(tracer.trace_at(t));
        est = heat::fit_alpha(config.t_grid, theta);
        est.alpha_closed = heat::alpha_closed_form(heat::Group::Heisenberg, n, p);
    } else {
        for (double t : config.t_grid)
            theta.push_back(heat::dgroup_trace_at(n, t, heat::DGroupCoefficient::BracketMidpoint));
        est = heat::fit_alpha(config.t_grid, theta);
        est.alpha_closed = heat::alpha_closed_form(heat::Group::DGroup, n, std::min(p, 1));
    }

    if (!csv_path.empty()) {
        std::string text = "t,theta,local_slope\n";
        for (std::size_t i = 0; i < config.t_grid.size(); ++i) {
            std::string slope;
            if (i >= 1 && i + 1 < config.t_grid.size()) slope = fmt17(est.local_slopes[i - 1]);
            text += fmt17(config.t_grid[i]) + "," + fmt17(theta[i]) + "," + slope + "\n";
        }
        write_text(csv_path, text);
    }

    json out;
    out["alpha_hat"] = est.alpha_hat;
    out["stderr"] = est.stderr_;
    out["alpha_closed"] = est.alpha_closed;
    out["window_ok"] = est.window_ok;
    out["config"] = jconfig;
    write_text(output, out.dump(2) + "\n");
    return 0;
}

// ------------------------------------------------------------------ dgroup
int run_dgroup(int n, double l1, double l2, int beta_max, const std::string& output) {
    dgroup::DGroupContext ctx(n, nilpotent::CentralFunctional{l1, l2});
    const double L = ctx.lambda.norm();
    json out;
    out["n"] = n;
    out["lambda"] = {l1, l2};

    auto br = dgroup::lowest_bracket(n, L);
    out["lowest_bracket"] = {{"lower", br.lower},
                             {"upper", br.upper},
                             {"linear_coefficient", br.linear_coefficient}};

    auto cb = dgroup::cubic_bounds(1, n, L);
    out["cubic"] = {{"mu_low", cb.mu_low},     {"mu_high", cb.mu_high},
                    {"p_at_low", cb.p_at_low}, {"p_at_high", cb.p_at_high},
                    {"p_at_zero", cb.p_at_zero}, {"certified", cb.certified}};

    json subs = json::array();
    for (int btot : {1, 2}) {
        MultiIndex beta(std::vector<int>(static_cast<std::size_t>(2 * n), 0));
        beta[0] = btot;
        for (auto which : {dgroup::Subspace::First, dgroup::Subspace::Second}) {
            auto res = dgroup::invariant_3x3(ctx, beta, which);
            json s;
            s["beta_total"] = btot;
            s["which"] = which == dgroup::Subspace::First ? "first" : "second";
            s["dim"] = res.basis.size();
            s["leak"] = res.leak;
            s["eigenvalues"] = res.eigenvalues;
            subs.push_back(std::move(s));
        }
    }
    out["invariant_subspaces"] = subs;

    auto low = dgroup::global_low_spectrum(ctx, br.upper + L, std::min(beta_max, 8));
    out["low_spectrum"] = {{"eigenvalues", low.eigenvalues},
                           {"multiplicities", low.multiplicities},
                           {"truncation_drift", low.truncation_drift}};
    write_text(output, out.dump(2) + "\n");
    return 0;
}

// ------------------------------------------------------------------- sweep
int run_sweep(const std::string& config_path, const std::string& output, int workers) {
    std::ifstream in(config_path);
    if (!in) {
        diagnostic("argument", "cannot open sweep config: " + config_path);
        return 2;
    }
    json config;
    in >> config;
    const std::string command = config.value("command", "spectrum");

    auto as_list = [&](const char* key, json fallback) {
        if (!config.contains(key)) return fallback;
        json v = config.at(key);
        return v.is_array() ? v : json::array({v});
    };

    json results = json::array();
    if (command == "spectrum") {
        const int gamma_max = config.value("gamma_max", 4);
        const int g_max = config.value("g_max", std::max(2, gamma_max - 2));
        for (const auto& jn : as_list("n", json::array({1})))
            for (const auto& jp : as_list("p", json::array({0})))
                for (const auto& jk : as_list("k", json::array({1.0}))) {
                    const int n = jn.get<int>(), p = jp.get<int>();
                    const double k = jk.get<double>();
                    heisenberg::HeisenbergContext ctx(n, k, p);
                    const auto gammas = heisenberg::enumerate_gammas(ctx, gamma_max);
                    std::vector<SpectrumResult> specs(gammas.size());
                    parallel_for(gammas.size(), workers, [&](std::size_t i) {
                        specs[i] = heisenberg::block_spectrum(ctx, gammas[i]);
                    });
                    std::vector<double> all;
                    for (const auto& s : specs) all.insert(all.end(), s.raw.begin(), s.raw.end());
                    std::sort(all.begin(), all.end());
                    const int reflected = (p <= n) ? p : 2 * n + 1 - p;
                    auto rep = catalog::match_spectrum(all, n, reflected, k, g_max);
                    results.push_back({{"n", n},
                                       {"p", p},
                                       {"k", k},
                                       {"eigenvalue_count", all.size()},
                                       {"lowest", all.empty() ? 0.0 : all.front()},
                                       {"orphan_numeric", rep.orphan_numeric.size()},
                                       {"orphan_catalog", rep.orphan_catalog.size()}});
                }
    } else if (command == "ns") {
        const double t_lo = config.value("t_lo", 1e2), t_hi = config.value("t_hi", 1e5);
        const int t_points = config.value("t_points", 25);
        for (const auto& jn : as_list("n", json::array({1})))
            for (const auto& jp : as_list("p", json::array({0}))) {
                const int n = jn.get<int>(), p = jp.get<int>();
                heat::HeatTraceConfig hc;
                hc.t_grid = heat::HeatTraceConfig::log_grid(t_lo, t_hi, t_points);
                hc.mode = heat::TraceMode::LowestBand;
                heat::HeisenbergHeatTracer tracer(n, p, hc);
                std::vector<double> theta;
                for (double t : hc.t_grid) theta.push_back(tracer.trace_at(t));
                auto est = heat::fit_alpha(hc.t_grid, theta);
                est.alpha_closed = heat::alpha_closed_form(heat::Group::Heisenberg, n, p);
                results.push_back({{"n", n},
                                   {"p", p},
                                   {"alpha_hat", est.alpha_hat},
                                   {"alpha_closed", est.alpha_closed},
                                   {"stderr", est.stderr_}});
            }
    } else {
        diagnostic("argument", "unknown sweep command: " + command);
        return 2;
    }
    write_text(output, results.dump(2) + "\n");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spectral toolkit for form Laplacians on Heisenberg-type groups"};
    app.require_subcommand(1);
    int workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    app.add_option("--workers", workers, "worker threads for block-level parallelism");

    auto* sp = app.add_subcommand("spectrum", "per-block eigenvalues with catalog match");
    int sp_n = 1, sp_p = 0, sp_gamma = 4, sp_gmax = 0;
    double sp_k = 1.0;
    std::string sp_format = "csv", sp_output = "-";
    sp->add_option("--n", sp_n, "ladder pairs")->required();
    sp->add_option("--p", sp_p, "form degree")->required();
    sp->add_option("--k", sp_k, "representation parameter")->required();
    sp->add_option("--gamma-max", sp_gamma, "block cutoff on sum(gamma)");
    sp->add_option("--g-max", sp_gmax, "catalog witness limit (default gamma-max - 2)");
    sp->add_option("--format", sp_format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    sp->add_option("--output,-o", sp_output, "output path ('-' for stdout)");

    auto* vf = app.add_subcommand("verify", "run a named property suite");
    std::string vf_suite;
    int vf_n = 2, vf_p = 1, vf_gamma = 4;
    double vf_k = 1.0;
    vf->add_option("--suite", vf_suite, "commutators|appendixA|kernel|hodge|htype|dgroup")
        ->required()
        ->check(CLI::IsMember({"commutators", "appendixA", "kernel", "hodge", "htype", "dgroup"}));
    vf->add_option("--n", vf_n, "ladder pairs");
    vf->add_option("--p", vf_p, "form degree");
    vf->add_option("--k", vf_k, "representation parameter");
    vf->add_option("--gamma-max", vf_gamma, "block cutoff");
    std::string vf_algebra;
    vf->add_option("--algebra", vf_algebra, "step-2 algebra JSON file (htype suite)");

    auto* ns = app.add_subcommand("ns", "Novikov-Shubin estimate from the heat trace");
    std::string ns_group = "heisenberg", ns_mode = "lowest", ns_output = "-", ns_csv;
    int ns_n = 1, ns_p = 0, ns_points = 25;
    double ns_tlo = 1e2, ns_thi = 1e5;
    ns->add_option("--group", ns_group, "heisenberg or dgroup")
        ->check(CLI::IsMember({"heisenberg", "dgroup"}));
    ns->add_option("--n", ns_n, "ladder pairs / D-group n")->required();
    ns->add_option("--p", ns_p, "form degree (heisenberg)");
    ns->add_option("--mode", ns_mode, "lowest or full")->check(CLI::IsMember({"lowest", "full"}));
    ns->add_option("--t-lo", ns_tlo, "fit window start");
    ns->add_option("--t-hi", ns_thi, "fit window end");
    ns->add_option("--t-points", ns_points, "grid points");
    ns->add_option("--output,-o", ns_output, "JSON summary path ('-' for stdout)");
    ns->add_option("--csv", ns_csv, "also write the (t, theta, local_slope) table here");

    auto* dg = app.add_subcommand("dgroup", "double Heisenberg group report");
    int dg_n = 1, dg_beta = 6;
    double dg_l1 = 1.0, dg_l2 = 0.0;
    std::string dg_output = "-";
    dg->add_option("--n", dg_n, "D^{4n+2} parameter")->required();
    dg->add_option("--lambda1", dg_l1, "first central component");
    dg->add_option("--lambda2", dg_l2, "second central component");
    dg->add_option("--beta-max", dg_beta, "sweep cutoff");
    dg->add_option("--output,-o", dg_output, "output path");

    auto* sw = app.add_subcommand("sweep", "iterate a parameter grid from a JSON config");
    std::string sw_config, sw_output = "-";
    sw->add_option("--config", sw_config, "JSON config file")->required();
    sw->add_option("--output,-o", sw_output, "output path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
        diagnostic("argument", e.what());
        return 2;
    }

    try {
        if (sp->parsed())
            return run_spectrum(sp_n, sp_p, sp_k, sp_gamma,
                                sp_gmax > 0 ? sp_gmax : std::max(1, sp_gamma - 2), sp_format,
                                sp_output, workers);
        if (vf->parsed()) return run_verify(vf_suite, vf_n, vf_p, vf_k, vf_gamma, vf_algebra);
        if (ns->parsed())
            return run_ns(ns_group, ns_n, ns_p, ns_mode, ns_tlo, ns_thi, ns_points, ns_output,
                          ns_csv);
        if (dg->parsed()) return run_dgroup(dg_n, dg_l1, dg_l2, dg_beta, dg_output);
        if (sw->parsed()) return run_sweep(sw_config, sw_output, workers);
    } catch (const std::invalid_argument& e) {
        diagnostic("argument", e.what());
        return 2;
    } catch (const std::out_of_range& e) {
        diagnostic("argument", e.what());
        return 2;
    } catch (const std::exception& e) {
        diagnostic("runtime", e.what());
        return 1;
    }
    return 2;
}

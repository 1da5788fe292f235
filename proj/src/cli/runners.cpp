#include "cli/runners.hpp"

#include "cli/output.hpp"
#include "gcf/errors.hpp"
#include "gcf/grandstats.hpp"
#include "gcf/thermo.hpp"
#include "gcf/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>

namespace gcf::cli {

namespace {

nlohmann::json tolerances_json(const Tolerances& t) {
    nlohmann::json j;
    j["tol"] = t.tol;
    j["eps"] = t.eps;
    j["entropy_tol"] = t.entropy_tol;
    j["fd_step"] = t.fd_step;
    return j;
}

std::string out_path(const RunContext& ctx, const std::string& name) {
    return ctx.out_dir + "/" + name;
}

PowerConfig solver_config(const Config& cfg) { return PowerConfig{cfg.tol.tol, cfg.max_iter}; }

std::size_t resolve_word_index(const Config& cfg) {
    std::size_t idx = 0;
    for (int i = 0; i < cfg.depth; ++i) {
        int s = i < static_cast<int>(cfg.word.size()) ? cfg.word[static_cast<std::size_t>(i)] : 0;
        idx = idx * static_cast<std::size_t>(cfg.r) + static_cast<std::size_t>(s);
    }
    return idx;
}

void require_family(const Config& cfg) {
    if (!cfg.has_family) throw ConfigError("this subcommand needs a 'family' section");
}

} // namespace

int cmd_admissibility(const RunContext& ctx) {
    const Config& cfg = ctx.cfg;
    require_family(cfg);
    AdmissibilityReport rep = run_admissibility(cfg.family, cfg.r, cfg.depth, cfg.n_max_window,
                                                cfg.mu, cfg.family_monotone);

    nlohmann::json res;
    res["h1"] = {{"observed_lip", rep.h1_max_observed_lip},
                 {"declared_M", cfg.family.lip_bound},
                 {"verdict", to_string(rep.h1)}};
    nlohmann::json h2 = {{"root_margin", rep.h2_root_margin}, {"verdict", to_string(rep.h2)}};
    if (rep.ratio_checked) {
        h2["ratio"] = {{"margin", rep.h2_ratio.margin},
                       {"monotone_ok", rep.h2_ratio.monotone_ok},
                       {"first_violation", rep.h2_ratio.first_violation}};
    }
    res["h2"] = h2;
    nlohmann::json violations = nlohmann::json::array();
    std::size_t shown = std::min<std::size_t>(rep.h3_violations.size(), 100);
    for (std::size_t i = 0; i < shown; ++i) {
        violations.push_back({{"N", rep.h3_violations[i].first},
                              {"word", Word::from_index(rep.h3_violations[i].second, cfg.r,
                                                        cfg.depth)
                                           .str()}});
    }
    res["h3"] = {{"violations", violations},
                 {"violation_count", rep.h3_violations.size()},
                 {"nonstrict_ok", rep.h3_nonstrict_ok},
                 {"declared_Kprime", cfg.family.kprime},
                 {"declared_delta", cfg.family.delta},
                 {"verdict", to_string(rep.h3)}};
    res["window"] = {{"n_max", rep.n_max_used}, {"depth", rep.depth_used}};
    res["overall"] = to_string(rep.overall());

    write_run_json(out_path(ctx, "admissibility.json"), "admissibility", cfg.raw,
                   tolerances_json(cfg.tol), cfg.seed, res);

    switch (rep.overall()) {
        case Verdict::Pass: return kOk;
        case Verdict::Fail: return kMathFailure;
        default: return kInconclusive;
    }
}

int cmd_spectrum(const RunContext& ctx) {
    const Config& cfg = ctx.cfg;
    require_family(cfg);
    WeightSystem ws = finite_weights(cfg.family, cfg.beta, cfg.mu, cfg.r, cfg.depth, cfg.tol.eps);
    SpectralSolution sol = power_iterate(assemble_grand(ws), solver_config(cfg));

    nlohmann::json res;
    res["lambda"] = sol.lambda;
    res["lambda_dual"] = sol.lambda_dual;
    res["log_lambda"] = std::log(sol.lambda);
    res["primal_residual"] = sol.primal_residual;
    res["dual_residual"] = sol.dual_residual;
    res["lambda_spread"] = sol.lambda_spread;
    res["rate"] = sol.rate;
    res["iterations_primal"] = sol.iterations_primal;
    res["iterations_dual"] = sol.iterations_dual;
    res["converged"] = sol.converged;
    res["n_max"] = ws.n_max;
    res["tail_bound"] = ws.tail_bound;
    write_run_json(out_path(ctx, "spectrum.json"), "spectrum", cfg.raw, tolerances_json(cfg.tol),
                   cfg.seed, res);

    std::vector<std::vector<std::string>> h_rows, nu_rows;
    for (std::size_t i = 0; i < sol.h.size(); ++i) {
        std::string w = Word::from_index(i, cfg.r, cfg.depth).str();
        h_rows.push_back({std::to_string(i), w, fmt_double(sol.h[i])});
        nu_rows.push_back({std::to_string(i), w, fmt_double(sol.nu[i])});
    }
    write_csv(out_path(ctx, "spectrum_h.csv"), {"index", "word", "h"}, h_rows);
    write_csv(out_path(ctx, "spectrum_nu.csv"), {"index", "word", "nu"}, nu_rows);

    return sol.converged ? kOk : kMathFailure;
}

int cmd_pressure(const RunContext& ctx) {
    const Config& cfg = ctx.cfg;
    require_family(cfg);

    GrandPotential gp = grand_potential(cfg.family, cfg.beta, cfg.mu, cfg.r, cfg.depth, cfg.tol.eps);
    WeightSystem ws = finite_weights(cfg.family, cfg.beta, cfg.mu, cfg.r, cfg.depth, cfg.tol.eps);
    TransferMatrix T = assemble_grand(ws);
    SpectralSolution sol = power_iterate(T, solver_config(cfg));

    EquilibriumResult eq = equilibrium_holonomic(sol, ws);
    CylinderFunction log_psi(cfg.r, cfg.depth, [&] {
        std::vector<double> v(gp.psi.size());
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::log(gp.psi[i]);
        return v;
    }());
    EntropyOptions eopt;
    eopt.seed = cfg.seed;
    PressureReport rep = grand_pressure(sol, log_psi, eq.measure, eopt);

    std::size_t widx = resolve_word_index(cfg);
    PartitionSequence seq = partition_iterate(T, cfg.partition_n, widx);

    nlohmann::json res;
    res["log_lambda"] = rep.log_lambda;
    res["h_v"] = rep.h_v;
    res["int_log_psi"] = rep.int_log_psi;
    res["identity_gap"] = rep.identity_gap;
    res["identity_ok"] = rep.identity_gap <= cfg.tol.entropy_tol;
    res["entropy_status"] = static_cast<int>(rep.entropy_status);
    res["kernel_row_defect"] = eq.max_row_defect;
    res["converged"] = sol.converged;
    res["partition"] = {{"n", cfg.partition_n},
                        {"word_index", widx},
                        {"final_value", seq.seq.back()}};

    for (long n : cfg.classical_n) {
        double p = classical_pressure(cfg.family, n, cfg.beta, cfg.r, cfg.depth, solver_config(cfg));
        rep.classical_table.push_back({static_cast<double>(n), cfg.beta, p});
    }
    nlohmann::json table = nlohmann::json::array();
    for (const auto& row : rep.classical_table)
        table.push_back({{"N", static_cast<long>(row[0])}, {"beta", row[1]}, {"P_N", row[2]}});
    res["classical_table"] = table;

    write_run_json(out_path(ctx, "pressure.json"), "pressure", cfg.raw, tolerances_json(cfg.tol),
                   cfg.seed, res);

    std::vector<std::vector<std::string>> rows;
    for (std::size_t m = 0; m < seq.seq.size(); ++m)
        rows.push_back({std::to_string(m + 1), fmt_double(seq.seq[m])});
    write_csv(out_path(ctx, "pressure_sequence.csv"), {"n", "avg_log_Z"}, rows);

    return sol.converged ? kOk : kMathFailure;
}

int cmd_sweep(const RunContext& ctx) {
    const Config& cfg = ctx.cfg;
    require_family(cfg);
    std::vector<double> betas = cfg.beta_grid ? *cfg.beta_grid : std::vector<double>{cfg.beta};
    std::vector<double> mus = cfg.mu_grid ? *cfg.mu_grid : std::vector<double>{cfg.mu};

    SweepResult sweep = analyticity_sweep(cfg.family, betas, mus, cfg.r, cfg.depth, cfg.tol.eps,
                                          solver_config(cfg));

    std::vector<std::vector<std::string>> rows;
    std::size_t flagged = 0;
    for (std::size_t ib = 0; ib < sweep.betas.size(); ++ib) {
        for (std::size_t im = 0; im < sweep.mus.size(); ++im) {
            const SweepNode& n = sweep.node(ib, im);
            std::size_t at = ib * sweep.mus.size() + im;
            if (!n.admissible) ++flagged;
            rows.push_back({fmt_double(n.beta), fmt_double(n.mu),
                            n.admissible ? "1" : "0", n.converged ? "1" : "0",
                            n.admissible ? fmt_double(n.lambda) : "",
                            n.admissible ? fmt_double(n.log_lambda) : "",
                            n.admissible ? fmt_double(n.rate) : "",
                            fmt_double(sweep.d1_beta[at]), fmt_double(sweep.d2_beta[at]),
                            fmt_double(sweep.d1_mu[at]), fmt_double(sweep.d2_mu[at])});
        }
    }
    write_csv(out_path(ctx, "sweep.csv"),
              {"beta", "mu", "admissible", "converged", "lambda", "log_lambda", "rate", "d1_beta",
               "d2_beta", "d1_mu", "d2_mu"},
              rows);

    nlohmann::json res;
    res["nodes_total"] = sweep.nodes.size();
    res["nodes_inadmissible"] = flagged;
    res["max_abs_d2_beta"] = sweep.max_abs_d2_beta;
    res["max_abs_d2_mu"] = sweep.max_abs_d2_mu;
    res["max_d2_step_beta"] = sweep.max_d2_step_beta;
    res["max_d2_step_mu"] = sweep.max_d2_step_mu;
    write_run_json(out_path(ctx, "sweep.json"), "sweep", cfg.raw, tolerances_json(cfg.tol),
                   cfg.seed, res);
    return kOk;
}

int cmd_grandstats(const RunContext& ctx) {
    const Config& cfg = ctx.cfg;
    if (!cfg.ensemble.present) throw ConfigError("grandstats needs an 'ensemble' section");

    GrandCanonicalEnsemble e;
    double a = cfg.ensemble.a, b = cfg.ensemble.b;
    e.energy = [a, b](long n) { return a * static_cast<double>(n) + b; };
    e.beta = cfg.beta;
    e.mu = cfg.mu;
    e.kprime = cfg.ensemble.kprime;
    e.delta = cfg.ensemble.delta;
    e.eps = cfg.tol.eps;
    e.volume = cfg.ensemble.volume;
    e.k_b = cfg.ensemble.si_mode ? kBoltzmannSI : cfg.ensemble.k_b;

    ParticleDistribution dist = particle_distribution(e);
    MomentSet m = moments(e);
    LogPartitionDerivatives der = log_partition_derivatives(e, cfg.tol.fd_step);
    double p = gas_pressure(e);

    double psum = 0.0;
    for (double x : dist.p) psum += x;

    nlohmann::json res;
    res["Z"] = dist.z;
    res["log_Z"] = std::log(dist.z);
    res["N_max"] = dist.n_max;
    res["mean_N"] = m.mean_n;
    res["mean_A"] = m.mean_a;
    res["mean_N2"] = m.mean_n2;
    res["distribution_sum"] = psum;
    res["pre_renorm_defect"] = dist.pre_renorm_defect;
    res["derivatives"] = {{"d_beta_fd", der.d_beta_fd},     {"d_beta_expect", der.d_beta_expect},
                          {"gap_beta", der.gap_beta},       {"d_mu_fd", der.d_mu_fd},
                          {"d_mu_expect", der.d_mu_expect}, {"gap_mu", der.gap_mu}};
    res["gas"] = {{"pressure", p},
                  {"temperature", e.temperature()},
                  {"volume", e.volume},
                  {"k_B", e.k_b},
                  {"ideal_gas_N_eff", p * e.volume * e.beta}};
    write_run_json(out_path(ctx, "grandstats.json"), "grandstats", cfg.raw,
                   tolerances_json(cfg.tol), cfg.seed, res);

    std::vector<std::vector<std::string>> rows;
    for (long n = 0; n <= dist.n_max; ++n)
        rows.push_back({std::to_string(n), fmt_double(e.energy(n)),
                        fmt_double(dist.p[static_cast<std::size_t>(n)])});
    write_csv(out_path(ctx, "grandstats_pn.csv"), {"N", "A_N", "P_N"}, rows);
    return kOk;
}

int cmd_maxent(const RunContext& ctx) {
    const Config& cfg = ctx.cfg;
    if (!cfg.maxent.present) throw ConfigError("maxent needs a 'maxent' section");

    FiniteCanonical c{cfg.maxent.a, cfg.maxent.beta};
    nlohmann::json res;

    MaxEntSolution sol;
    try {
        sol = maxent_solve(c, cfg.maxent.alpha);
    } catch (const CertificateError& ex) {
        res["error"] = ex.what();
        res["alpha"] = cfg.maxent.alpha;
        write_run_json(out_path(ctx, "maxent.json"), "maxent", cfg.raw, tolerances_json(cfg.tol),
                       cfg.seed, res);
        std::cerr << "maxent: " << ex.what() << "\n";
        return kMathFailure;
    }

    std::vector<double> canonical = canonical_distribution(c);
    FreeEnergyReport fe = free_energy_check(c, canonical, cfg.maxent.grid_step);

    double lo = *std::min_element(c.a.begin(), c.a.end());
    double hi = *std::max_element(c.a.begin(), c.a.end());
    double feas = cfg.maxent.feas_tol > 0.0 ? cfg.maxent.feas_tol : 0.01 * (hi - lo);
    nlohmann::json grid = nlohmann::json::object();
    if (c.d() <= 4) {
        SimplexGridBest gb =
            simplex_grid_best_entropy(c.a, cfg.maxent.alpha, feas, cfg.maxent.grid_step);
        grid["feasible_count"] = gb.feasible_count;
        grid["found"] = gb.found;
        if (gb.found) {
            grid["best_entropy"] = gb.best_entropy;
            grid["solution_beats_grid_by"] = sol.entropy_value - gb.best_entropy;
        }
        grid["feas_tol"] = feas;
    }

    res["alpha"] = cfg.maxent.alpha;
    res["beta_found"] = sol.beta;
    res["p"] = sol.p;
    res["achieved_mean"] = sol.achieved_mean;
    res["entropy"] = sol.entropy_value;
    res["canonical"] = {{"beta", c.beta},
                        {"p", canonical},
                        {"free_energy", fe.value},
                        {"minus_logZ_over_beta", fe.canonical_value},
                        {"grid_min_free_energy", fe.grid_min},
                        {"minimality_gap", fe.minimality_gap}};
    res["grid"] = grid;
    write_run_json(out_path(ctx, "maxent.json"), "maxent", cfg.raw, tolerances_json(cfg.tol),
                   cfg.seed, res);
    return kOk;
}

int run_command(const std::string& command, const RunContext& ctx) {
    ensure_dir(ctx.out_dir);
    if (command == "admissibility") return cmd_admissibility(ctx);
    if (command == "spectrum") return cmd_spectrum(ctx);
    if (command == "pressure") return cmd_pressure(ctx);
    if (command == "sweep") return cmd_sweep(ctx);
    if (command == "grandstats") return cmd_grandstats(ctx);
    if (command == "maxent") return cmd_maxent(ctx);
    throw ConfigError("unknown subcommand '" + command + "'");
}

} // namespace gcf::cli

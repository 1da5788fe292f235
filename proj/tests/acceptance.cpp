// Acceptance suite: one criterion per block, one pass/fail line each, all
// tolerances pinned in code. Returns nonzero when any criterion fails.
#include "gcf/grandstats.hpp"
#include "gcf/potentials.hpp"
#include "gcf/symbolic.hpp"
#include "gcf/thermo.hpp"
#include "gcf/transfer.hpp"

#include "oracles.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

using namespace gcf;

namespace {

struct Harness {
    int failures = 0;

    void report(int id, const std::string& what, bool pass, const std::string& detail) {
        std::printf("[%s] criterion %2d: %s (%s)\n", pass ? "PASS" : "FAIL", id, what.c_str(),
                    detail.c_str());
        if (!pass) ++failures;
    }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

PotentialFamily zero_family() { return constant_family(0.0, -0.5, 0.0); }

/// Lipschitz family with variation at every depth: A_N = a N + b + E,
/// E(w) = sum_i w_i 2^{-i}. Lip(E) <= 2(r-1).
PotentialFamily dyadic_family(int r, double a, double b) {
    PotentialFamily f;
    f.eval = [a, b](long n, const Word& w) {
        double e = 0.0;
        for (int i = 0; i < w.length(); ++i)
            e += static_cast<double>(w.symbols[static_cast<std::size_t>(i)]) *
                 std::ldexp(1.0, -(i + 1));
        return a * static_cast<double>(n) + b + e;
    };
    f.lip_bound = 2.0 * (r - 1);
    f.kprime = a;
    f.delta = 0.5 * b;
    f.label = "dyadic";
    return f;
}

CylinderFunction log_table(const CylinderFunction& f) {
    std::vector<double> v(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) v[i] = std::log(f[i]);
    return CylinderFunction(f.alphabet_size(), f.depth(), std::move(v));
}

} // namespace

int main() {
    Harness h;
    auto suite_start = std::chrono::steady_clock::now();

    { // 1. closed-form grand eigenvalue
        auto t0 = std::chrono::steady_clock::now();
        WeightSystem ws = finite_weights(zero_family(), 1.0, -1.0, 2, 3, 1e-12);
        SpectralSolution sol = power_iterate(assemble_grand(ws));
        double elapsed = seconds_since(t0);
        double target = 3.1639534137386528; // 2/(1-e^-1)
        double err = std::abs(sol.lambda - target);
        h.report(1, "closed-form grand eigenvalue 2/(1-e^-1)",
                 sol.converged && err <= 1e-8 && elapsed < 1.0,
                 "err=" + fmt(err) + ", time=" + fmt(elapsed) + "s");
    }

    { // 2. dense-oracle equivalence on 20 randomized two-symbol potentials
        auto t0 = std::chrono::steady_clock::now();
        double max_lambda_err = 0.0, max_vec_err = 0.0;
        bool all_ok = true;
        for (int i = 0; i < 20; ++i) {
            int r = i % 2 ? 3 : 2;
            oracle::RandomFamily rf =
                oracle::random_two_symbol_family(1000 + static_cast<std::uint64_t>(i), r);
            WeightSystem ws = finite_weights(rf.fam, rf.beta, rf.mu, r, 2, 1e-12);
            TransferMatrix T = assemble_grand(ws);
            SpectralSolution sol = power_iterate(T, {1e-13, 500000});
            all_ok = all_ok && sol.converged;
            oracle::PerronData od = oracle::dense_perron(oracle::dense_from_transfer(T));
            max_lambda_err = std::max(max_lambda_err, std::abs(sol.lambda - od.lambda));
            double hmax = 0.0;
            for (std::size_t k = 0; k < sol.h.size(); ++k) hmax = std::max(hmax, sol.h[k]);
            for (std::size_t k = 0; k < sol.h.size(); ++k) {
                max_vec_err = std::max(max_vec_err, std::abs(sol.h[k] / hmax - od.right[k]));
                max_vec_err = std::max(max_vec_err, std::abs(sol.nu[k] - od.left[k]));
            }
        }
        double elapsed = seconds_since(t0);
        h.report(2, "dense-oracle equivalence, 20 randomized two-symbol systems",
                 all_ok && max_lambda_err <= 1e-10 && max_vec_err <= 1e-8 && elapsed < 10.0,
                 "lambda_err=" + fmt(max_lambda_err) + ", vec_err=" + fmt(max_vec_err) +
                     ", time=" + fmt(elapsed) + "s");
    }

    { // 3. partition-limit with the O(1/n) envelope
        bool ok = true;
        double worst_dev50 = 0.0, worst_ratio = 0.0;
        for (int r : {2, 3}) {
            oracle::RandomFamily rf =
                oracle::random_two_symbol_family(47 + static_cast<std::uint64_t>(r), r, 0.2);
            WeightSystem ws = finite_weights(rf.fam, rf.beta, rf.mu, r, 2, 1e-12);
            TransferMatrix T = assemble_grand(ws);
            SpectralSolution sol = power_iterate(T, {1e-13, 500000});
            double log_lambda = std::log(sol.lambda);
            PartitionSequence seq = partition_iterate(T, 100, 0);
            double dev50 = std::abs(seq.seq[49] - log_lambda);
            double dev100 = std::abs(seq.seq[99] - log_lambda);
            ok = ok && sol.converged && dev50 <= 1e-3 && dev100 <= 0.6 * dev50;
            worst_dev50 = std::max(worst_dev50, dev50);
            if (dev50 > 0.0) worst_ratio = std::max(worst_ratio, dev100 / dev50);
        }
        h.report(3, "partition limit (1/n) log Z^n -> log lambda",
                 ok, "dev50=" + fmt(worst_dev50) + ", ratio=" + fmt(worst_ratio));
    }

    { // 4. pressure identity and the entropy witness bound
        bool ok = true;
        double worst_gap = 0.0;
        for (int r : {2, 3}) {
            oracle::RandomFamily rf =
                oracle::random_two_symbol_family(500 + static_cast<std::uint64_t>(r), r);
            WeightSystem ws = finite_weights(rf.fam, rf.beta, rf.mu, r, 2, 1e-12);
            GrandPotential gp = grand_potential(rf.fam, rf.beta, rf.mu, r, 2, 1e-12);
            SpectralSolution sol = power_iterate(assemble_grand(ws), {1e-13, 500000});
            EquilibriumResult eq = equilibrium_holonomic(sol, ws);
            EntropyOptions opt;
            opt.max_iter = 30000;
            opt.seed = static_cast<std::uint64_t>(r);
            PressureReport rep = grand_pressure(sol, log_table(gp.psi), eq.measure, opt);
            ok = ok && sol.converged && rep.identity_gap <= 1e-3;
            worst_gap = std::max(worst_gap, rep.identity_gap);
        }

        std::mt19937_64 rng(4100);
        bool bound_ok = true;
        for (int trial = 0; trial < 100; ++trial) {
            int r = trial % 2 ? 3 : 2;
            int depth = 1 + trial % 3;
            auto [base, kernel] = oracle::random_holonomic_parts(rng, r, depth);
            HolonomicMeasure m(CylinderMeasure(r, depth, std::move(base), false).normalized(),
                               std::move(kernel));
            EntropyOptions opt;
            opt.restarts = 2;
            opt.max_iter = 1500;
            opt.seed = static_cast<std::uint64_t>(trial);
            EntropyResult ent = variational_entropy(m, opt);
            bound_ok = bound_ok && ent.h_v <= std::log(static_cast<double>(r));
        }
        h.report(4, "pressure identity gap and h_v <= log r on 100 holonomic measures",
                 ok && bound_ok, "max_gap=" + fmt(worst_gap) + ", witness bound " +
                                 (bound_ok ? "held" : "violated"));
    }

    { // 5. derivative identity with quadratic step decay
        PowerConfig tight{1e-14, 1000000};
        oracle::RandomFamily rf = oracle::random_two_symbol_family(229, 2);
        DerivativeIdentity d = derivative_identity(rf.fam, 1, 1.0, 2, 2, 1e-4, tight);
        DerivativeIdentity dh = derivative_identity(rf.fam, 1, 1.0, 2, 2, 5e-5, tight);
        bool ok = d.gap <= 1e-4 && dh.gap * 3.5 <= d.gap;
        h.report(5, "derivative identity vs -int A d rho", ok,
                 "gap(1e-4)=" + fmt(d.gap) + ", gap(5e-5)=" + fmt(dh.gap));
    }

    { // 6. finite/countable equivalence, entrywise within the tail certificate
        double worst = 0.0;
        bool ok = true;
        for (int i = 0; i < 20; ++i) {
            int r = i % 2 ? 3 : 2;
            oracle::RandomFamily rf =
                oracle::random_two_symbol_family(1000 + static_cast<std::uint64_t>(i), r);
            WeightSystem fin = finite_weights(rf.fam, rf.beta, rf.mu, r, 2, 1e-12);
            WeightSystem cnt = countable_weights(rf.fam, rf.beta, rf.mu, r, 2, 1e-12);
            auto grouped = regroup_countable(cnt);
            for (int a = 0; a < r; ++a)
                for (std::size_t w = 0; w < grouped[static_cast<std::size_t>(a)].size(); ++w) {
                    double diff = std::abs(grouped[static_cast<std::size_t>(a)][w] -
                                           fin.tables[static_cast<std::size_t>(a)][w]);
                    worst = std::max(worst, diff);
                    ok = ok && diff <= 1e-12;
                }
        }
        h.report(6, "finite/countable weight resummation", ok, "max_entry_diff=" + fmt(worst));
    }

    { // 7. countable-IFS pressure via inf over m <= 12, plus subadditivity
        bool ok = true;
        double worst_gap = 0.0;
        for (int r : {2, 3}) {
            oracle::RandomFamily rf =
                oracle::random_two_symbol_family(700 + static_cast<std::uint64_t>(r), r, 0.1);
            rf.beta = 0.75;
            WeightSystem cnt = countable_weights(rf.fam, rf.beta, rf.mu, r, 2, 1e-12);
            int n = r == 2 ? 12 : 10;
            CountablePartitionResult cp = countable_partition(cnt, n, 5e8);
            for (int m = 1; m <= n; ++m)
                for (int l = 1; m + l <= n; ++l)
                    ok = ok && cp.log_z[static_cast<std::size_t>(m + l - 1)] <=
                                   cp.log_z[static_cast<std::size_t>(m - 1)] +
                                       cp.log_z[static_cast<std::size_t>(l - 1)] + 1e-12;
            WeightSystem fin = finite_weights(rf.fam, rf.beta, rf.mu, r, 2, 1e-12);
            SpectralSolution sol = power_iterate(assemble_grand(fin), {1e-13, 500000});
            double gap = std::abs(cp.inf_pressure - std::log(sol.lambda));
            worst_gap = std::max(worst_gap, gap);
            ok = ok && sol.converged && gap <= 5e-2;
        }
        h.report(7, "countable-IFS pressure inf_(m<=12) and subadditivity", ok,
                 "max_gap=" + fmt(worst_gap));
    }

    { // 8. Lipschitz/Dini bounds on log-weights
        bool ok = true;
        double worst_excess = -1e300, worst_quad = -1e300;
        std::vector<double> grid;
        for (int i = 1; i <= 128; ++i) grid.push_back(static_cast<double>(i) / 128.0);
        auto check_fixture = [&](const PotentialFamily& fam, double beta, double mu, int r,
                                 int depth) {
            WeightSystem ws = finite_weights(fam, beta, mu, r, depth, 1e-12);
            double bound = beta * fam.lip_bound / 2.0 +
                           fam.lip_bound * std::ldexp(1.0, -depth);
            for (const auto& q : ws.tables) {
                double lip = discrete_lipschitz(log_table(q));
                worst_excess = std::max(worst_excess, lip - bound);
                ok = ok && lip <= bound;
            }
            DiniReport rep = dini_modulus_check(ws, grid);
            double qbound = beta * fam.lip_bound / 2.0 + 1e-6;
            worst_quad = std::max(worst_quad, rep.integral - qbound);
            ok = ok && rep.integral <= qbound;
        };
        for (int i = 0; i < 20; ++i) {
            int r = i % 2 ? 3 : 2;
            oracle::RandomFamily rf =
                oracle::random_two_symbol_family(1000 + static_cast<std::uint64_t>(i), r);
            check_fixture(rf.fam, rf.beta, rf.mu, r, 4);
        }
        check_fixture(dyadic_family(2, 0.5, 0.1), 1.0, -1.0, 2, 6);
        check_fixture(dyadic_family(3, 0.75, 0.2), 1.25, -0.75, 3, 4);
        h.report(8, "log-weight Lipschitz and Dini-integral bounds", ok,
                 "max_lip_excess=" + fmt(worst_excess) + ", max_quad_excess=" + fmt(worst_quad));
    }

    { // 9. grand statistics of the energy-1 ensemble
        GrandCanonicalEnsemble e;
        e.energy = [](long n) { return static_cast<double>(n); };
        e.beta = 1.0;
        e.mu = -1.0;
        e.kprime = 0.5;
        e.delta = 0.0;
        e.eps = 1e-13;
        double z = grand_partition(e);
        MomentSet m = moments(e);
        ParticleDistribution dist = particle_distribution(e);
        LogPartitionDerivatives der = log_partition_derivatives(e, 1e-4);
        double zerr = std::abs(z - 1.1565176427496657);
        double nerr = std::abs(m.mean_n - 0.15651764274966565);
        double psum = 0.0;
        for (double x : dist.p) psum += x;
        bool ok = zerr <= 1e-10 && nerr <= 1e-10 && der.gap_beta <= 1e-6 && der.gap_mu <= 1e-6 &&
                  std::abs(psum - 1.0) <= 1e-12;
        h.report(9, "grand statistics of the energy-1 ensemble", ok,
                 "Z_err=" + fmt(zerr) + ", N_err=" + fmt(nerr) + ", gaps=" + fmt(der.gap_beta) +
                     "/" + fmt(der.gap_mu) + ", sum_defect=" + fmt(std::abs(psum - 1.0)));
    }

    { // 10. MaxEnt vs the simplex-grid oracle
        std::mt19937_64 rng(1010);
        std::uniform_real_distribution<double> av(0.0, 2.0);
        std::uniform_real_distribution<double> frac(0.15, 0.85);
        bool ok = true;
        double worst_beat = 1e300, worst_fcons = 0.0;
        for (int trial = 0; trial < 10; ++trial) {
            std::vector<double> a{av(rng), av(rng), av(rng)};
            double lo = std::min({a[0], a[1], a[2]}), hi = std::max({a[0], a[1], a[2]});
            if (hi - lo < 0.1) {
                a[0] = lo;
                a[2] = lo + 1.0;
                hi = lo + 1.0;
            }
            double alpha = lo + (hi - lo) * frac(rng);
            FiniteCanonical c{a, 1.0};
            MaxEntSolution sol = maxent_solve(c, alpha);
            SimplexGridBest gb = simplex_grid_best_entropy(a, alpha, 0.01 * (hi - lo), 0.01);
            if (gb.found) {
                double beat = sol.entropy_value - (gb.best_entropy - 2e-2);
                worst_beat = std::min(worst_beat, beat);
                ok = ok && beat >= 0.0;
            }
            FreeEnergyReport fe = free_energy_check(c, canonical_distribution(c));
            double fcons = std::abs(fe.value - fe.canonical_value);
            worst_fcons = std::max(worst_fcons, fcons);
            ok = ok && fcons <= 1e-10;
        }
        h.report(10, "MaxEnt bisection vs simplex-grid oracle", ok,
                 "min_margin=" + fmt(worst_beat) + ", max_F_gap=" + fmt(worst_fcons));
    }

    { // 11. refinement stability across depths 4..10
        bool ok = true;
        double worst_ratio = 0.0;
        PotentialFamily fam = dyadic_family(2, 0.5, 0.1);
        double beta = 1.0, mu = -1.0;
        std::vector<double> lambdas;
        for (int k = 4; k <= 10; ++k) {
            WeightSystem ws = finite_weights(fam, beta, mu, 2, k, 1e-12);
            SpectralSolution sol = power_iterate(assemble_grand(ws), {1e-12, 500000});
            ok = ok && sol.converged;
            lambdas.push_back(std::log(sol.lambda));
        }
        for (int k = 4; k <= 9; ++k) {
            double diff = std::abs(lambdas[static_cast<std::size_t>(k - 4)] -
                                   lambdas[static_cast<std::size_t>(k - 3)]);
            double bound = beta * fam.lip_bound * std::ldexp(1.0, -k);
            worst_ratio = std::max(worst_ratio, diff / bound);
            ok = ok && diff <= bound;
        }
        double total = seconds_since(suite_start);
        ok = ok && total < 120.0;
        h.report(11, "refinement stability |log lambda(k) - log lambda(k+1)| <= beta M 2^-k", ok,
                 "max_diff/bound=" + fmt(worst_ratio) + ", suite_time=" + fmt(total) + "s");
    }

    std::printf("%d/11 criteria passed\n", 11 - h.failures);
    return h.failures == 0 ? 0 : 1;
}

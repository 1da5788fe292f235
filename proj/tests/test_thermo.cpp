#include "gcf/thermo.hpp"

#include "gcf/errors.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace gcf;

namespace {

constexpr double kLog2 = 0.6931471805599453;
constexpr double kLogLambda0 = 1.1518223259470272;  // log(2/(1-e^-1))
constexpr double kLogPsi0 = 0.45867514538708189;    // log(1/(1-e^-1))

PotentialFamily zero_family() { return constant_family(0.0, -0.5, 0.0); }

HolonomicMeasure random_holonomic(std::mt19937_64& rng, int r, int depth) {
    auto [base, kernel] = oracle::random_holonomic_parts(rng, r, depth);
    return HolonomicMeasure(CylinderMeasure(r, depth, std::move(base), false).normalized(),
                            std::move(kernel));
}

} // namespace

TEST_CASE("classical_pressure: closed forms and monotonicity in beta") {
    CHECK(classical_pressure(zero_family(), 0, 1.0, 2, 2) ==
          doctest::Approx(kLog2).epsilon(1e-11));

    // A_N = c: P = log r - beta c
    PotentialFamily c = constant_family(0.8, -0.5, 0.4);
    for (double beta : {0.5, 1.0, 2.0})
        CHECK(classical_pressure(c, 3, beta, 3, 2) ==
              doctest::Approx(std::log(3.0) - beta * 0.8).epsilon(1e-11));

    // strictly decreasing in beta for positive potentials, midpoint convexity
    oracle::RandomFamily rf = oracle::random_two_symbol_family(101, 2);
    std::vector<double> ps;
    for (double beta : {0.5, 0.75, 1.0, 1.25, 1.5})
        ps.push_back(classical_pressure(rf.fam, 1, beta, 2, 2, {1e-13, 200000}));
    for (std::size_t i = 1; i < ps.size(); ++i) CHECK(ps[i] < ps[i - 1]);
    for (std::size_t i = 1; i + 1 < ps.size(); ++i)
        CHECK(0.5 * (ps[i - 1] + ps[i + 1]) >= ps[i] - 1e-12); // convex
}

TEST_CASE("markov_variational_check: zero potential is exact") {
    MarkovCheckResult res = markov_variational_check(zero_family(), 0, 1.0, 2);
    CHECK(res.log_lambda == doctest::Approx(kLog2).epsilon(1e-13));
    CHECK(res.entropy == doctest::Approx(kLog2).epsilon(1e-13));
    CHECK(res.integral_a == doctest::Approx(0.0));
    CHECK(res.gap <= 1e-12);
}

TEST_CASE("markov_variational_check: first-symbol potential vs dense oracle") {
    // A(jw) = j: transfer matrix columns e^{-beta j}
    PotentialFamily fam;
    fam.eval = [](long, const Word& w) {
        return w.length() > 0 ? static_cast<double>(w.symbols[0]) : 0.0;
    };
    fam.lip_bound = 2.0;
    fam.kprime = -0.5;
    double beta = 1.0;
    MarkovCheckResult res = markov_variational_check(fam, 0, beta, 2);

    Eigen::MatrixXd M(2, 2);
    for (int w = 0; w < 2; ++w)
        for (int j = 0; j < 2; ++j) M(w, j) = std::exp(-beta * j);
    oracle::PerronData od = oracle::dense_perron(M);
    CHECK(res.log_lambda == doctest::Approx(std::log(od.lambda)).epsilon(1e-12));
    CHECK(res.gap <= 1e-10);

    // beta -> 0: pressure approaches log r
    MarkovCheckResult hot = markov_variational_check(fam, 0, 1e-8, 2);
    CHECK(hot.log_lambda == doctest::Approx(kLog2).epsilon(1e-7));
    CHECK(hot.entropy == doctest::Approx(kLog2).epsilon(1e-7));
}

TEST_CASE("markov_variational_check rejects deeper potentials") {
    PotentialFamily deep;
    deep.eval = [](long, const Word& w) {
        return w.length() > 2 ? 0.3 * w.symbols[2] : 0.0;
    };
    CHECK_THROWS_AS(markov_variational_check(deep, 0, 1.0, 2), DomainError);
}

TEST_CASE("equilibrium_holonomic: constant weights give the uniform measure") {
    WeightSystem ws = finite_weights(zero_family(), 1.0, -1.0, 2, 3, 1e-12);
    SpectralSolution sol = power_iterate(assemble_grand(ws));
    EquilibriumResult eq = equilibrium_holonomic(sol, ws);
    CHECK(eq.max_row_defect <= 1e-9);
    for (std::size_t w = 0; w < eq.measure.base.size(); ++w) {
        CHECK(eq.measure.base[w] == doctest::Approx(1.0 / 8.0).epsilon(1e-9));
        for (int j = 0; j < 2; ++j)
            CHECK(eq.measure.kernel[static_cast<std::size_t>(j)][w] ==
                  doctest::Approx(0.5).epsilon(1e-9));
    }
}

TEST_CASE("equilibrium_holonomic: row defects track the eigen-residual") {
    oracle::RandomFamily rf = oracle::random_two_symbol_family(207, 3);
    WeightSystem ws = finite_weights(rf.fam, rf.beta, rf.mu, 3, 2, 1e-12);
    double tol = 1e-11;
    SpectralSolution sol = power_iterate(assemble_grand(ws), {tol, 200000});
    REQUIRE(sol.converged);
    EquilibriumResult eq = equilibrium_holonomic(sol, ws);
    CHECK(eq.max_row_defect <= 10 * tol);
    CHECK(holonomy_check(eq.measure, CylinderFunction::constant(3, 2, 1.0)) == 0.0);

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> val(-1.0, 1.0);
    std::vector<double> gv(ws.tables[0].size());
    for (double& x : gv) x = val(rng);
    CHECK(holonomy_check(eq.measure, CylinderFunction(3, 2, std::move(gv))) <= 1e-8);

    // defect stays below 1e-8 on the full indicator basis
    for (std::size_t cell = 0; cell < ws.tables[0].size(); ++cell) {
        std::vector<double> ind(ws.tables[0].size(), 0.0);
        ind[cell] = 1.0;
        CHECK(holonomy_check(eq.measure, CylinderFunction(3, 2, std::move(ind))) <= 1e-8);
    }
}

TEST_CASE("holonomy_check: perturbed kernels are detected") {
    oracle::RandomFamily rf = oracle::random_two_symbol_family(209, 2);
    WeightSystem ws = finite_weights(rf.fam, rf.beta, rf.mu, 2, 2, 1e-12);
    SpectralSolution sol = power_iterate(assemble_grand(ws), {1e-12, 200000});
    EquilibriumResult eq = equilibrium_holonomic(sol, ws);

    auto kernel = eq.measure.kernel;
    kernel[0][1] += 0.2;
    kernel[1][1] -= 0.2;
    HolonomicMeasure tampered(eq.measure.base, std::move(kernel));
    // indicator of the cell reached by branch 0 from word 1
    std::vector<double> ind(4, 0.0);
    ind[branch_target(0, 1, 2, 2)] = 1.0;
    CHECK(holonomy_check(tampered, CylinderFunction(2, 2, std::move(ind))) > 1e-3);
}

TEST_CASE("variational_entropy: uniform equilibrium of the zero potential") {
    WeightSystem ws = finite_weights(zero_family(), 1.0, -1.0, 2, 2, 1e-12);
    SpectralSolution sol = power_iterate(assemble_grand(ws));
    EquilibriumResult eq = equilibrium_holonomic(sol, ws);
    EntropyResult ent = variational_entropy(eq.measure);
    CHECK(ent.h_v == doctest::Approx(kLog2).epsilon(1e-8));
    CHECK(ent.h_v <= kLog2 + 1e-15);
}

TEST_CASE("variational_entropy: witness bound holds for arbitrary holonomic measures") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 20; ++trial) {
        int r = trial % 2 ? 2 : 3;
        int depth = 1 + trial % 3;
        HolonomicMeasure m = random_holonomic(rng, r, depth);
        EntropyOptions opt;
        opt.seed = static_cast<std::uint64_t>(trial);
        opt.max_iter = 2000;
        EntropyResult ent = variational_entropy(m, opt);
        CHECK(ent.h_v <= std::log(static_cast<double>(r)) + 1e-15);
    }
}

TEST_CASE("variational_entropy matches the chain entropy of a Markov equilibrium") {
    oracle::RandomFamily rf = oracle::random_two_symbol_family(219, 2);
    long n = 1;
    MarkovCheckResult chain = markov_variational_check(rf.fam, n, rf.beta, 2);

    // equilibrium of the classical operator at depth 2 (exact for two symbols)
    TransferMatrix T = assemble_classical(rf.fam, n, rf.beta, 2, 2);
    SpectralSolution sol = power_iterate(T, {1e-13, 200000});
    WeightSystem pseudo;
    pseudo.kind = WeightKind::Finite;
    pseudo.r = 2;
    pseudo.depth = 2;
    pseudo.beta = rf.beta;
    pseudo.mu = rf.mu;
    for (int j = 0; j < 2; ++j)
        pseudo.tables.emplace_back(2, 2, T.coeff[static_cast<std::size_t>(j)]);
    EquilibriumResult eq = equilibrium_holonomic(sol, pseudo);
    EntropyResult ent = variational_entropy(eq.measure);
    CHECK(ent.h_v == doctest::Approx(chain.entropy).epsilon(1e-3));
}

TEST_CASE("grand_pressure: constant-zero closed forms") {
    WeightSystem ws = finite_weights(zero_family(), 1.0, -1.0, 2, 2, 1e-12);
    GrandPotential gp = grand_potential(zero_family(), 1.0, -1.0, 2, 2, 1e-12);
    SpectralSolution sol = power_iterate(assemble_grand(ws), {1e-12, 200000});
    EquilibriumResult eq = equilibrium_holonomic(sol, ws);
    CylinderFunction log_psi(2, 2, [&] {
        std::vector<double> v(gp.psi.size());
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::log(gp.psi[i]);
        return v;
    }());
    PressureReport rep = grand_pressure(sol, log_psi, eq.measure);
    CHECK(rep.log_lambda == doctest::Approx(kLogLambda0).epsilon(1e-10));
    CHECK(rep.int_log_psi == doctest::Approx(kLogPsi0).epsilon(1e-10));
    CHECK(rep.h_v == doctest::Approx(kLog2).epsilon(1e-7));
    CHECK(rep.identity_gap <= 1e-6);
}

TEST_CASE("grand_pressure: psi = 1 degenerate case reduces to h_v = log lambda") {
    PotentialFamily single;
    single.eval = [](long n, const Word&) { return n == 0 ? 0.0 : 900.0 + static_cast<double>(n); };
    single.kprime = 0.0;
    single.delta = 0.0;
    WeightSystem ws = finite_weights(single, 1.0, -1.0, 2, 2, 1e-12);
    GrandPotential gp = grand_potential(single, 1.0, -1.0, 2, 2, 1e-12);
    SpectralSolution sol = power_iterate(assemble_grand(ws), {1e-12, 200000});
    EquilibriumResult eq = equilibrium_holonomic(sol, ws);
    CylinderFunction log_psi(2, 2, [&] {
        std::vector<double> v(gp.psi.size());
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::log(gp.psi[i]);
        return v;
    }());
    PressureReport rep = grand_pressure(sol, log_psi, eq.measure);
    CHECK(rep.int_log_psi == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(rep.h_v == doctest::Approx(rep.log_lambda).epsilon(1e-6));
    CHECK(rep.log_lambda == doctest::Approx(kLog2).epsilon(1e-10));
}

TEST_CASE("grand_pressure: identity gap on an exact two-symbol fixture") {
    oracle::RandomFamily rf = oracle::random_two_symbol_family(223, 2);
    WeightSystem ws = finite_weights(rf.fam, rf.beta, rf.mu, 2, 2, 1e-12);
    GrandPotential gp = grand_potential(rf.fam, rf.beta, rf.mu, 2, 2, 1e-12);
    SpectralSolution sol = power_iterate(assemble_grand(ws), {1e-13, 200000});
    EquilibriumResult eq = equilibrium_holonomic(sol, ws);
    CylinderFunction log_psi(2, 2, [&] {
        std::vector<double> v(gp.psi.size());
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::log(gp.psi[i]);
        return v;
    }());
    EntropyOptions opt;
    opt.max_iter = 30000;
    PressureReport rep = grand_pressure(sol, log_psi, eq.measure, opt);
    CHECK(rep.identity_gap <= 1e-3);

    // sup characterization: non-equilibrium holonomic measures stay below
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 5; ++trial) {
        HolonomicMeasure m = random_holonomic(rng, 2, 2);
        EntropyOptions o2;
        o2.seed = static_cast<std::uint64_t>(trial);
        EntropyResult ent = variational_entropy(m, o2);
        double value = ent.h_v + m.base.integrate(log_psi);
        CHECK(value <= rep.log_lambda + 1e-6);
    }
}

TEST_CASE("derivative_identity: constants and quadratic step decay") {
    // A_N = c: both sides equal -c; the gap decays at O(s^2)
    PotentialFamily c = constant_family(0.7, -0.5, 0.3);
    DerivativeIdentity d1 = derivative_identity(c, 2, 1.0, 2, 2, 1e-2, {1e-13, 200000});
    CHECK(d1.rhs == doctest::Approx(-0.7).epsilon(1e-12));
    CHECK(d1.gap <= 1e-4);
    DerivativeIdentity d2 = derivative_identity(c, 2, 1.0, 2, 2, 5e-3, {1e-13, 200000});
    CHECK(d2.gap <= d1.gap / 3.5);

    DerivativeIdentity z = derivative_identity(zero_family(), 0, 1.0, 2, 2, 1e-3);
    CHECK(z.lhs == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(z.rhs == 0.0);
}

TEST_CASE("derivative_identity: two-symbol fixture at the stated step") {
    oracle::RandomFamily rf = oracle::random_two_symbol_family(229, 2);
    PowerConfig tight{1e-14, 1000000};
    DerivativeIdentity d = derivative_identity(rf.fam, 1, 1.0, 2, 2, 1e-4, tight);
    CHECK(d.gap <= 1e-4);
    DerivativeIdentity dh = derivative_identity(rf.fam, 1, 1.0, 2, 2, 5e-5, tight);
    CHECK(dh.gap <= d.gap / 3.5);
    DerivativeIdentity dq = derivative_identity(rf.fam, 1, 1.0, 2, 2, 2.5e-5, tight);
    CHECK(dq.gap <= dh.gap / 3.5);
}

TEST_CASE("analyticity_sweep: constant family matches the closed form") {
    double c = 0.4;
    PotentialFamily fam = constant_family(c, -0.5, 0.2);
    std::vector<double> betas{0.5, 0.75, 1.0, 1.25, 1.5};
    std::vector<double> mus{-1.5, -1.25, -1.0, -0.75};
    SweepResult sw = analyticity_sweep(fam, betas, mus, 2, 2, 1e-12);

    auto closed = [&](double beta, double mu) {
        return std::log(2.0) - beta * c - std::log(1.0 - std::exp(beta * mu));
    };
    for (std::size_t ib = 0; ib < betas.size(); ++ib)
        for (std::size_t im = 0; im < mus.size(); ++im) {
            const SweepNode& n = sw.node(ib, im);
            REQUIRE(n.admissible);
            CHECK(n.log_lambda == doctest::Approx(closed(n.beta, n.mu)).epsilon(1e-9));
            CHECK(n.rate <= 1e-6); // constant weights converge in one step
        }

    // smoothness diagnostics match the ones of the closed form on this grid
    {
        double step_beta = 0.0, step_mu = 0.0;
        for (std::size_t im = 0; im < mus.size(); ++im) {
            std::vector<double> d2;
            for (std::size_t ib = 0; ib + 2 < betas.size(); ++ib) {
                double a = (closed(betas[ib + 1], mus[im]) - closed(betas[ib], mus[im])) /
                           (betas[ib + 1] - betas[ib]);
                double b = (closed(betas[ib + 2], mus[im]) - closed(betas[ib + 1], mus[im])) /
                           (betas[ib + 2] - betas[ib + 1]);
                d2.push_back((b - a) / (betas[ib + 2] - betas[ib]));
            }
            for (std::size_t i = 1; i < d2.size(); ++i)
                step_beta = std::max(step_beta, std::abs(d2[i] - d2[i - 1]));
        }
        for (std::size_t ib = 0; ib < betas.size(); ++ib) {
            std::vector<double> d2;
            for (std::size_t im = 0; im + 2 < mus.size(); ++im) {
                double a = (closed(betas[ib], mus[im + 1]) - closed(betas[ib], mus[im])) /
                           (mus[im + 1] - mus[im]);
                double b = (closed(betas[ib], mus[im + 2]) - closed(betas[ib], mus[im + 1])) /
                           (mus[im + 2] - mus[im + 1]);
                d2.push_back((b - a) / (mus[im + 2] - mus[im]));
            }
            for (std::size_t i = 1; i < d2.size(); ++i)
                step_mu = std::max(step_mu, std::abs(d2[i] - d2[i - 1]));
        }
        CHECK(sw.max_d2_step_beta == doctest::Approx(step_beta).epsilon(1e-6));
        CHECK(sw.max_d2_step_mu == doctest::Approx(step_mu).epsilon(1e-6));
    }

    // divided differences agree with those of the closed form within 1e-6
    for (std::size_t im = 0; im < mus.size(); ++im)
        for (std::size_t ib = 0; ib + 1 < betas.size(); ++ib) {
            double expect = (closed(betas[ib + 1], mus[im]) - closed(betas[ib], mus[im])) /
                            (betas[ib + 1] - betas[ib]);
            CHECK(sw.d1_beta[ib * mus.size() + im] == doctest::Approx(expect).epsilon(1e-6));
        }
    for (std::size_t ib = 0; ib < betas.size(); ++ib)
        for (std::size_t im = 0; im + 1 < mus.size(); ++im) {
            double expect = (closed(betas[ib], mus[im + 1]) - closed(betas[ib], mus[im])) /
                            (mus[im + 1] - mus[im]);
            CHECK(sw.d1_mu[ib * mus.size() + im] == doctest::Approx(expect).epsilon(1e-6));
        }
}

TEST_CASE("analyticity_sweep: nodes near mu = 0 are flagged, not fatal") {
    PotentialFamily fam = constant_family(0.4, -0.3, 0.2);
    std::vector<double> mus{-1.0, -0.5, -0.2, -0.05};
    SweepResult sw = analyticity_sweep(fam, {1.0}, mus, 2, 2, 1e-12);
    CHECK_FALSE(sw.node(0, 3).admissible); // mu = -0.05 >= K' = -0.3
    CHECK_FALSE(sw.node(0, 2).admissible); // mu = -0.2  >= K'
    CHECK(sw.node(0, 0).admissible);
    CHECK(sw.node(0, 1).admissible);
    CHECK(sw.node(0, 1).converged);
    // lambda grows toward the mu -> 0 pole on the admissible side
    CHECK(sw.node(0, 1).lambda > sw.node(0, 0).lambda);
}

#pragma once

#include "gcf/potentials.hpp"
#include "gcf/symbolic.hpp"
#include "gcf/transfer.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace gcf {

/// A holonomic probability in disintegrated one-step form: a base measure on
/// depth-k cylinders plus per-word branch probabilities p_j(w). Kernel rows
/// sum to 1 within 1e-12 (validated at construction).
struct HolonomicMeasure {
    CylinderMeasure base;
    std::vector<std::vector<double>> kernel; ///< kernel[j][w]

    HolonomicMeasure() = default;
    HolonomicMeasure(CylinderMeasure base_, std::vector<std::vector<double>> kernel_);

    int alphabet_size() const { return base.alphabet_size(); }
    int depth() const { return base.depth(); }
};

/// Equilibrium holonomic measure of a converged spectral solution:
/// base ~ h*nu normalized, kernel p_j = q_j * (h o phi_j) / (lambda h).
struct EquilibriumResult {
    HolonomicMeasure measure;
    double max_row_defect = 0.0; ///< worst |row sum - 1| before renormalization
};
EquilibriumResult equilibrium_holonomic(const SpectralSolution& sol, const WeightSystem& weights);

/// Holonomy defect |int g(phi_{w1} x) dnu_hat - int g dnu| at the table level.
double holonomy_check(const HolonomicMeasure& m, const CylinderFunction& g);

struct EntropyOptions {
    int restarts = 5;        ///< u = 0 plus (restarts-1) random starts
    long max_iter = 10000;
    double grad_tol = 1e-10; ///< sup-norm stopping threshold on the gradient
    std::uint64_t seed = 0;
};

enum class EntropyStatus { Converged, IterationCap, LineSearchStall };

struct EntropyResult {
    double h_v = 0.0;            ///< min(best objective, log r)
    double best_objective = 0.0; ///< raw optimizer value
    EntropyStatus status = EntropyStatus::Converged;
    long iterations = 0;
    bool clamped = false;        ///< best objective exceeded the log r witness
};

/// Variational entropy: minimize F(g) = int log(B_1 g / g) d(base) over
/// positive depth-k cylinder functions g = exp(u) by gradient descent with
/// backtracking and multi-start. F is convex in u; F(0) = log r is the
/// guaranteed witness bound.
EntropyResult variational_entropy(const HolonomicMeasure& m, const EntropyOptions& opt = {});

struct PressureReport {
    double log_lambda = 0.0;
    double h_v = 0.0;
    double int_log_psi = 0.0;
    double identity_gap = 0.0; ///< |h_v + int log psi - log lambda|
    EntropyStatus entropy_status = EntropyStatus::Converged;
    /// optional classical rows (N, beta, P_N(beta))
    std::vector<std::array<double, 3>> classical_table;
};

/// P_N(beta) = log of the leading classical eigenvalue.
double classical_pressure(const PotentialFamily& fam, long n, double beta, int r, int depth,
                          const PowerConfig& cfg = {});

struct MarkovCheckResult {
    double gap = 0.0;       ///< |h(rho) - beta int A - log lambda|
    double entropy = 0.0;   ///< Kolmogorov-Sinai entropy of the depth-1 chain
    double integral_a = 0.0;
    double log_lambda = 0.0;
};

/// Variational-principle check on a two-symbol-measurable potential, where
/// the depth-1 reduction is an exact Markov chain (requires r <= 4).
MarkovCheckResult markov_variational_check(const PotentialFamily& fam, long n, double beta, int r);

/// Fills the pressure report for a converged grand-canonical solution and its
/// equilibrium measure.
PressureReport grand_pressure(const SpectralSolution& sol, const CylinderFunction& log_psi_depth,
                              const HolonomicMeasure& m, const EntropyOptions& opt = {});

struct DerivativeIdentity {
    double lhs = 0.0; ///< central difference of lambda / lambda(beta0)
    double rhs = 0.0; ///< -int A_N d rho at beta0
    double gap = 0.0;
};

DerivativeIdentity derivative_identity(const PotentialFamily& fam, long n, double beta0,
                                       int r, int depth, double step,
                                       const PowerConfig& cfg = {});

struct SweepNode {
    double beta = 0.0;
    double mu = 0.0;
    bool admissible = false;
    bool converged = false;
    double lambda = 0.0;
    double log_lambda = 0.0;
    double rate = 0.0; ///< spectral-gap estimate (power-iteration rate)
    long iterations = 0;
};

struct SweepResult {
    std::vector<double> betas;
    std::vector<double> mus;
    std::vector<SweepNode> nodes; ///< row-major: node(ib, im) = nodes[ib*mus.size()+im]
    /// divided differences of log lambda along each axis (NaN where undefined)
    std::vector<double> d1_beta, d2_beta, d1_mu, d2_mu;
    double max_abs_d2_beta = 0.0;
    double max_abs_d2_mu = 0.0;
    /// largest jump between adjacent second divided differences (smoothness proxy)
    double max_d2_step_beta = 0.0;
    double max_d2_step_mu = 0.0;

    const SweepNode& node(std::size_t ib, std::size_t im) const {
        return nodes[ib * mus.size() + im];
    }
};

/// lambda over a (beta, mu) grid with smoothness diagnostics. Nodes whose
/// parameters admit no tail certificate (mu >= K') are marked inadmissible
/// and skipped, not fatal.
SweepResult analyticity_sweep(const PotentialFamily& fam, std::vector<double> betas,
                              std::vector<double> mus, int r, int depth, double eps,
                              const PowerConfig& cfg = {});

} // namespace gcf

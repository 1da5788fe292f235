#pragma once

#include "gcf/symbolic.hpp"

#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace gcf {

/// A family of potentials indexed by particle number N, together with its
/// declared growth/regularity constants. The evaluator must accept words of
/// any finite length (tables pad/truncate internally) and be reentrant.
struct PotentialFamily {
    std::function<double(long, const Word&)> eval; ///< (N, word) -> value
    double lip_bound = 0.0;     ///< declared uniform Lipschitz bound M
    double kprime = 0.0;        ///< declared superlinear slope K'
    double delta = 0.0;         ///< declared offset, >= 0
    std::string label;

    double operator()(long n, const Word& w) const { return eval(n, w); }

    /// Depth-k table of A_N.
    CylinderFunction table(long n, int r, int depth) const;
};

/// A_N(w) = c for all N, w.
PotentialFamily constant_family(double c, double kprime, double delta);
/// A_N = N * E ("each particle has energy E(x)").
PotentialFamily per_particle_family(CylinderFunction energy, double kprime, double delta);
/// A_N = E / (N+1) (energy shared among N+1 slots).
PotentialFamily shared_family(CylinderFunction energy, double kprime, double delta);
/// A_N = a*N + b + E.
PotentialFamily affine_family(double a, double b, CylinderFunction energy,
                              double kprime, double delta);

enum class Verdict { Pass, Fail, Inconclusive };
std::string to_string(Verdict v);

struct H2RatioResult {
    double margin = 0.0;      ///< min over sampled N of A_{N+1}-A_N-mu
    bool monotone_ok = true;  ///< no decreasing step observed
    long first_violation = -1;
};

/// Outcome of the three assumption checks on a sampled window.
struct AdmissibilityReport {
    double h1_max_observed_lip = 0.0;
    double h2_root_margin = 0.0;             ///< worst case over depth-k words
    H2RatioResult h2_ratio;                  ///< filled when family flagged monotone
    bool ratio_checked = false;
    std::vector<std::pair<long, std::size_t>> h3_violations; ///< (N, word index)
    bool h3_nonstrict_ok = true;             ///< A_N >= K'N + delta - tol everywhere sampled
    long n_max_used = 0;
    int depth_used = 0;
    Verdict h1 = Verdict::Inconclusive;
    Verdict h2 = Verdict::Inconclusive;
    Verdict h3 = Verdict::Inconclusive;

    Verdict overall() const;
};

/// H1: max over N <= n_max of the discrete Lipschitz constant at this depth;
/// pass iff it does not exceed the declared bound.
double check_h1(const PotentialFamily& fam, int r, int depth, long n_max);

/// H2 root test: estimate of limsup A_N(w)/N minus mu, window [n_max/2, n_max].
double check_h2_root(const PotentialFamily& fam, double mu, const Word& w, long n_max);

/// H2 ratio (d'Alembert) test for families flagged monotone increasing in N.
H2RatioResult check_h2_ratio(const PotentialFamily& fam, double mu, const Word& w, long n_max);

/// H3: strict domination A_N(w) > K'N + delta on all sampled (N, word) pairs.
/// Also records whether the non-strict form holds (the tail certificate).
void check_h3(const PotentialFamily& fam, int r, int depth, long n_max,
              AdmissibilityReport& report);

/// Runs all checks and fills the verdicts. `monotone` enables the ratio test.
AdmissibilityReport run_admissibility(const PotentialFamily& fam, int r, int depth,
                                      long n_max, double mu, bool monotone = false);

/// Smallest N_max whose geometric tail bound
///   e^{-beta*delta} e^{-beta(K'-mu)(N_max+1)} / (1 - e^{-beta(K'-mu)})
/// is <= eps. Requires K' > mu.
long truncation_bound(const PotentialFamily& fam, double beta, double mu, double eps);
long truncation_bound(double kprime, double delta, double beta, double mu, double eps);

/// The grand-canonical potential psi at depth k with its tail certificate.
struct GrandPotential {
    CylinderFunction psi;
    double tail_bound = 0.0; ///< certified bound on the dropped tail
    long n_max = 0;          ///< largest particle number summed
};

/// psi(w) = sum_{N<=N_max} e^{-beta[A_N(w) - mu N]}, compensated ascending-N
/// summation; verifies the sampled non-strict domination backing the tail
/// certificate and strict positivity of every entry.
GrandPotential grand_potential(const PotentialFamily& fam, double beta, double mu,
                               int r, int depth, double eps);

enum class WeightKind { Finite, Countable };

/// IFS weight system. Finite kind: one positive weight table per branch
/// symbol, q_j = psi o phi_j. Countable kind: log-weight tables indexed by
/// j in {0..J_max} with branch j mod r and particle number xi(j) = j div r.
struct WeightSystem {
    WeightKind kind = WeightKind::Finite;
    int r = 2;
    int depth = 1;
    double beta = 1.0;
    double mu = -1.0;
    double tail_bound = 0.0;
    long n_max = 0;
    /// finite: tables[j] = q_j; countable: tables[j] = log-weight of branch j.
    std::vector<CylinderFunction> tables;
    /// declared Lipschitz bound of the family (for reporting/diagnostics).
    double family_lip = 0.0;

    std::size_t branch_count() const { return tables.size(); }
    long xi(std::size_t j) const { return static_cast<long>(j) / r; }
};

WeightSystem finite_weights(const PotentialFamily& fam, double beta, double mu,
                            int r, int depth, double eps);

/// J_max = r*(N_max+1)-1 so both representations cover the same N range.
WeightSystem countable_weights(const PotentialFamily& fam, double beta, double mu,
                               int r, int depth, double eps);

/// Regroups countable log-weights by branch symbol; equals the finite q_a
/// within the tail certificate.
std::vector<CylinderFunction> regroup_countable(const WeightSystem& countable);

struct DiniReport {
    double max_ratio = 0.0;       ///< max over grid of rho(log q_j, t)/t
    double integral = 0.0;        ///< trapezoid of rho/t over the grid
    double certified_bound = 0.0; ///< beta*M/2
};

/// Modulus-of-continuity scan of log q_j on the given t grid (finite kind).
DiniReport dini_modulus_check(const WeightSystem& weights, const std::vector<double>& t_grid);

struct HolderVariation {
    std::vector<double> v_n;  ///< V_1..V_{n_max}
    double v_alpha = 0.0;     ///< max over n
    bool summable = true;     ///< finite truncation certificate
    double tail_bound = 0.0;
};

/// alpha-Hoelder variation sequence of a countable weight family; exact
/// blockwise computation at the table's resolution (V_n = 0 for n > depth).
HolderVariation holder_variation(const WeightSystem& weights, int n_max,
                                 double alpha = 0.6931471805599453);

} // namespace gcf

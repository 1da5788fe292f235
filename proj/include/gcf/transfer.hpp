#pragma once

#include "gcf/potentials.hpp"
#include "gcf/symbolic.hpp"

#include <cstdint>
#include <vector>

namespace gcf {

enum class OperatorKind { ClassicalN, GrandCanonical };

/// Sparse transfer operator on depth-k cylinder functions. Row w has exactly
/// r entries: (Tf)(w) = sum_j coeff[j][w] * f(branch_target(j, w)). All
/// coefficients are strictly positive.
struct TransferMatrix {
    OperatorKind kind = OperatorKind::GrandCanonical;
    int r = 2;
    int depth = 1;
    long particle_number = -1; ///< N for the classical kind
    std::vector<std::vector<double>> coeff; ///< coeff[j][w]

    std::size_t size() const { return coeff.empty() ? 0 : coeff[0].size(); }
    std::size_t stride() const { return size() / static_cast<std::size_t>(r); }
    std::size_t target(int j, std::size_t w) const { return branch_target(j, w, r, stride()); }
};

/// Classical operator of A_N at inverse temperature beta. Coefficients are
/// e^{-beta A_N(jw)} with A_N evaluated on the full (k+1)-symbol preimage
/// word, so families measurable on k+1 symbols are represented exactly.
TransferMatrix assemble_classical(const PotentialFamily& fam, long n, double beta,
                                  int r, int depth);

/// Grand-canonical operator from a finite weight system; rejects any
/// non-positive weight entry.
TransferMatrix assemble_grand(const WeightSystem& weights);

CylinderFunction apply(const TransferMatrix& T, const CylinderFunction& f);

/// Action of the dual operator on cylinder measures (as raw weight vectors).
std::vector<double> apply_dual(const TransferMatrix& T, const std::vector<double>& nu);

struct PowerConfig {
    double tol = 1e-10;
    long max_iter = 100000;
};

/// Leading eigenvalue / eigenfunction / eigenmeasure data from normalized
/// primal and dual power iteration.
struct SpectralSolution {
    double lambda = 0.0;          ///< geometric mean of the converged ratios
    double lambda_dual = 0.0;     ///< B*nu(1) at the converged eigenmeasure
    CylinderFunction h;           ///< positive, scaled so nu(h) = 1
    CylinderMeasure nu;           ///< probability eigenmeasure
    double primal_residual = 0.0; ///< sup|Th - lambda h| / lambda
    double dual_residual = 0.0;   ///< total variation of (T*nu - lambda nu)/lambda
    double lambda_spread = 0.0;   ///< (max ratio - min ratio)/lambda at exit
    double rate = 0.0;            ///< estimated |lambda_2|/lambda_1
    long iterations_primal = 0;
    long iterations_dual = 0;
    bool converged = false;
};

SpectralSolution power_iterate(const TransferMatrix& T, const PowerConfig& cfg = {});

/// B*nu(1) for a converged dual fixed point; must match the primal lambda
/// within combined tolerances.
double dual_eigen_lambda(const TransferMatrix& T, const CylinderMeasure& nu);

struct PartitionSequence {
    std::vector<double> seq;   ///< (1/m) log Z^m(w), m = 1..n
    double log_z_final = 0.0;  ///< log Z^n(w)
};

/// Z^n(w) = (T^n 1)(w), computed with per-step sup normalization in log
/// space; the sequence converges to log lambda.
PartitionSequence partition_iterate(const TransferMatrix& T, long n, std::size_t word_index);

/// (T^n A)(w) / (T^n 1)(w); converges to the nu-integral of A.
double integral_via_ratio(const TransferMatrix& T, const CylinderFunction& a, long n,
                          std::size_t word_index);

struct CountablePartitionResult {
    std::vector<double> log_z; ///< log Z_m(Q), m = 1..n
    std::vector<double> seq;   ///< (1/m) log Z_m(Q)
    double inf_pressure = 0.0; ///< inf over computed m
};

/// Partition sums of a countable weight family over the truncated index set,
/// with the sup over points taken across depth-k cells. The innermost
/// min(m, k) index symbols are enumerated with the sup resolved per
/// assignment (per-cell max-plus accumulation); outer symbols run through an
/// exact sum DP over cells. Refuses when the cost estimate exceeds `budget`.
CountablePartitionResult countable_partition(const WeightSystem& weights, int n,
                                             double budget = 2e8);

} // namespace gcf

#include "gcf/transfer.hpp"

#include "gcf/errors.hpp"
#include "gcf/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gcf {

namespace {

constexpr double kExpOverflow = 700.0;

double kahan_total(const std::vector<double>& v) {
    double s = 0.0, c = 0.0;
    for (double x : v) {
        double y = x - c;
        double t = s + y;
        c = (t - s) - y;
        s = t;
    }
    return s;
}

} // namespace

TransferMatrix assemble_classical(const PotentialFamily& fam, long n, double beta,
                                  int r, int depth) {
    if (n < 0) throw DomainError("assemble_classical: N must be >= 0");
    if (!(beta > 0.0)) throw DomainError("assemble_classical: beta must be > 0");
    if (depth < 1) throw DomainError("assemble_classical: depth must be >= 1");

    std::size_t sz = table_size(r, depth);
    TransferMatrix T;
    T.kind = OperatorKind::ClassicalN;
    T.r = r;
    T.depth = depth;
    T.particle_number = n;
    T.coeff.assign(static_cast<std::size_t>(r), std::vector<double>(sz));
    for (std::size_t w = 0; w < sz; ++w) {
        Word word = Word::from_index(w, r, depth);
        for (int j = 0; j < r; ++j) {
            double t = -beta * fam(n, prepend(j, word));
            if (t > kExpOverflow)
                throw OverflowError("assemble_classical: coefficient exponent above 700", n, w);
            double c = std::exp(t);
            if (!(c > 0.0))
                throw CertificateError("assemble_classical: coefficient underflowed to zero");
            T.coeff[static_cast<std::size_t>(j)][w] = c;
        }
    }
    return T;
}

TransferMatrix assemble_grand(const WeightSystem& weights) {
    if (weights.kind != WeightKind::Finite)
        throw DomainError("assemble_grand: needs a finite weight system");
    TransferMatrix T;
    T.kind = OperatorKind::GrandCanonical;
    T.r = weights.r;
    T.depth = weights.depth;
    T.coeff.reserve(static_cast<std::size_t>(weights.r));
    for (const auto& q : weights.tables) {
        for (std::size_t i = 0; i < q.size(); ++i)
            if (!(q[i] > 0.0))
                throw CertificateError("assemble_grand: weight system has a non-positive entry");
        T.coeff.push_back(q.values());
    }
    return T;
}

CylinderFunction apply(const TransferMatrix& T, const CylinderFunction& f) {
    if (f.depth() != T.depth || f.alphabet_size() != T.r)
        throw DomainError("apply: depth or alphabet mismatch");
    std::size_t sz = T.size();
    std::size_t stride = T.stride();
    std::vector<double> out(sz);
    parallel_for(sz, [&](std::size_t w) {
        double s = 0.0;
        for (int j = 0; j < T.r; ++j)
            s += T.coeff[static_cast<std::size_t>(j)][w] * f[branch_target(j, w, T.r, stride)];
        out[w] = s;
    });
    return CylinderFunction(T.r, T.depth, std::move(out));
}

std::vector<double> apply_dual(const TransferMatrix& T, const std::vector<double>& nu) {
    if (nu.size() != T.size()) throw DomainError("apply_dual: size mismatch");
    std::size_t stride = T.stride();
    std::vector<double> out(nu.size(), 0.0);
    for (int j = 0; j < T.r; ++j) {
        const auto& cj = T.coeff[static_cast<std::size_t>(j)];
        for (std::size_t w = 0; w < nu.size(); ++w)
            out[branch_target(j, w, T.r, stride)] += cj[w] * nu[w];
    }
    return out;
}

SpectralSolution power_iterate(const TransferMatrix& T, const PowerConfig& cfg) {
    std::size_t sz = T.size();
    if (sz == 0) throw DomainError("power_iterate: empty operator");

    SpectralSolution sol;

    // Primal: sup-normalized iteration from the constant function 1.
    std::vector<double> f(sz, 1.0);
    CylinderFunction fc(T.r, T.depth, f);
    double res = std::numeric_limits<double>::infinity();
    std::vector<double> res_history;
    long it = 0;
    bool primal_ok = false;
    while (it < cfg.max_iter) {
        ++it;
        CylinderFunction g = apply(T, fc);
        double s = *std::max_element(g.values().begin(), g.values().end());
        res = 0.0;
        for (std::size_t i = 0; i < sz; ++i) {
            double next = g[i] / s;
            res = std::max(res, std::abs(next - fc[i]));
            fc[i] = next;
        }
        res_history.push_back(res);
        if (res <= cfg.tol) {
            primal_ok = true;
            break;
        }
    }
    sol.iterations_primal = it;

    // Rayleigh-style extraction: geometric mean of per-entry ratios Th/h.
    CylinderFunction th = apply(T, fc);
    double log_sum = 0.0;
    double rmin = std::numeric_limits<double>::infinity(), rmax = -rmin;
    for (std::size_t i = 0; i < sz; ++i) {
        double ratio = th[i] / fc[i];
        log_sum += std::log(ratio);
        rmin = std::min(rmin, ratio);
        rmax = std::max(rmax, ratio);
    }
    sol.lambda = std::exp(log_sum / static_cast<double>(sz));
    sol.lambda_spread = (rmax - rmin) / sol.lambda;
    double pres = 0.0;
    for (std::size_t i = 0; i < sz; ++i)
        pres = std::max(pres, std::abs(th[i] - sol.lambda * fc[i]));
    sol.primal_residual = pres / sol.lambda;

    // Convergence-rate estimate from successive residual ratios.
    double rate = 0.0;
    int counted = 0;
    for (std::size_t i = res_history.size() >= 11 ? res_history.size() - 10 : 1;
         i < res_history.size(); ++i) {
        if (res_history[i - 1] > 0.0 && res_history[i] > 0.0) {
            rate += std::log(res_history[i] / res_history[i - 1]);
            ++counted;
        }
    }
    sol.rate = counted > 0 ? std::min(1.0, std::exp(rate / counted)) : 0.0;

    // Dual: total-mass-normalized iteration from the uniform probability.
    std::vector<double> nu(sz, 1.0 / static_cast<double>(sz));
    long itd = 0;
    bool dual_ok = false;
    double lam_dual = 0.0;
    while (itd < cfg.max_iter) {
        ++itd;
        std::vector<double> m = apply_dual(T, nu);
        lam_dual = kahan_total(m);
        double dres = 0.0;
        for (std::size_t i = 0; i < sz; ++i) dres += std::abs(m[i] - lam_dual * nu[i]);
        dres /= lam_dual;
        for (std::size_t i = 0; i < sz; ++i) nu[i] = m[i] / lam_dual;
        if (dres <= cfg.tol) {
            dual_ok = true;
            sol.dual_residual = dres;
            break;
        }
        sol.dual_residual = dres;
    }
    sol.iterations_dual = itd;
    sol.lambda_dual = lam_dual;

    sol.nu = CylinderMeasure(T.r, T.depth, std::move(nu), false).normalized();

    // nu(h) = 1 normalization of the eigenfunction.
    double nh = sol.nu.integrate(fc);
    for (std::size_t i = 0; i < sz; ++i) fc[i] /= nh;
    sol.h = std::move(fc);

    sol.converged = primal_ok && dual_ok;
    return sol;
}

double dual_eigen_lambda(const TransferMatrix& T, const CylinderMeasure& nu) {
    CylinderFunction t1 = apply(T, CylinderFunction::constant(T.r, T.depth, 1.0));
    return nu.integrate(t1);
}

PartitionSequence partition_iterate(const TransferMatrix& T, long n, std::size_t word_index) {
    if (n < 1) throw DomainError("partition_iterate: n must be >= 1");
    if (word_index >= T.size()) throw DomainError("partition_iterate: word index out of range");
    PartitionSequence out;
    out.seq.reserve(static_cast<std::size_t>(n));
    CylinderFunction f = CylinderFunction::constant(T.r, T.depth, 1.0);
    double acc = 0.0;
    for (long m = 1; m <= n; ++m) {
        f = apply(T, f);
        double s = *std::max_element(f.values().begin(), f.values().end());
        acc += std::log(s);
        for (std::size_t i = 0; i < f.size(); ++i) f[i] /= s;
        double log_z = acc + std::log(f[word_index]);
        out.seq.push_back(log_z / static_cast<double>(m));
        out.log_z_final = log_z;
    }
    return out;
}

double integral_via_ratio(const TransferMatrix& T, const CylinderFunction& a, long n,
                          std::size_t word_index) {
    if (n < 1) throw DomainError("integral_via_ratio: n must be >= 1");
    if (a.depth() != T.depth || a.alphabet_size() != T.r)
        throw DomainError("integral_via_ratio: depth or alphabet mismatch");
    CylinderFunction u = a;
    CylinderFunction f = CylinderFunction::constant(T.r, T.depth, 1.0);
    for (long m = 0; m < n; ++m) {
        u = apply(T, u);
        f = apply(T, f);
        double s = *std::max_element(f.values().begin(), f.values().end());
        for (std::size_t i = 0; i < f.size(); ++i) {
            u[i] /= s;
            f[i] /= s;
        }
    }
    return u[word_index] / f[word_index];
}

CountablePartitionResult countable_partition(const WeightSystem& weights, int n, double budget) {
    if (weights.kind != WeightKind::Countable)
        throw DomainError("countable_partition: needs a countable weight system");
    if (n < 1) throw DomainError("countable_partition: n must be >= 1");

    const int r = weights.r;
    const int k = weights.depth;
    const std::size_t cells = table_size(r, k);
    const std::size_t nsym = weights.tables.size();

    // Cost certificate: inner enumeration + outer DP, summed over m <= n.
    double cost = 0.0;
    for (int m = 1; m <= n; ++m) {
        int inner = std::min(m, k);
        cost += std::pow(static_cast<double>(nsym), inner) * static_cast<double>(cells) * inner;
        if (m > inner)
            cost += static_cast<double>(m - inner) * static_cast<double>(nsym) *
                    static_cast<double>(cells);
    }
    if (cost > budget)
        throw BudgetError("countable_partition: cost estimate " + std::to_string(cost) +
                          " exceeds budget " + std::to_string(budget) +
                          " (reduce n, depth, or the index set)");

    const std::size_t stride = cells / static_cast<std::size_t>(r);
    CountablePartitionResult out;

    for (int m = 1; m <= n; ++m) {
        const int inner = std::min(m, k);
        // Enumerate the innermost `inner` index symbols; resolve the sup over
        // starting cells per assignment. Trajectories of all starting cells
        // merge once `inner` == k branches have been composed.
        std::vector<std::size_t> assign(static_cast<std::size_t>(inner), 0);
        std::vector<double> dp(cells, 0.0);
        double z_small = 0.0; // used when m <= k (no DP stage)
        bool done = false;
        while (!done) {
            double best = -std::numeric_limits<double>::infinity();
            std::size_t merged = 0;
            for (std::size_t v = 0; v < cells; ++v) {
                double s = 0.0;
                std::size_t point = v;
                for (int i = inner - 1; i >= 0; --i) { // innermost symbol first
                    std::size_t wsym = assign[static_cast<std::size_t>(i)];
                    s += weights.tables[wsym][point];
                    point = branch_target(static_cast<int>(wsym % static_cast<std::size_t>(r)),
                                          point, r, stride);
                }
                if (s > best) best = s;
                merged = point; // identical across v when inner == k
            }
            if (m <= k)
                z_small += std::exp(best);
            else
                dp[merged] += std::exp(best);

            // next assignment
            int pos = inner - 1;
            while (pos >= 0) {
                if (++assign[static_cast<std::size_t>(pos)] < nsym) break;
                assign[static_cast<std::size_t>(pos)] = 0;
                --pos;
            }
            if (pos < 0) done = true;
        }

        double z;
        if (m <= k) {
            z = z_small;
        } else {
            for (int step = 0; step < m - inner; ++step) {
                std::vector<double> next(cells, 0.0);
                for (std::size_t wsym = 0; wsym < nsym; ++wsym) {
                    const auto& logq = weights.tables[wsym];
                    int b = static_cast<int>(wsym % static_cast<std::size_t>(r));
                    for (std::size_t c = 0; c < cells; ++c) {
                        if (dp[c] == 0.0) continue;
                        next[branch_target(b, c, r, stride)] += std::exp(logq[c]) * dp[c];
                    }
                }
                dp.swap(next);
            }
            z = kahan_total(dp);
        }
        out.log_z.push_back(std::log(z));
        out.seq.push_back(std::log(z) / static_cast<double>(m));
    }
    out.inf_pressure = *std::min_element(out.seq.begin(), out.seq.end());
    return out;
}

} // namespace gcf

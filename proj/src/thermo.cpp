#include "gcf/thermo.hpp"

#include "gcf/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>

namespace gcf {

HolonomicMeasure::HolonomicMeasure(CylinderMeasure base_, std::vector<std::vector<double>> kernel_)
    : base(std::move(base_)), kernel(std::move(kernel_)) {
    std::size_t r = static_cast<std::size_t>(base.alphabet_size());
    if (kernel.size() != r) throw DomainError("holonomic kernel needs one row set per symbol");
    for (const auto& row : kernel)
        if (row.size() != base.size()) throw DomainError("holonomic kernel size mismatch");
    for (std::size_t w = 0; w < base.size(); ++w) {
        double s = 0.0;
        for (std::size_t j = 0; j < r; ++j) {
            if (!(kernel[j][w] >= 0.0)) throw DomainError("holonomic kernel entries must be >= 0");
            s += kernel[j][w];
        }
        if (std::abs(s - 1.0) > 1e-12)
            throw DomainError("holonomic kernel row does not sum to 1 within 1e-12");
    }
}

EquilibriumResult equilibrium_holonomic(const SpectralSolution& sol, const WeightSystem& weights) {
    if (weights.kind != WeightKind::Finite)
        throw DomainError("equilibrium_holonomic: needs a finite weight system");
    const int r = weights.r;
    const std::size_t sz = sol.h.size();
    const std::size_t stride = sol.h.stride();

    // base ~ h * nu, normalized
    std::vector<double> rho(sz);
    for (std::size_t w = 0; w < sz; ++w) rho[w] = sol.h[w] * sol.nu[w];
    CylinderMeasure base = CylinderMeasure(r, sol.h.depth(), std::move(rho), false).normalized();

    // kernel p_j(w) = q_j(w) h(phi_j w) / (lambda h(w)), rows renormalized
    std::vector<std::vector<double>> kernel(static_cast<std::size_t>(r),
                                            std::vector<double>(sz));
    double worst = 0.0;
    for (std::size_t w = 0; w < sz; ++w) {
        double s = 0.0;
        for (int j = 0; j < r; ++j) {
            double p = weights.tables[static_cast<std::size_t>(j)][w] *
                       sol.h[branch_target(j, w, r, stride)] / (sol.lambda * sol.h[w]);
            kernel[static_cast<std::size_t>(j)][w] = p;
            s += p;
        }
        worst = std::max(worst, std::abs(s - 1.0));
        for (int j = 0; j < r; ++j) kernel[static_cast<std::size_t>(j)][w] /= s;
    }
    EquilibriumResult out{HolonomicMeasure(std::move(base), std::move(kernel)), worst};
    return out;
}

double holonomy_check(const HolonomicMeasure& m, const CylinderFunction& g) {
    if (g.depth() != m.depth() || g.alphabet_size() != m.alphabet_size())
        throw DomainError("holonomy_check: depth or alphabet mismatch");
    const int r = m.alphabet_size();
    const std::size_t stride = g.stride();
    double pushed = 0.0, direct = 0.0;
    for (std::size_t w = 0; w < m.base.size(); ++w) {
        double s = 0.0;
        for (int j = 0; j < r; ++j)
            s += m.kernel[static_cast<std::size_t>(j)][w] * g[branch_target(j, w, r, stride)];
        pushed += m.base[w] * s;
        direct += m.base[w] * g[w];
    }
    return std::abs(pushed - direct);
}

namespace {

struct Objective {
    const CylinderMeasure* base;
    int r;
    std::size_t stride;

    double value(const std::vector<double>& u) const {
        double f = 0.0;
        for (std::size_t w = 0; w < base->size(); ++w) {
            double bw = (*base)[w];
            if (bw == 0.0) continue;
            double mx = -std::numeric_limits<double>::infinity();
            for (int j = 0; j < r; ++j)
                mx = std::max(mx, u[branch_target(j, w, r, stride)]);
            double s = 0.0;
            for (int j = 0; j < r; ++j)
                s += std::exp(u[branch_target(j, w, r, stride)] - mx);
            f += bw * (mx + std::log(s) - u[w]);
        }
        return f;
    }

    double value_and_gradient(const std::vector<double>& u, std::vector<double>& g) const {
        std::fill(g.begin(), g.end(), 0.0);
        double f = 0.0;
        for (std::size_t w = 0; w < base->size(); ++w) {
            double bw = (*base)[w];
            if (bw == 0.0) continue;
            double mx = -std::numeric_limits<double>::infinity();
            for (int j = 0; j < r; ++j)
                mx = std::max(mx, u[branch_target(j, w, r, stride)]);
            double denom = 0.0;
            std::array<double, 8> e{};
            for (int j = 0; j < r; ++j) {
                e[static_cast<std::size_t>(j)] = std::exp(u[branch_target(j, w, r, stride)] - mx);
                denom += e[static_cast<std::size_t>(j)];
            }
            f += bw * (mx + std::log(denom) - u[w]);
            for (int j = 0; j < r; ++j)
                g[branch_target(j, w, r, stride)] += bw * e[static_cast<std::size_t>(j)] / denom;
            g[w] -= bw;
        }
        return f;
    }
};

} // namespace

EntropyResult variational_entropy(const HolonomicMeasure& m, const EntropyOptions& opt) {
    const int r = m.alphabet_size();
    if (r > 8) throw DomainError("variational_entropy: alphabet size above 8 unsupported");
    const std::size_t dim = m.base.size();
    const std::size_t stride = dim / static_cast<std::size_t>(r);
    Objective obj{&m.base, r, stride};

    std::mt19937_64 rng(opt.seed);
    std::normal_distribution<double> gauss(0.0, 0.5);

    EntropyResult out;
    out.best_objective = std::numeric_limits<double>::infinity();
    EntropyStatus worst_status = EntropyStatus::Converged;

    for (int start = 0; start < std::max(1, opt.restarts); ++start) {
        std::vector<double> u(dim, 0.0);
        if (start > 0)
            for (double& x : u) x = gauss(rng);

        // Gradient descent with Barzilai-Borwein step seeding and Armijo
        // backtracking; the objective is convex and smooth in u.
        std::vector<double> g(dim), g_prev(dim), u_prev(dim), trial(dim);
        double f = obj.value_and_gradient(u, g);
        double step = 1.0;
        bool have_prev = false;
        int plateau = 0;
        EntropyStatus status = EntropyStatus::IterationCap;
        long it = 0;
        for (; it < opt.max_iter; ++it) {
            double gmax = 0.0, gnorm2 = 0.0;
            for (double x : g) {
                gmax = std::max(gmax, std::abs(x));
                gnorm2 += x * x;
            }
            if (gmax <= opt.grad_tol) {
                status = EntropyStatus::Converged;
                break;
            }
            if (have_prev) {
                double sy = 0.0, yy = 0.0;
                for (std::size_t i = 0; i < dim; ++i) {
                    double si = u[i] - u_prev[i];
                    double yi = g[i] - g_prev[i];
                    sy += si * yi;
                    yy += yi * yi;
                }
                if (sy > 0.0 && yy > 0.0) step = std::clamp(sy / yy, 1e-8, 1e4);
            }
            bool accepted = false;
            double trial_step = step;
            while (trial_step >= 1e-18) {
                for (std::size_t i = 0; i < dim; ++i) trial[i] = u[i] - trial_step * g[i];
                double ft = obj.value(trial);
                if (ft <= f - 1e-4 * trial_step * gnorm2) {
                    u_prev.swap(u);
                    g_prev.swap(g);
                    u.swap(trial);
                    if (std::abs(f - ft) <= 1e-15 * std::max(1.0, std::abs(f)))
                        ++plateau;
                    else
                        plateau = 0;
                    f = ft;
                    accepted = true;
                    have_prev = true;
                    break;
                }
                trial_step *= 0.5;
            }
            if (!accepted) {
                status = EntropyStatus::LineSearchStall;
                break;
            }
            f = obj.value_and_gradient(u, g);
            if (plateau >= 3) {
                // progress exhausted at machine level; convex objective, so
                // treat a tiny gradient as converged
                double gm = 0.0;
                for (double x : g) gm = std::max(gm, std::abs(x));
                status = gm <= 1e3 * opt.grad_tol ? EntropyStatus::Converged
                                                  : EntropyStatus::IterationCap;
                ++it;
                break;
            }
        }
        out.iterations += it;
        if (f < out.best_objective) out.best_objective = f;
        if (static_cast<int>(status) > static_cast<int>(worst_status)) worst_status = status;
    }

    double bound = std::log(static_cast<double>(r));
    out.clamped = out.best_objective > bound;
    out.h_v = std::min(out.best_objective, bound);
    out.status = worst_status;
    return out;
}

double classical_pressure(const PotentialFamily& fam, long n, double beta, int r, int depth,
                          const PowerConfig& cfg) {
    TransferMatrix T = assemble_classical(fam, n, beta, r, depth);
    SpectralSolution sol = power_iterate(T, cfg);
    if (!sol.converged)
        throw CertificateError("classical_pressure: eigensolver did not converge");
    return std::log(sol.lambda);
}

MarkovCheckResult markov_variational_check(const PotentialFamily& fam, long n, double beta,
                                           int r) {
    if (r > 4) throw DomainError("markov_variational_check: r must be <= 4");
    // probe: the potential must be measurable on the first two symbols
    for (int j = 0; j < r; ++j)
        for (int w = 0; w < r; ++w) {
            double v2 = fam(n, Word({j, w}, r));
            double v3a = fam(n, Word({j, w, 0}, r));
            double v3b = fam(n, Word({j, w, r - 1, 1 % r}, r));
            if (std::abs(v2 - v3a) > 1e-12 || std::abs(v2 - v3b) > 1e-12)
                throw DomainError("markov_variational_check: potential not two-symbol measurable");
        }

    PowerConfig tight{1e-14, 1000000};
    TransferMatrix T = assemble_classical(fam, n, beta, r, 1);
    SpectralSolution sol = power_iterate(T, tight);
    double lambda = sol.lambda;

    // transitions p(w -> j) = e^{-beta A(jw)} h(j) / (lambda h(w))
    std::vector<std::vector<double>> p(static_cast<std::size_t>(r),
                                       std::vector<double>(static_cast<std::size_t>(r)));
    for (int w = 0; w < r; ++w) {
        double s = 0.0;
        for (int j = 0; j < r; ++j) {
            double val = T.coeff[static_cast<std::size_t>(j)][static_cast<std::size_t>(w)] *
                         sol.h[static_cast<std::size_t>(j)] /
                         (lambda * sol.h[static_cast<std::size_t>(w)]);
            p[static_cast<std::size_t>(w)][static_cast<std::size_t>(j)] = val;
            s += val;
        }
        for (int j = 0; j < r; ++j) p[static_cast<std::size_t>(w)][static_cast<std::size_t>(j)] /= s;
    }

    // stationary distribution of the chain
    std::vector<double> pi(static_cast<std::size_t>(r), 1.0 / r);
    for (long it = 0; it < 100000; ++it) {
        std::vector<double> next(static_cast<std::size_t>(r), 0.0);
        for (int w = 0; w < r; ++w)
            for (int j = 0; j < r; ++j)
                next[static_cast<std::size_t>(j)] +=
                    pi[static_cast<std::size_t>(w)] * p[static_cast<std::size_t>(w)][static_cast<std::size_t>(j)];
        double diff = 0.0;
        for (int i = 0; i < r; ++i)
            diff += std::abs(next[static_cast<std::size_t>(i)] - pi[static_cast<std::size_t>(i)]);
        pi.swap(next);
        if (diff <= 1e-15) break;
    }

    MarkovCheckResult out;
    out.log_lambda = std::log(lambda);
    for (int w = 0; w < r; ++w)
        for (int j = 0; j < r; ++j) {
            double pr = p[static_cast<std::size_t>(w)][static_cast<std::size_t>(j)];
            if (pr > 0.0) out.entropy -= pi[static_cast<std::size_t>(w)] * pr * std::log(pr);
            out.integral_a += pi[static_cast<std::size_t>(w)] * pr * fam(n, Word({j, w}, r));
        }
    out.gap = std::abs(out.entropy - beta * out.integral_a - out.log_lambda);
    return out;
}

PressureReport grand_pressure(const SpectralSolution& sol, const CylinderFunction& log_psi,
                              const HolonomicMeasure& m, const EntropyOptions& opt) {
    PressureReport rep;
    rep.log_lambda = std::log(sol.lambda);
    rep.int_log_psi = m.base.integrate(log_psi);
    EntropyResult ent = variational_entropy(m, opt);
    rep.h_v = ent.h_v;
    rep.entropy_status = ent.status;
    rep.identity_gap = std::abs(rep.h_v + rep.int_log_psi - rep.log_lambda);
    return rep;
}

DerivativeIdentity derivative_identity(const PotentialFamily& fam, long n, double beta0,
                                       int r, int depth, double step, const PowerConfig& cfg) {
    if (!(beta0 - step > 0.0)) throw DomainError("derivative_identity: beta0 - step must be > 0");

    auto lam = [&](double beta) {
        SpectralSolution s = power_iterate(assemble_classical(fam, n, beta, r, depth), cfg);
        if (!s.converged) throw CertificateError("derivative_identity: solver did not converge");
        return s;
    };
    SpectralSolution mid = lam(beta0);
    double lp = lam(beta0 + step).lambda;
    double lm = lam(beta0 - step).lambda;

    DerivativeIdentity out;
    out.lhs = (lp - lm) / (2.0 * step * mid.lambda);

    // rho ~ h * nu normalized; quadrature of A_N against it
    std::vector<double> rho(mid.h.size());
    for (std::size_t i = 0; i < rho.size(); ++i) rho[i] = mid.h[i] * mid.nu[i];
    CylinderMeasure base = CylinderMeasure(r, depth, std::move(rho), false).normalized();
    CylinderFunction a = fam.table(n, r, depth);
    out.rhs = -base.integrate(a);
    out.gap = std::abs(out.lhs - out.rhs);
    return out;
}

SweepResult analyticity_sweep(const PotentialFamily& fam, std::vector<double> betas,
                              std::vector<double> mus, int r, int depth, double eps,
                              const PowerConfig& cfg) {
    if (betas.empty() || mus.empty()) throw DomainError("analyticity_sweep: empty grid");
    for (std::size_t i = 1; i < betas.size(); ++i)
        if (!(betas[i] > betas[i - 1])) throw DomainError("analyticity_sweep: beta grid not increasing");
    for (std::size_t i = 1; i < mus.size(); ++i)
        if (!(mus[i] > mus[i - 1])) throw DomainError("analyticity_sweep: mu grid not increasing");

    SweepResult res;
    res.betas = std::move(betas);
    res.mus = std::move(mus);
    res.nodes.resize(res.betas.size() * res.mus.size());

    for (std::size_t ib = 0; ib < res.betas.size(); ++ib) {
        for (std::size_t im = 0; im < res.mus.size(); ++im) {
            SweepNode node;
            node.beta = res.betas[ib];
            node.mu = res.mus[im];
            node.admissible = node.mu < 0.0 && fam.kprime > node.mu;
            if (node.admissible) {
                try {
                    WeightSystem ws = finite_weights(fam, node.beta, node.mu, r, depth, eps);
                    SpectralSolution sol = power_iterate(assemble_grand(ws), cfg);
                    node.lambda = sol.lambda;
                    node.log_lambda = std::log(sol.lambda);
                    node.rate = sol.rate;
                    node.iterations = sol.iterations_primal;
                    node.converged = sol.converged;
                } catch (const std::exception&) {
                    node.admissible = false;
                }
            }
            res.nodes[ib * res.mus.size() + im] = node;
        }
    }

    const double nan = std::numeric_limits<double>::quiet_NaN();
    std::size_t nn = res.nodes.size();
    res.d1_beta.assign(nn, nan);
    res.d2_beta.assign(nn, nan);
    res.d1_mu.assign(nn, nan);
    res.d2_mu.assign(nn, nan);

    auto ok = [&](std::size_t ib, std::size_t im) {
        return res.node(ib, im).admissible && res.node(ib, im).converged;
    };
    // divided differences along beta (fixed mu), anchored at the left node
    for (std::size_t im = 0; im < res.mus.size(); ++im) {
        for (std::size_t ib = 0; ib + 1 < res.betas.size(); ++ib)
            if (ok(ib, im) && ok(ib + 1, im))
                res.d1_beta[ib * res.mus.size() + im] =
                    (res.node(ib + 1, im).log_lambda - res.node(ib, im).log_lambda) /
                    (res.betas[ib + 1] - res.betas[ib]);
        for (std::size_t ib = 0; ib + 2 < res.betas.size(); ++ib) {
            double a = res.d1_beta[ib * res.mus.size() + im];
            double b = res.d1_beta[(ib + 1) * res.mus.size() + im];
            if (std::isfinite(a) && std::isfinite(b)) {
                double d2 = (b - a) / (res.betas[ib + 2] - res.betas[ib]);
                res.d2_beta[ib * res.mus.size() + im] = d2;
                res.max_abs_d2_beta = std::max(res.max_abs_d2_beta, std::abs(d2));
                if (ib > 0) {
                    double prev = res.d2_beta[(ib - 1) * res.mus.size() + im];
                    if (std::isfinite(prev))
                        res.max_d2_step_beta = std::max(res.max_d2_step_beta, std::abs(d2 - prev));
                }
            }
        }
    }
    // and along mu (fixed beta)
    for (std::size_t ib = 0; ib < res.betas.size(); ++ib) {
        for (std::size_t im = 0; im + 1 < res.mus.size(); ++im)
            if (ok(ib, im) && ok(ib, im + 1))
                res.d1_mu[ib * res.mus.size() + im] =
                    (res.node(ib, im + 1).log_lambda - res.node(ib, im).log_lambda) /
                    (res.mus[im + 1] - res.mus[im]);
        for (std::size_t im = 0; im + 2 < res.mus.size(); ++im) {
            double a = res.d1_mu[ib * res.mus.size() + im];
            double b = res.d1_mu[ib * res.mus.size() + im + 1];
            if (std::isfinite(a) && std::isfinite(b)) {
                double d2 = (b - a) / (res.mus[im + 2] - res.mus[im]);
                res.d2_mu[ib * res.mus.size() + im] = d2;
                res.max_abs_d2_mu = std::max(res.max_abs_d2_mu, std::abs(d2));
                if (im > 0) {
                    double prev = res.d2_mu[ib * res.mus.size() + im - 1];
                    if (std::isfinite(prev))
                        res.max_d2_step_mu = std::max(res.max_d2_step_mu, std::abs(d2 - prev));
                }
            }
        }
    }
    return res;
}

} // namespace gcf

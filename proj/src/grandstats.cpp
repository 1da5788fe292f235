#include "gcf/grandstats.hpp"

#include "gcf/errors.hpp"
#include "gcf/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gcf {

namespace {

void validate(const GrandCanonicalEnsemble& e) {
    if (!(e.beta > 0.0)) throw DomainError("ensemble: beta must be > 0");
    if (!(e.mu < 0.0)) throw DomainError("ensemble: mu must be < 0");
    if (!(e.volume > 0.0)) throw DomainError("ensemble: volume must be > 0");
    if (!e.energy) throw DomainError("ensemble: missing energy sequence");
}

} // namespace

long ensemble_truncation(const GrandCanonicalEnsemble& e) {
    validate(e);
    return truncation_bound(e.kprime, e.delta, e.beta, e.mu, e.eps);
}

double grand_partition(const GrandCanonicalEnsemble& e) {
    long n_max = ensemble_truncation(e);
    double s = 0.0, c = 0.0;
    for (long n = 0; n <= n_max; ++n) {
        double a = e.energy(n);
        double dom = e.kprime * static_cast<double>(n) + e.delta;
        if (a < dom - 1e-9 * std::max(1.0, std::abs(dom)))
            throw CertificateError("grand_partition: A_N below the declared growth bound at N=" +
                                   std::to_string(n));
        double t = e.beta * static_cast<double>(n) * e.mu - e.beta * a;
        if (t > 700.0) throw OverflowError("grand_partition: summand exponent above 700", n, 0);
        double y = std::exp(t) - c;
        double u = s + y;
        c = (u - s) - y;
        s = u;
    }
    if (!(s > 0.0)) throw CertificateError("grand_partition: Z is not positive");
    return s;
}

ParticleDistribution particle_distribution(const GrandCanonicalEnsemble& e) {
    ParticleDistribution out;
    out.n_max = ensemble_truncation(e);
    out.z = grand_partition(e);
    out.p.resize(static_cast<std::size_t>(out.n_max) + 1);
    double total = 0.0;
    for (long n = 0; n <= out.n_max; ++n) {
        double t = e.beta * static_cast<double>(n) * e.mu - e.beta * e.energy(n);
        out.p[static_cast<std::size_t>(n)] = std::exp(t) / out.z;
        total += out.p[static_cast<std::size_t>(n)];
    }
    out.pre_renorm_defect = std::abs(total - 1.0);
    for (double& x : out.p) x /= total;
    return out;
}

MomentSet moments(const GrandCanonicalEnsemble& e) {
    ParticleDistribution d = particle_distribution(e);
    MomentSet m;
    for (long n = 0; n <= d.n_max; ++n) {
        double p = d.p[static_cast<std::size_t>(n)];
        m.mean_n += static_cast<double>(n) * p;
        m.mean_a += e.energy(n) * p;
        m.mean_n2 += static_cast<double>(n) * static_cast<double>(n) * p;
    }
    return m;
}

LogPartitionDerivatives log_partition_derivatives(const GrandCanonicalEnsemble& e, double step) {
    // `step` is relative: beta is displaced by step*beta and mu by step*|mu|,
    // which keeps physical-unit parameter scales usable.
    if (!(step > 0.0) || !(step < 1.0))
        throw DomainError("log_partition_derivatives: relative step must lie in (0,1)");

    auto log_z_at = [&](double beta, double mu) {
        GrandCanonicalEnsemble shifted = e;
        shifted.beta = beta;
        shifted.mu = mu;
        return std::log(grand_partition(shifted));
    };

    double s_beta = step * e.beta;
    double s_mu = step * std::abs(e.mu);
    MomentSet m = moments(e);
    LogPartitionDerivatives out;
    out.d_beta_fd =
        (log_z_at(e.beta + s_beta, e.mu) - log_z_at(e.beta - s_beta, e.mu)) / (2.0 * s_beta);
    out.d_beta_expect = e.mu * m.mean_n - m.mean_a;
    out.gap_beta = std::abs(out.d_beta_fd - out.d_beta_expect);
    out.d_mu_fd = (log_z_at(e.beta, e.mu + s_mu) - log_z_at(e.beta, e.mu - s_mu)) / (2.0 * s_mu);
    out.d_mu_expect = e.beta * m.mean_n;
    out.gap_mu = std::abs(out.d_mu_fd - out.d_mu_expect);
    return out;
}

double gas_pressure(const GrandCanonicalEnsemble& e) {
    double z = grand_partition(e);
    return std::log(z) / (e.beta * e.volume);
}

double log_partition(const FiniteCanonical& c, double beta) {
    if (c.d() < 2) throw DomainError("finite canonical: d must be >= 2");
    double mx = -std::numeric_limits<double>::infinity();
    for (double a : c.a) mx = std::max(mx, -beta * a);
    double s = 0.0;
    for (double a : c.a) s += std::exp(-beta * a - mx);
    return mx + std::log(s);
}

std::vector<double> canonical_distribution(const FiniteCanonical& c) {
    if (c.d() < 2) throw DomainError("finite canonical: d must be >= 2");
    double mx = -std::numeric_limits<double>::infinity();
    for (double a : c.a) mx = std::max(mx, -c.beta * a);
    std::vector<double> p(c.a.size());
    double z = 0.0;
    for (std::size_t j = 0; j < c.a.size(); ++j) {
        p[j] = std::exp(-c.beta * c.a[j] - mx);
        z += p[j];
    }
    for (double& x : p) x /= z;
    return p;
}

double entropy(const std::vector<double>& p) {
    double h = 0.0;
    for (double x : p)
        if (x > 0.0) h -= x * std::log(x);
    return h;
}

namespace {

double canonical_mean(const std::vector<double>& a, double beta) {
    double mx = -std::numeric_limits<double>::infinity();
    for (double x : a) mx = std::max(mx, -beta * x);
    double z = 0.0, m = 0.0;
    for (double x : a) {
        double w = std::exp(-beta * x - mx);
        z += w;
        m += x * w;
    }
    return m / z;
}

} // namespace

MaxEntSolution maxent_solve(const FiniteCanonical& c, double alpha) {
    if (c.d() < 2) throw DomainError("maxent_solve: d must be >= 2");
    double lo = *std::min_element(c.a.begin(), c.a.end());
    double hi = *std::max_element(c.a.begin(), c.a.end());
    if (hi - lo <= 1e-15) {
        if (std::abs(alpha - lo) <= 1e-12) {
            MaxEntSolution s;
            s.p.assign(c.a.size(), 1.0 / static_cast<double>(c.a.size()));
            s.beta = 0.0;
            s.achieved_mean = lo;
            s.entropy_value = entropy(s.p);
            return s;
        }
        throw CertificateError("maxent_solve: constant A admits only alpha = A(1)");
    }
    if (!(alpha > lo) || !(alpha < hi))
        throw CertificateError("maxent_solve: alpha lies outside the open interval (min A, max A)");

    // <A>(beta) decreases strictly from max A (beta -> -inf) to min A
    // (beta -> +inf); expand a bracket then bisect.
    double b = 1.0;
    while (canonical_mean(c.a, -b) < alpha || canonical_mean(c.a, b) > alpha) {
        b *= 2.0;
        if (b > 1e12)
            throw CertificateError("maxent_solve: bracket expansion failed (alpha too extreme)");
    }
    double left = -b, right = b;
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (left + right);
        if (canonical_mean(c.a, mid) > alpha)
            left = mid;
        else
            right = mid;
        if (right - left <= 1e-12 * std::max(1.0, std::abs(left))) break;
    }
    double beta = 0.5 * (left + right);

    MaxEntSolution s;
    FiniteCanonical solved{c.a, beta};
    s.p = canonical_distribution(solved);
    s.beta = beta;
    s.achieved_mean = 0.0;
    for (std::size_t j = 0; j < s.p.size(); ++j) s.achieved_mean += s.p[j] * c.a[j];
    s.entropy_value = entropy(s.p);
    return s;
}

FreeEnergyReport free_energy_check(const FiniteCanonical& c, const std::vector<double>& p,
                                   double grid_step) {
    if (!(c.beta > 0.0)) throw DomainError("free_energy_check: beta must be > 0");
    if (p.size() != c.a.size()) throw DomainError("free_energy_check: size mismatch");

    FreeEnergyReport rep;
    double mean = 0.0;
    for (std::size_t j = 0; j < p.size(); ++j) mean += p[j] * c.a[j];
    rep.value = mean - entropy(p) / c.beta;
    rep.canonical_value = -log_partition(c, c.beta) / c.beta;

    // simplex grid scan (d <= 4)
    int d = c.d();
    if (d > 4) throw DomainError("free_energy_check: grid oracle limited to d <= 4");
    long steps = std::lround(1.0 / grid_step);
    double best = std::numeric_limits<double>::infinity();
    std::vector<double> q(static_cast<std::size_t>(d));
    auto eval = [&]() {
        double m = 0.0;
        for (int j = 0; j < d; ++j) m += q[static_cast<std::size_t>(j)] * c.a[static_cast<std::size_t>(j)];
        best = std::min(best, m - entropy(q) / c.beta);
    };
    if (d == 2) {
        for (long i = 0; i <= steps; ++i) {
            q[0] = static_cast<double>(i) / steps;
            q[1] = 1.0 - q[0];
            eval();
        }
    } else if (d == 3) {
        for (long i = 0; i <= steps; ++i)
            for (long j = 0; i + j <= steps; ++j) {
                q[0] = static_cast<double>(i) / steps;
                q[1] = static_cast<double>(j) / steps;
                q[2] = 1.0 - q[0] - q[1];
                eval();
            }
    } else {
        for (long i = 0; i <= steps; ++i)
            for (long j = 0; i + j <= steps; ++j)
                for (long k = 0; i + j + k <= steps; ++k) {
                    q[0] = static_cast<double>(i) / steps;
                    q[1] = static_cast<double>(j) / steps;
                    q[2] = static_cast<double>(k) / steps;
                    q[3] = 1.0 - q[0] - q[1] - q[2];
                    eval();
                }
    }
    rep.grid_min = best;
    rep.minimality_gap = std::max(0.0, rep.value - best);
    return rep;
}

SimplexGridBest simplex_grid_best_entropy(const std::vector<double>& a, double alpha,
                                          double feas_tol, double step) {
    int d = static_cast<int>(a.size());
    if (d < 2 || d > 4) throw DomainError("simplex_grid_best_entropy: d must be in [2,4]");
    long steps = std::lround(1.0 / step);
    SimplexGridBest out;
    out.best_entropy = -std::numeric_limits<double>::infinity();
    std::vector<double> q(static_cast<std::size_t>(d));
    auto consider = [&]() {
        double m = 0.0;
        for (int j = 0; j < d; ++j) m += q[static_cast<std::size_t>(j)] * a[static_cast<std::size_t>(j)];
        if (std::abs(m - alpha) > feas_tol) return;
        ++out.feasible_count;
        double h = entropy(q);
        if (h > out.best_entropy) {
            out.best_entropy = h;
            out.best_p = q;
            out.found = true;
        }
    };
    if (d == 2) {
        for (long i = 0; i <= steps; ++i) {
            q[0] = static_cast<double>(i) / steps;
            q[1] = 1.0 - q[0];
            consider();
        }
    } else if (d == 3) {
        for (long i = 0; i <= steps; ++i)
            for (long j = 0; i + j <= steps; ++j) {
                q[0] = static_cast<double>(i) / steps;
                q[1] = static_cast<double>(j) / steps;
                q[2] = 1.0 - q[0] - q[1];
                consider();
            }
    } else {
        for (long i = 0; i <= steps; ++i)
            for (long j = 0; i + j <= steps; ++j)
                for (long k = 0; i + j + k <= steps; ++k) {
                    q[0] = static_cast<double>(i) / steps;
                    q[1] = static_cast<double>(j) / steps;
                    q[2] = static_cast<double>(k) / steps;
                    q[3] = 1.0 - q[0] - q[1] - q[2];
                    consider();
                }
    }
    return out;
}

} // namespace gcf

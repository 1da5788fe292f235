#include "gcf/potentials.hpp"

#include "gcf/errors.hpp"
#include "gcf/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gcf {

namespace {

constexpr double kExpOverflow = 700.0;

std::vector<Word> all_words(int r, int depth) {
    std::size_t n = table_size(r, depth);
    std::vector<Word> words;
    words.reserve(n);
    for (std::size_t i = 0; i < n; ++i) words.push_back(Word::from_index(i, r, depth));
    return words;
}

} // namespace

CylinderFunction PotentialFamily::table(long n, int r, int depth) const {
    std::size_t sz = table_size(r, depth);
    std::vector<double> vals(sz);
    for (std::size_t i = 0; i < sz; ++i) vals[i] = eval(n, Word::from_index(i, r, depth));
    return CylinderFunction(r, depth, std::move(vals));
}

PotentialFamily constant_family(double c, double kprime, double delta) {
    PotentialFamily f;
    f.eval = [c](long, const Word&) { return c; };
    f.lip_bound = 0.0;
    f.kprime = kprime;
    f.delta = delta;
    f.label = "constant";
    return f;
}

PotentialFamily per_particle_family(CylinderFunction energy, double kprime, double delta) {
    PotentialFamily f;
    f.lip_bound = energy.depth() >= 1 ? discrete_lipschitz(energy) : 0.0;
    f.eval = [e = std::move(energy)](long n, const Word& w) {
        return static_cast<double>(n) * e.eval_word(w);
    };
    f.kprime = kprime;
    f.delta = delta;
    f.label = "per_particle";
    return f;
}

PotentialFamily shared_family(CylinderFunction energy, double kprime, double delta) {
    PotentialFamily f;
    f.lip_bound = energy.depth() >= 1 ? discrete_lipschitz(energy) : 0.0;
    f.eval = [e = std::move(energy)](long n, const Word& w) {
        return e.eval_word(w) / static_cast<double>(n + 1);
    };
    f.kprime = kprime;
    f.delta = delta;
    f.label = "shared";
    return f;
}

PotentialFamily affine_family(double a, double b, CylinderFunction energy,
                              double kprime, double delta) {
    PotentialFamily f;
    f.lip_bound = energy.depth() >= 1 ? discrete_lipschitz(energy) : 0.0;
    f.eval = [a, b, e = std::move(energy)](long n, const Word& w) {
        return a * static_cast<double>(n) + b + e.eval_word(w);
    };
    f.kprime = kprime;
    f.delta = delta;
    f.label = "affine";
    return f;
}

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::Pass: return "pass";
        case Verdict::Fail: return "fail";
        default: return "inconclusive";
    }
}

Verdict AdmissibilityReport::overall() const {
    if (h1 == Verdict::Fail || h2 == Verdict::Fail || h3 == Verdict::Fail) return Verdict::Fail;
    if (h1 == Verdict::Inconclusive || h2 == Verdict::Inconclusive || h3 == Verdict::Inconclusive)
        return Verdict::Inconclusive;
    return Verdict::Pass;
}

double check_h1(const PotentialFamily& fam, int r, int depth, long n_max) {
    if (depth < 1) throw DomainError("check_h1: depth must be >= 1");
    double worst = 0.0;
    for (long n = 0; n <= n_max; ++n)
        worst = std::max(worst, discrete_lipschitz(fam.table(n, r, depth)));
    return worst;
}

double check_h2_root(const PotentialFamily& fam, double mu, const Word& w, long n_max) {
    if (!(mu < 0.0)) throw DomainError("check_h2_root: mu must be < 0");
    long lo = std::max<long>(1, n_max / 2);
    double est = -std::numeric_limits<double>::infinity();
    for (long n = lo; n <= std::max(lo, n_max); ++n)
        est = std::max(est, fam(n, w) / static_cast<double>(n));
    return est - mu;
}

H2RatioResult check_h2_ratio(const PotentialFamily& fam, double mu, const Word& w, long n_max) {
    H2RatioResult res;
    res.margin = std::numeric_limits<double>::infinity();
    double prev = fam(0, w);
    for (long n = 0; n < n_max; ++n) {
        double next = fam(n + 1, w);
        double inc = next - prev;
        if (inc < -1e-12 * std::max(1.0, std::abs(prev)) && res.monotone_ok) {
            res.monotone_ok = false;
            res.first_violation = n + 1;
        }
        res.margin = std::min(res.margin, inc - mu);
        prev = next;
    }
    return res;
}

void check_h3(const PotentialFamily& fam, int r, int depth, long n_max,
              AdmissibilityReport& report) {
    std::size_t sz = table_size(r, depth);
    for (long n = 0; n <= n_max; ++n) {
        CylinderFunction t = fam.table(n, r, depth);
        double bound = fam.kprime * static_cast<double>(n) + fam.delta;
        for (std::size_t i = 0; i < sz; ++i) {
            if (!(t[i] > bound)) report.h3_violations.emplace_back(n, i);
            if (t[i] < bound - 1e-9 * std::max(1.0, std::abs(bound)))
                report.h3_nonstrict_ok = false;
        }
    }
}

AdmissibilityReport run_admissibility(const PotentialFamily& fam, int r, int depth,
                                      long n_max, double mu, bool monotone) {
    AdmissibilityReport rep;
    rep.n_max_used = n_max;
    rep.depth_used = depth;

    rep.h1_max_observed_lip = check_h1(fam, r, depth, n_max);
    rep.h1 = rep.h1_max_observed_lip <= fam.lip_bound + 1e-12 * std::max(1.0, fam.lip_bound)
                 ? Verdict::Pass
                 : Verdict::Fail;

    // Worst root margin over all one-step preimages jw of depth-k words.
    double margin = std::numeric_limits<double>::infinity();
    std::size_t sz = table_size(r, depth);
    for (std::size_t i = 0; i < sz; ++i) {
        Word w = Word::from_index(i, r, depth);
        for (int j = 0; j < r; ++j)
            margin = std::min(margin, check_h2_root(fam, mu, prepend(j, w), n_max));
    }
    rep.h2_root_margin = margin;
    if (margin > 1e-9)
        rep.h2 = Verdict::Pass;
    else if (margin < -1e-9)
        rep.h2 = Verdict::Fail;
    else
        rep.h2 = Verdict::Inconclusive;

    if (monotone) {
        rep.ratio_checked = true;
        rep.h2_ratio = check_h2_ratio(fam, mu, Word::from_index(0, r, depth), n_max);
        if (!rep.h2_ratio.monotone_ok && rep.h2 != Verdict::Fail) rep.h2 = Verdict::Inconclusive;
    }

    check_h3(fam, r, depth, n_max, rep);
    rep.h3 = rep.h3_violations.empty() ? Verdict::Pass : Verdict::Fail;
    return rep;
}

long truncation_bound(double kprime, double delta, double beta, double mu, double eps) {
    if (!(beta > 0.0)) throw DomainError("truncation_bound: beta must be > 0");
    if (!(eps > 0.0)) throw DomainError("truncation_bound: eps must be > 0");
    double g = kprime - mu;
    if (!(g > 0.0))
        throw CertificateError("truncation_bound: K' <= mu, no geometric tail certificate");
    double bg = beta * g;
    double q = std::exp(-bg);
    auto tail = [&](long n) {
        return std::exp(-beta * delta) * std::exp(-bg * static_cast<double>(n + 1)) / (1.0 - q);
    };
    double raw = (-std::log(eps * (1.0 - q)) - beta * delta) / bg - 1.0;
    long n = raw < 0.0 ? 0 : static_cast<long>(std::ceil(raw));
    while (tail(n) > eps) ++n;          // guard against rounding in the closed form
    while (n > 0 && tail(n - 1) <= eps) --n;
    return n;
}

long truncation_bound(const PotentialFamily& fam, double beta, double mu, double eps) {
    return truncation_bound(fam.kprime, fam.delta, beta, mu, eps);
}

GrandPotential grand_potential(const PotentialFamily& fam, double beta, double mu,
                               int r, int depth, double eps) {
    long n_max = truncation_bound(fam, beta, mu, eps);
    std::size_t sz = table_size(r, depth);
    std::vector<Word> words = all_words(r, depth);
    std::vector<double> psi(sz, 0.0);

    // Kept per entry: compensated ascending-N sum; terms decay geometrically.
    std::vector<char> failed(sz, 0);
    std::vector<long> failed_n(sz, -1);
    parallel_for(sz, [&](std::size_t i) {
        double s = 0.0, c = 0.0;
        for (long n = 0; n <= n_max; ++n) {
            double a = fam(n, words[i]);
            double dom = fam.kprime * static_cast<double>(n) + fam.delta;
            if (a < dom - 1e-9 * std::max(1.0, std::abs(dom))) {
                failed[i] = 1;
                failed_n[i] = n;
                return;
            }
            double t = -beta * (a - mu * static_cast<double>(n));
            if (t > kExpOverflow) {
                failed[i] = 2;
                failed_n[i] = n;
                return;
            }
            double y = std::exp(t) - c;
            double u = s + y;
            c = (u - s) - y;
            s = u;
        }
        psi[i] = s;
    });
    for (std::size_t i = 0; i < sz; ++i) {
        if (failed[i] == 1)
            throw CertificateError("grand_potential: sampled A_N < K'N + delta at N=" +
                                   std::to_string(failed_n[i]) + ", word " + words[i].str() +
                                   "; declared constants do not dominate");
        if (failed[i] == 2)
            throw OverflowError("grand_potential: summand exponent above 700 at N=" +
                                    std::to_string(failed_n[i]) + ", word " + words[i].str(),
                                failed_n[i], i);
        if (!(psi[i] > 0.0) || !std::isfinite(psi[i]))
            throw CertificateError("grand_potential: psi not strictly positive at word " +
                                   words[i].str());
    }

    GrandPotential gp;
    gp.psi = CylinderFunction(r, depth, std::move(psi));
    gp.tail_bound = eps;
    gp.n_max = n_max;
    return gp;
}

WeightSystem finite_weights(const PotentialFamily& fam, double beta, double mu,
                            int r, int depth, double eps) {
    if (depth < 1) throw DomainError("finite_weights: depth must be >= 1");
    GrandPotential gp = grand_potential(fam, beta, mu, r, depth, eps);
    WeightSystem ws;
    ws.kind = WeightKind::Finite;
    ws.r = r;
    ws.depth = depth;
    ws.beta = beta;
    ws.mu = mu;
    ws.tail_bound = gp.tail_bound;
    ws.n_max = gp.n_max;
    ws.family_lip = fam.lip_bound;
    std::size_t sz = gp.psi.size();
    for (int j = 0; j < r; ++j) {
        std::vector<double> q(sz);
        for (std::size_t i = 0; i < sz; ++i) q[i] = gp.psi.at_branch(j, i);
        ws.tables.emplace_back(r, depth, std::move(q));
    }
    return ws;
}

WeightSystem countable_weights(const PotentialFamily& fam, double beta, double mu,
                               int r, int depth, double eps) {
    if (depth < 1) throw DomainError("countable_weights: depth must be >= 1");
    long n_max = truncation_bound(fam, beta, mu, eps);
    long j_max = static_cast<long>(r) * (n_max + 1) - 1;

    WeightSystem ws;
    ws.kind = WeightKind::Countable;
    ws.r = r;
    ws.depth = depth;
    ws.beta = beta;
    ws.mu = mu;
    ws.tail_bound = eps;
    ws.n_max = n_max;
    ws.family_lip = fam.lip_bound;

    std::size_t sz = table_size(r, depth);
    CylinderFunction a_table;
    for (long j = 0; j <= j_max; ++j) {
        int b = static_cast<int>(j % r);
        long xi = j / r;
        if (b == 0) a_table = fam.table(xi, r, depth);
        std::vector<double> logq(sz);
        for (std::size_t i = 0; i < sz; ++i)
            logq[i] = -beta * (a_table.at_branch(b, i) - static_cast<double>(xi) * mu);
        ws.tables.emplace_back(r, depth, std::move(logq));
    }
    return ws;
}

std::vector<CylinderFunction> regroup_countable(const WeightSystem& cw) {
    if (cw.kind != WeightKind::Countable)
        throw DomainError("regroup_countable: needs a countable weight system");
    std::size_t sz = table_size(cw.r, cw.depth);
    std::vector<CylinderFunction> grouped;
    for (int a = 0; a < cw.r; ++a) {
        std::vector<double> q(sz, 0.0);
        for (std::size_t i = 0; i < sz; ++i) {
            double s = 0.0, c = 0.0;
            for (std::size_t j = static_cast<std::size_t>(a); j < cw.tables.size();
                 j += static_cast<std::size_t>(cw.r)) {
                double y = std::exp(cw.tables[j][i]) - c;
                double t = s + y;
                c = (t - s) - y;
                s = t;
            }
            q[i] = s;
        }
        grouped.emplace_back(cw.r, cw.depth, std::move(q));
    }
    return grouped;
}

namespace {

/// Per-level maximum oscillation: D[n-1] = max |f(u)-f(v)| over pairs whose
/// first mismatch sits at position n.
std::vector<double> level_oscillations(const CylinderFunction& f) {
    int r = f.alphabet_size();
    int k = f.depth();
    std::vector<double> levels(static_cast<std::size_t>(k), 0.0);
    std::size_t prefixes = 1;
    std::size_t block = f.size();
    for (int n = 1; n <= k; ++n) {
        block /= static_cast<std::size_t>(r);
        double level_max = 0.0;
        for (std::size_t p = 0; p < prefixes; ++p) {
            double lo_seen = std::numeric_limits<double>::infinity(), hi_seen = -lo_seen;
            for (int a = 0; a < r; ++a) {
                std::size_t base = (p * static_cast<std::size_t>(r) + static_cast<std::size_t>(a)) * block;
                double mn = f[base], mx = f[base];
                for (std::size_t i = 1; i < block; ++i) {
                    mn = std::min(mn, f[base + i]);
                    mx = std::max(mx, f[base + i]);
                }
                if (a > 0) level_max = std::max(level_max, std::max(hi_seen - mn, mx - lo_seen));
                lo_seen = std::min(lo_seen, mn);
                hi_seen = std::max(hi_seen, mx);
            }
        }
        levels[static_cast<std::size_t>(n - 1)] = level_max;
        prefixes *= static_cast<std::size_t>(r);
    }
    return levels;
}

} // namespace

DiniReport dini_modulus_check(const WeightSystem& weights, const std::vector<double>& t_grid) {
    if (weights.kind != WeightKind::Finite)
        throw DomainError("dini_modulus_check: needs a finite weight system");
    if (t_grid.empty()) throw DomainError("dini_modulus_check: empty grid");

    int k = weights.depth;
    // oscillation of log q_j per mismatch level, max over j
    std::vector<double> levels(static_cast<std::size_t>(k), 0.0);
    for (const auto& q : weights.tables) {
        std::vector<double> lv(q.size());
        for (std::size_t i = 0; i < q.size(); ++i) lv[i] = std::log(q[i]);
        auto l = level_oscillations(CylinderFunction(weights.r, k, std::move(lv)));
        for (int n = 0; n < k; ++n)
            levels[static_cast<std::size_t>(n)] =
                std::max(levels[static_cast<std::size_t>(n)], l[static_cast<std::size_t>(n)]);
    }
    auto rho = [&](double t) {
        double m = 0.0;
        for (int n = 1; n <= k; ++n)
            if (std::ldexp(1.0, -n) <= t) m = std::max(m, levels[static_cast<std::size_t>(n - 1)]);
        return m;
    };

    DiniReport rep;
    rep.certified_bound = weights.beta * weights.family_lip / 2.0;
    std::vector<double> grid(t_grid);
    std::sort(grid.begin(), grid.end());
    if (!(grid.front() > 0.0) || grid.back() > 1.0)
        throw DomainError("dini_modulus_check: grid values must lie in (0,1]");

    double prev_t = 0.0, prev_f = 0.0; // rho(t)/t -> 0 below the table resolution
    for (double t : grid) {
        double f = rho(t) / t;
        rep.max_ratio = std::max(rep.max_ratio, f);
        rep.integral += 0.5 * (f + prev_f) * (t - prev_t);
        prev_t = t;
        prev_f = f;
    }
    if (prev_t < 1.0) rep.integral += 0.5 * (prev_f + rho(1.0)) * (1.0 - prev_t);
    return rep;
}

HolderVariation holder_variation(const WeightSystem& weights, int n_max, double alpha) {
    if (weights.kind != WeightKind::Countable)
        throw DomainError("holder_variation: needs a countable weight system");
    if (n_max < 1) throw DomainError("holder_variation: n_max must be >= 1");

    int r = weights.r;
    int k = weights.depth;
    HolderVariation hv;
    hv.summable = true;
    hv.tail_bound = weights.tail_bound;
    hv.v_n.assign(static_cast<std::size_t>(n_max), 0.0);

    for (int n = 1; n <= n_max; ++n) {
        int prefix_len = n - 1;
        if (prefix_len >= k) break; // blocks are single cells: zero variation
        std::size_t blocks = table_size(r, prefix_len);
        std::size_t block_sz = table_size(r, k) / blocks;
        double worst = 0.0;
        for (const auto& q : weights.tables) {
            for (std::size_t p = 0; p < blocks; ++p) {
                std::size_t base = p * block_sz;
                double mn = q[base], mx = q[base];
                for (std::size_t i = 1; i < block_sz; ++i) {
                    mn = std::min(mn, q[base + i]);
                    mx = std::max(mx, q[base + i]);
                }
                worst = std::max(worst, mx - mn);
            }
        }
        hv.v_n[static_cast<std::size_t>(n - 1)] =
            worst * std::exp(alpha * static_cast<double>(n - 1));
    }
    hv.v_alpha = *std::max_element(hv.v_n.begin(), hv.v_n.end());
    return hv;
}

} // namespace gcf

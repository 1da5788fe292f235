#include "gcf/symbolic.hpp"

#include "gcf/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gcf {

std::size_t table_size(int alphabet_size, int depth) {
    if (alphabet_size < 2) throw DomainError("alphabet size must be >= 2");
    if (depth < 0) throw DomainError("depth must be >= 0");
    std::size_t n = 1;
    for (int i = 0; i < depth; ++i) {
        if (n > (std::size_t{1} << 40) / static_cast<std::size_t>(alphabet_size))
            throw DomainError("cylinder table too large: r^k exceeds budget");
        n *= static_cast<std::size_t>(alphabet_size);
    }
    return n;
}

Word::Word(std::vector<int> syms, int r) : symbols(std::move(syms)), alphabet_size(r) {
    if (r < 2) throw DomainError("alphabet size must be >= 2");
    for (int s : symbols)
        if (s < 0 || s >= r) throw DomainError("word symbol out of range");
}

std::size_t Word::index() const {
    std::size_t idx = 0;
    for (int s : symbols) idx = idx * static_cast<std::size_t>(alphabet_size) + static_cast<std::size_t>(s);
    return idx;
}

Word Word::from_index(std::size_t index, int r, int depth) {
    std::vector<int> syms(static_cast<std::size_t>(depth));
    for (int i = depth - 1; i >= 0; --i) {
        syms[static_cast<std::size_t>(i)] = static_cast<int>(index % static_cast<std::size_t>(r));
        index /= static_cast<std::size_t>(r);
    }
    return Word(std::move(syms), r);
}

std::string Word::str() const {
    std::string s;
    for (std::size_t i = 0; i < symbols.size(); ++i) {
        if (i) s += '.';
        s += std::to_string(symbols[i]);
    }
    return s.empty() ? std::string("()") : s;
}

Word prepend(int j, const Word& w) {
    if (j < 0 || j >= w.alphabet_size) throw DomainError("branch symbol out of range");
    std::vector<int> syms;
    syms.reserve(w.symbols.size() + 1);
    syms.push_back(j);
    syms.insert(syms.end(), w.symbols.begin(), w.symbols.end());
    return Word(std::move(syms), w.alphabet_size);
}

double distance(const Word& u, const Word& v, TailRule tail) {
    if (u.alphabet_size != v.alphabet_size)
        throw DomainError("distance: mismatched alphabet sizes");
    (void)tail; // single rule for now: pad with symbol 0
    std::size_t n = std::max(u.symbols.size(), v.symbols.size());
    for (std::size_t i = 0; i < n; ++i) {
        int a = i < u.symbols.size() ? u.symbols[i] : 0;
        int b = i < v.symbols.size() ? v.symbols[i] : 0;
        if (a != b) return std::ldexp(1.0, -static_cast<int>(i + 1));
    }
    return 0.0; // equal as extended points
}

CylinderFunction::CylinderFunction(int r, int depth, std::vector<double> values)
    : r_(r), depth_(depth), values_(std::move(values)) {
    std::size_t expect = table_size(r, depth);
    if (values_.size() != expect)
        throw DomainError("cylinder table has wrong size for depth");
    stride_ = depth > 0 ? expect / static_cast<std::size_t>(r) : 1;
}

CylinderFunction CylinderFunction::constant(int r, int depth, double c) {
    return CylinderFunction(r, depth, std::vector<double>(table_size(r, depth), c));
}

double CylinderFunction::eval_word(const Word& w) const {
    if (w.alphabet_size != r_) throw DomainError("eval_word: mismatched alphabet sizes");
    std::size_t idx = 0;
    for (int i = 0; i < depth_; ++i) {
        int s = i < w.length() ? w.symbols[static_cast<std::size_t>(i)] : 0;
        idx = idx * static_cast<std::size_t>(r_) + static_cast<std::size_t>(s);
    }
    return values_[idx];
}

double CylinderFunction::at_branch(int j, std::size_t index) const {
    return values_[branch_target(j, index, r_, stride_)];
}

CylinderFunction refine(const CylinderFunction& f, int new_depth) {
    if (new_depth < f.depth()) throw DomainError("refine: target depth below current depth");
    if (new_depth == f.depth()) return f;
    int r = f.alphabet_size();
    std::size_t out_size = table_size(r, new_depth);
    std::size_t block = out_size / f.size(); // r^{k'-k}
    std::vector<double> out(out_size);
    for (std::size_t i = 0; i < f.size(); ++i)
        std::fill(out.begin() + static_cast<std::ptrdiff_t>(i * block),
                  out.begin() + static_cast<std::ptrdiff_t>((i + 1) * block), f[i]);
    return CylinderFunction(r, new_depth, std::move(out));
}

double discrete_lipschitz(const CylinderFunction& f) {
    if (f.depth() < 1) throw DomainError("discrete_lipschitz: depth must be >= 1");
    int r = f.alphabet_size();
    int k = f.depth();
    // Pairs with first mismatch at position n share a length-(n-1) prefix and
    // take distance 2^{-n}; scan prefix blocks per level instead of all pairs.
    double lip = 0.0;
    std::size_t prefixes = 1;
    std::size_t block = f.size(); // r^{k-n+1} at level n
    for (int n = 1; n <= k; ++n) {
        block /= static_cast<std::size_t>(r);
        double level_max = 0.0;
        for (std::size_t p = 0; p < prefixes; ++p) {
            // per-symbol min/max inside this prefix block; cross-symbol pairs
            // only (equal leading symbol means a deeper mismatch level)
            double scale = 0.0;
            double lo_seen = std::numeric_limits<double>::infinity(), hi_seen = -lo_seen;
            for (int a = 0; a < r; ++a) {
                std::size_t base = (p * static_cast<std::size_t>(r) + static_cast<std::size_t>(a)) * block;
                double mn = f[base], mx = f[base];
                for (std::size_t i = 1; i < block; ++i) {
                    mn = std::min(mn, f[base + i]);
                    mx = std::max(mx, f[base + i]);
                }
                if (a > 0) scale = std::max(scale, std::max(hi_seen - mn, mx - lo_seen));
                lo_seen = std::min(lo_seen, mn);
                hi_seen = std::max(hi_seen, mx);
            }
            level_max = std::max(level_max, scale);
        }
        lip = std::max(lip, std::ldexp(level_max, n)); // / 2^{-n}
        prefixes *= static_cast<std::size_t>(r);
    }
    return lip;
}

CylinderMeasure::CylinderMeasure(int r, int depth, std::vector<double> weights, bool probability)
    : r_(r), depth_(depth), weights_(std::move(weights)), probability_(probability) {
    std::size_t expect = table_size(r, depth);
    if (weights_.size() != expect)
        throw DomainError("cylinder measure has wrong size for depth");
    for (double w : weights_)
        if (!(w >= 0.0)) throw DomainError("cylinder measure weights must be >= 0");
    if (probability_) {
        double m = total_mass();
        if (std::abs(m - 1.0) > 1e-12)
            throw DomainError("probability measure mass differs from 1 by more than 1e-12");
    }
}

CylinderMeasure CylinderMeasure::uniform(int r, int depth) {
    std::size_t n = table_size(r, depth);
    return CylinderMeasure(r, depth, std::vector<double>(n, 1.0 / static_cast<double>(n)), true);
}

double CylinderMeasure::total_mass() const {
    double s = 0.0, c = 0.0;
    for (double w : weights_) { // Kahan, fixed order
        double y = w - c;
        double t = s + y;
        c = (t - s) - y;
        s = t;
    }
    return s;
}

CylinderMeasure CylinderMeasure::normalized() const {
    double m = total_mass();
    if (!(m > 0.0)) throw DomainError("cannot normalize a zero measure");
    std::vector<double> w(weights_);
    for (double& x : w) x /= m;
    return CylinderMeasure(r_, depth_, std::move(w), true);
}

double CylinderMeasure::integrate(const CylinderFunction& f) const {
    if (f.depth() != depth_ || f.alphabet_size() != r_)
        throw DomainError("integrate: depth or alphabet mismatch");
    double s = 0.0, c = 0.0;
    for (std::size_t i = 0; i < weights_.size(); ++i) {
        double y = weights_[i] * f[i] - c;
        double t = s + y;
        c = (t - s) - y;
        s = t;
    }
    return s;
}

} // namespace gcf

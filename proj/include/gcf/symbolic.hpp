#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace gcf {

/// Number of depth-k cylinders, r^k. Throws if the table would not fit in
/// memory (guard for CLI-provided depths).
std::size_t table_size(int alphabet_size, int depth);

/// How finite words are extended to points of the sequence space when a
/// metric computation needs infinitely many symbols.
enum class TailRule {
    PadZero, ///< append symbol 0 forever (the convention all oracles use)
};

/// A finite word over the alphabet {0, ..., r-1}. Words double as cylinder
/// addresses: the word (w1..wk) names the set of sequences starting with it.
struct Word {
    std::vector<int> symbols;
    int alphabet_size = 2;

    Word() = default;
    Word(std::vector<int> syms, int r);

    int length() const { return static_cast<int>(symbols.size()); }

    /// Base-r integer encoding, most-significant digit = first symbol.
    std::size_t index() const;

    static Word from_index(std::size_t index, int r, int depth);

    std::string str() const;
};

/// The word (j, w1, ..., wk); realizes the IFS branch map on addresses.
Word prepend(int j, const Word& w);

/// 2^{-n} where n is the first position (1-based) at which the two extended
/// points disagree; 0 if they are equal as extended points.
double distance(const Word& u, const Word& v, TailRule tail = TailRule::PadZero);

/// Index of prepend(j, word(index)) truncated back to depth k:
/// (j, w1, ..., w_{k-1}). stride = r^{k-1}. O(1) branch step on tables.
inline std::size_t branch_target(int j, std::size_t index, int r, std::size_t stride) {
    return static_cast<std::size_t>(j) * stride + index / static_cast<std::size_t>(r);
}

/// A real-valued function constant on depth-k cylinders, stored as a table
/// over all r^k words of length k. Depth 0 is a single constant.
class CylinderFunction {
public:
    CylinderFunction() = default;
    CylinderFunction(int r, int depth, std::vector<double> values);
    static CylinderFunction constant(int r, int depth, double c);

    int alphabet_size() const { return r_; }
    int depth() const { return depth_; }
    std::size_t size() const { return values_.size(); }

    double operator[](std::size_t i) const { return values_[i]; }
    double& operator[](std::size_t i) { return values_[i]; }
    const std::vector<double>& values() const { return values_; }
    std::vector<double>& values() { return values_; }

    /// Value on the cylinder containing the given word extended by the tail
    /// rule: pads with 0 / truncates to this table's depth.
    double eval_word(const Word& w) const;

    /// Value at the cell reached from cell `index` by branch j.
    double at_branch(int j, std::size_t index) const;

    /// Stride r^{k-1} used by branch arithmetic.
    std::size_t stride() const { return stride_; }

private:
    int r_ = 2;
    int depth_ = 0;
    std::size_t stride_ = 1;
    std::vector<double> values_;
};

/// Copies each depth-k value onto all of its depth-k' descendants.
CylinderFunction refine(const CylinderFunction& f, int new_depth);

/// max over word pairs u != v of |f(u)-f(v)| / d(u,v) with the default tail
/// rule; a lower bound for the Lipschitz constant of any extension of f.
double discrete_lipschitz(const CylinderFunction& f);

/// A nonnegative measure with atoms on depth-k cylinders.
class CylinderMeasure {
public:
    CylinderMeasure() = default;
    /// probability=true validates total mass 1 within 1e-12.
    CylinderMeasure(int r, int depth, std::vector<double> weights, bool probability);
    static CylinderMeasure uniform(int r, int depth);

    int alphabet_size() const { return r_; }
    int depth() const { return depth_; }
    std::size_t size() const { return weights_.size(); }
    bool is_probability() const { return probability_; }

    double operator[](std::size_t i) const { return weights_[i]; }
    const std::vector<double>& weights() const { return weights_; }

    double total_mass() const;

    /// Rescales to total mass 1 (fails on zero mass).
    CylinderMeasure normalized() const;

    /// Integral of a same-depth cylinder function, fixed summation order.
    double integrate(const CylinderFunction& f) const;

private:
    int r_ = 2;
    int depth_ = 0;
    std::vector<double> weights_;
    bool probability_ = false;
};

} // namespace gcf

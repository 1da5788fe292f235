#pragma once

#include <stdexcept>
#include <string>

namespace gcf {

/// Invalid argument / contract violation detected at a module boundary.
class DomainError : public std::invalid_argument {
public:
    explicit DomainError(const std::string& what) : std::invalid_argument(what) {}
};

/// A numerical certificate could not be established (divergent series,
/// missing growth constants, infeasible constraint).
class CertificateError : public std::runtime_error {
public:
    explicit CertificateError(const std::string& what) : std::runtime_error(what) {}
};

/// A summand's exponent left the representable range; carries the offending
/// particle number and word index.
class OverflowError : public std::runtime_error {
public:
    OverflowError(const std::string& what, long particle_number, std::size_t word_index)
        : std::runtime_error(what), n(particle_number), word(word_index) {}
    long n;
    std::size_t word;
};

/// An operation refused to run because its cost estimate exceeds the budget.
class BudgetError : public std::runtime_error {
public:
    explicit BudgetError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace gcf

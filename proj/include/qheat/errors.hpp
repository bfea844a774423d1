// errors.hpp: exception types raised by the library

#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace qheat {

/// Inputs outside the documented domain of a formula.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Positivity lost during integration beyond 1e-6; the step is too coarse.
class StepUnstable : public std::runtime_error {
public:
    StepUnstable(double time, double min_eigenvalue);
    double time;
    double min_eigenvalue;
};

/// Cycle iteration hit max_cycles before the start state settled.
class NotConverged : public std::runtime_error {
public:
    NotConverged(int cycles, double residual);
    int cycles;
    double residual;
};

/// The composite cycle map has spectral radius 1 (no dissipation).
class SingularMap : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Coherence phasor too small to define a winding number.
class UndefinedWinding : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A predicted resonance without a local maximum inside its window.
class NoPeak : public std::runtime_error {
public:
    NoPeak(int order, double predicted_f);
    int order;
    double predicted_f;
};

class ParseError : public std::runtime_error {
public:
    ParseError(int line, std::string key, const std::string& what);
    int line;
    std::string key;
};

/// Aggregates every schema violation found in a configuration.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(std::vector<std::string> violations);
    std::vector<std::string> violations;
};

}  // namespace qheat

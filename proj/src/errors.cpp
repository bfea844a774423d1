#include "qheat/errors.hpp"

#include <sstream>

namespace qheat {

namespace {

std::string join_violations(const std::vector<std::string>& v) {
    std::ostringstream out;
    out << v.size() << " configuration error(s)";
    for (const auto& s : v) out << "\n  - " << s;
    return out.str();
}

}  // namespace

StepUnstable::StepUnstable(double time_, double min_eigenvalue_)
    : std::runtime_error("density matrix lost positivity at t = " + std::to_string(time_) +
                         " ns (min eigenvalue " + std::to_string(min_eigenvalue_) +
                         "); increase steps_per_cycle"),
      time(time_),
      min_eigenvalue(min_eigenvalue_) {}

NotConverged::NotConverged(int cycles_, double residual_)
    : std::runtime_error("steady cycle not reached after " + std::to_string(cycles_) +
                         " cycles (residual " + std::to_string(residual_) + ")"),
      cycles(cycles_),
      residual(residual_) {}

NoPeak::NoPeak(int order_, double predicted_f_)
    : std::runtime_error("no local maximum near predicted order " + std::to_string(order_) +
                         " peak at " + std::to_string(predicted_f_) + " GHz"),
      order(order_),
      predicted_f(predicted_f_) {}

ParseError::ParseError(int line_, std::string key_, const std::string& what)
    : std::runtime_error("line " + std::to_string(line_) + (key_.empty() ? "" : " (" + key_ + ")") +
                         ": " + what),
      line(line_),
      key(std::move(key_)) {}

ValidationError::ValidationError(std::vector<std::string> v)
    : std::runtime_error(join_violations(v)), violations(std::move(v)) {}

}  // namespace qheat

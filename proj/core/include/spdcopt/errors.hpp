#pragma once

#include <stdexcept>
#include <string>

namespace spdcopt {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// An iterative search exhausted its iteration budget.
class ConvergenceError : public std::runtime_error {
public:
  ConvergenceError(const std::string& what, double best_x, double best_f)
      : std::runtime_error(what), best_x_(best_x), best_f_(best_f) {}

  double best_x() const noexcept { return best_x_; }
  double best_f() const noexcept { return best_f_; }

private:
  double best_x_;
  double best_f_;
};

/// A closed form disagreed with the regime it was classified into.
class ConsistencyError : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

} // namespace spdcopt

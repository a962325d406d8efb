#pragma once

#include <stdexcept>
#include <string>

namespace sqt {

// Argument and precondition violations use std::invalid_argument, inputs
// outside a function's domain use std::domain_error. The types below carry
// the numerical state a caller needs to decide what to do next.

/// A numerical procedure did not reach its requested accuracy.
class numeric_error : public std::runtime_error {
 public:
  numeric_error(const std::string& what, double achieved)
      : std::runtime_error(what), achieved_(achieved) {}
  double achieved() const noexcept { return achieved_; }

 private:
  double achieved_;
};

/// A spectral expansion could not capture the requested norm.
class truncation_error : public std::runtime_error {
 public:
  truncation_error(const std::string& what, double captured_norm, int modes)
      : std::runtime_error(what), captured_norm_(captured_norm), modes_(modes) {}
  double captured_norm() const noexcept { return captured_norm_; }
  int modes() const noexcept { return modes_; }

 private:
  double captured_norm_;
  int modes_;
};

/// Evaluation requested on the singular set of a trigonometric closed form.
class singular_time_error : public std::domain_error {
 public:
  singular_time_error(const std::string& what, double t) : std::domain_error(what), t_(t) {}
  double time() const noexcept { return t_; }

 private:
  double t_;
};

/// Amplitudes became non-finite during grid propagation.
class blowup_error : public std::runtime_error {
 public:
  blowup_error(const std::string& what, int step) : std::runtime_error(what), step_(step) {}
  int step() const noexcept { return step_; }

 private:
  int step_;
};

/// Malformed or inconsistent experiment configuration.
class config_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace sqt

#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>

namespace dssf {

using cplx = std::complex<double>;

// Base class for numerical failures that carry diagnostics (non-convergence,
// inadequate truncation, failed cross-checks).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConvergenceError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class TruncationError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class CrossCheckError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// Thread count used by parallel_for. 0 means "hardware concurrency".
void set_thread_count(unsigned n);
unsigned thread_count();

// Runs body(i) for i in [0, n). Each index is visited exactly once; callers
// write into preallocated slots so results never depend on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace dssf

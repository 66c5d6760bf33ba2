#pragma once

#include <functional>
#include <limits>
#include <vector>

namespace dssf {

struct GaussRule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

// n-point Gauss-Legendre rule (Newton iteration on the three-term recurrence).
// Rules are cached; the returned reference stays valid for the program lifetime.
const GaussRule& gauss_legendre(int n);

double log_sum_exp(const std::vector<double>& terms);
double log_add(double a, double b);

struct LogIntegral {
  double log_value = -std::numeric_limits<double>::infinity();
  double lo = 0.0, hi = 0.0;  // integration window actually used
  int panels = 0;
  int nodes_per_panel = 0;
  double last_change = 0.0;   // |log I_n - log I_{n/2}| at acceptance
};

struct PeakedOptions {
  double drop = 75.0;       // window = region where log f > max - drop
  double rel_tol = 1e-10;   // acceptance on successive panel doublings
  int gauss_points = 16;
  int initial_panels = 8;
  int max_doublings = 10;
  int samples = 256;        // coarse scan used to locate the peak
};

// log of the integral of exp(log_f) over [lo, hi] for a (possibly extremely
// large or small) positive integrand concentrated around a single bump.
// Throws ConvergenceError when panel doubling does not stabilise.
LogIntegral log_integrate_peaked(const std::function<double(double)>& log_f, double lo,
                                 double hi, const PeakedOptions& opt = {});

// Location and value of the maximum of log_f on [lo, hi] (coarse scan + Brent).
struct Peak {
  double x = 0.0;
  double value = -std::numeric_limits<double>::infinity();
};
Peak find_peak(const std::function<double(double)>& log_f, double lo, double hi, int samples);

// Window [a, b] inside [lo, hi] where log_f exceeds its maximum minus `drop`.
struct Window {
  double a = 0.0, b = 0.0;
  Peak peak;
};
Window peaked_window(const std::function<double(double)>& log_f, double lo, double hi,
                     double drop = 75.0, int samples = 256);

}  // namespace dssf

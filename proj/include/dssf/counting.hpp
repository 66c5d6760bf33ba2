#pragma once

#include <cstddef>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "dssf/common.hpp"

namespace dssf {

// Eigenvalues kept as (log|value|, sign) so that counts at thresholds like
// 1e-300 or far below are exact comparisons of logs.
class LogSpectrum {
 public:
  struct Entry {
    double log_abs;
    int sign;  // +1, -1, or 0 (exact zero, log_abs = -inf)
  };

  LogSpectrum() = default;
  static LogSpectrum from_values(const std::vector<double>& values);
  static LogSpectrum from_logs(const std::vector<double>& log_abs, const std::vector<int>& signs);
  static LogSpectrum from_matrix(const Eigen::MatrixXcd& hermitian);

  // Sorted descending by signed value.
  const std::vector<Entry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  // Number of eigenvalues > s (resp. < -s). s must be positive.
  std::size_t n_plus(double s) const;
  std::size_t n_minus(double s) const;
  std::size_t n_plus_log(double log_s) const;
  std::size_t n_minus_log(double log_s) const;

  // Eigenvalues within relative 1e-13 of the threshold s (ties are counted as
  // "not above" but reported here so callers can flag them).
  std::size_t near_threshold(double s, double rel = 1e-13) const;

  // Multiplies every eigenvalue by a positive factor exp(log_factor).
  LogSpectrum scaled(double log_factor) const;
  LogSpectrum merged(const LogSpectrum& other) const;
  LogSpectrum negated() const;

  // log sum |lambda|^p (-inf for an all-zero spectrum).
  double log_schatten_power(double p) const;
  std::vector<double> values() const;  // may underflow to 0

  // Smallest magnitude that a truncated operator could have dropped: the log
  // of the last retained eigenvalue of the truncation (-inf when exact).
  double log_truncation_floor() const { return log_floor_; }
  void set_log_truncation_floor(double v) { log_floor_ = v; }
  // A count at threshold s is trustworthy when the floor is below s * 1e-3.
  bool adequate_for(double s) const;
  bool adequate_for_log(double log_s) const;

 private:
  void sort_entries();
  std::vector<Entry> entries_;
  double log_floor_ = -std::numeric_limits<double>::infinity();
};

std::size_t n_plus(double s, const LogSpectrum& spec);
std::size_t n_minus(double s, const LogSpectrum& spec);

// Eigenvalues of a hermitian matrix (ascending).
Eigen::VectorXd hermitian_eigenvalues(const Eigen::MatrixXcd& m);
std::size_t count_above(const Eigen::VectorXd& eig, double s);  // # eig > s

bool check_weyl(double s1, double s2, const Eigen::MatrixXcd& t1, const Eigen::MatrixXcd& t2);
bool check_pbound(double s, const LogSpectrum& spec, int p);

enum class CountSign { Plus, Minus };

// Integral over the Cauchy measure dmu = dt / (pi (1+t^2)) of n_sign(s; A + tB).
struct MuAverage {
  double value = 0.0;
  std::size_t jumps = 0;         // jump points used
  std::size_t bisections = 0;    // jumps recovered by bisection
};
MuAverage mu_average_counting(double s, const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b,
                              CountSign sign = CountSign::Plus);

// Closed form (1/pi) sum arctan(lambda_j / s) evaluated two ways
// (per-eigenvalue Cauchy tails and the direct sum); throws on disagreement.
struct ArctanIdentity {
  double lhs = 0.0;
  double rhs = 0.0;
};
ArctanIdentity arctan_trace_identity(double s, const LogSpectrum& spec);

bool check_flip(const Eigen::MatrixXcd& b, double s);

bool check_pushnitski_bound(double s1, double s2, const Eigen::MatrixXcd& t1,
                            const Eigen::MatrixXcd& t2, CountSign sign = CountSign::Plus);

}  // namespace dssf

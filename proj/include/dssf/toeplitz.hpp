#pragma once

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "dssf/counting.hpp"
#include "dssf/csv.hpp"
#include "dssf/landau.hpp"

namespace dssf {

// Decay classes of a nonnegative symbol U on R^2.
struct PowerLaw {
  double alpha = 0.0;  // U(r) ~ u r^{-alpha}
  double u = 1.0;      // angular coefficient (constant for radial symbols)
  // int_{S^1} u^{2/alpha} dtheta
  double angular_integral() const;
};
struct Exponential {
  double eta = 1.0;    // ln U(r) ~ -eta r^{2 beta}
  double beta = 1.0;
};
struct CompactSupport {
  double R = 1.0;      // support radius
  double c = 1.0;      // U >= c on a nonempty open subset
};
using DecayLaw = std::variant<PowerLaw, Exponential, CompactSupport>;

class RadialProfile {
 public:
  using Fn = std::function<double(double)>;

  // U = amplitude exp(-eta r^{2 beta})
  static RadialProfile stretched_exponential(double amplitude, double eta, double beta);
  // U = amplitude (1 + r^2)^{-alpha/2}
  static RadialProfile power_law(double amplitude, double alpha);
  // U = c on r < R, 0 outside
  static RadialProfile disc(double radius, double c);
  static RadialProfile constant(double c);
  // Arbitrary profile; log_eval may be empty (then log(eval) is used).
  // sup is an upper bound of eval; support_radius is set for compact support.
  RadialProfile(std::string name, Fn eval, Fn log_eval, std::optional<DecayLaw> law, double sup,
                std::optional<double> support_radius = std::nullopt);

  double operator()(double r) const { return eval_(r); }
  double log_eval(double r) const;
  const std::optional<DecayLaw>& law() const { return law_; }
  double sup() const { return sup_; }
  std::optional<double> support_radius() const { return support_; }
  const std::string& name() const { return name_; }
  bool is_zero() const { return sup_ == 0.0; }

  // c * U, with the law parameters adjusted accordingly.
  RadialProfile scaled(double c) const;

  // Compares log U against the law's tail model at r = 10, 20, 40.
  // Throws std::invalid_argument on an inconsistent classification.
  void check_classification() const;

 private:
  std::string name_;
  Fn eval_, log_eval_;
  std::optional<DecayLaw> law_;
  double sup_ = 0.0;
  std::optional<double> support_;
};

struct ToeplitzModel {
  LLLBasis basis;
  std::string profile_name;
  // log eigenvalue per angular momentum k (radial path) or sorted eigenvalues
  // (general path); -inf marks an exact zero.
  std::vector<double> log_eigenvalues;
  LogSpectrum spectrum;
  Eigen::MatrixXcd matrix;  // dense general-path matrix (empty on the radial path)
  double b0 = 1.0;
  double osc = 0.0;

  int K() const { return basis.K; }
  // Truncation adequacy for counts at s: eigenvalue_{K-1} < s * 1e-3.
  bool adequate_for(double s) const { return spectrum.adequate_for(s); }
  void require_adequate(double s) const;
};

// log of the k-th diagonal Toeplitz entry int U r^{2k+1} e^{-2phi} / int r^{2k+1} e^{-2phi}.
double log_radial_toeplitz_entry(const RadialProfile& profile, const FieldSpec& field, int k,
                                 double log_norm);

ToeplitzModel toeplitz_radial_spectrum(const RadialProfile& profile, const LLLBasis& basis);

// Grows K until the last eigenvalue drops below s_min * 1e-3 (or K_max is hit,
// which throws TruncationError). The initial K comes from the law's predicted decay.
ToeplitzModel toeplitz_radial_adaptive(const RadialProfile& profile, const FieldSpec& field,
                                       double s_min, int k_max = 400000);

// Symbol U(r, theta) >= 0.
using PlanarSymbol = std::function<double(double, double)>;
ToeplitzModel toeplitz_general_matrix(const PlanarSymbol& u, const LLLBasis& basis,
                                      int angular_modes);

struct RaikovCheck {
  double lhs = 0.0;  // sum of eigenvalue^q over the truncation
  double rhs = 0.0;  // (b0 / 2 pi) e^{2 osc} int U^q
  bool holds = false;
};
RaikovCheck check_raikov_bound(const ToeplitzModel& model, const RadialProfile& profile, int q);

// int_{R^2} U^q for a radial profile (2 pi int_0^inf U(r)^q r dr).
double planar_integral_power(const RadialProfile& profile, int q);

// CSV table k, log10_eigenvalue.
CsvTable toeplitz_spectrum_table(const ToeplitzModel& model);

}  // namespace dssf

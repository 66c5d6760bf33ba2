#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dssf/asymptotics.hpp"
#include "dssf/counting.hpp"
#include "dssf/csv.hpp"
#include "dssf/dirac_algebra.hpp"
#include "dssf/kernels1d.hpp"
#include "dssf/toeplitz.hpp"

namespace dssf {

// Nonnegative profile g(x3) of the longitudinal variable.
struct LongitudinalProfile {
  std::string name;
  std::function<double(double)> eval;
  double integral = 0.0;   // int_R g
  double decay = 0.0;      // algebraic decay exponent (inf for faster-than-power)
  bool even = true;

  // amplitude * exp(-(x/width)^2)
  static LongitudinalProfile gaussian(double amplitude, double width);
  // amplitude * <x>^{-nu3}
  static LongitudinalProfile power(double amplitude, double nu3);
};

// Separable V(x) = matrix_part * U(|x_perp|) * g(x3).
class PotentialSpec {
 public:
  PotentialSpec(HermitianMatrix4 matrix_part, RadialProfile transverse, LongitudinalProfile longitudinal,
                double nu);

  const HermitianMatrix4& matrix_part() const { return matrix_; }
  const RadialProfile& transverse() const { return transverse_; }
  const LongitudinalProfile& longitudinal() const { return longitudinal_; }
  double nu() const { return nu_; }

  // W_+ = int V_11 dx3 and W_- = int V_33 dx3 as radial profiles.
  double w_plus_factor() const;
  double w_minus_factor() const;
  RadialProfile w_plus() const { return transverse_.scaled(w_plus_factor()); }
  RadialProfile w_minus() const { return transverse_.scaled(w_minus_factor()); }

 private:
  HermitianMatrix4 matrix_;
  RadialProfile transverse_;
  LongitudinalProfile longitudinal_;
  double nu_;
};

// Spectra of pW_+p and pW_-p. For a constant field the full traces are known
// exactly ((b0 / 2 pi) int W); they are used to account for arctan tails.
struct WSpectra {
  LogSpectrum plus, minus;
  std::optional<double> trace_plus, trace_minus;
};

// Both spectra from one Toeplitz model of the transverse profile.
WSpectra make_w_spectra(const PotentialSpec& p, const ToeplitzModel& transverse_model);

enum class Pair { HPlus, HMinus };
enum class Side { Inside, Outside };
const char* pair_name(Pair p);

struct BracketEstimate {
  double lower = 0.0;
  double upper = 0.0;
  double epsilon = 0.1;
  double threshold_low = 0.0;   // thresholds (or arctan scales) behind the endpoints
  double threshold_high = 0.0;
  bool bounded = false;          // the O(1)-flat case: no divergent leading term
  std::size_t near_threshold = 0;
  double midpoint() const { return 0.5 * (lower + upper); }
};

// s -> 2 s sqrt((m -+ lambda)/(m +- lambda)); n_+(s; omega_+) = n_+(factor s; pW_+p),
// n_-(s; omega_-) = n_+(factor s; pW_-p).
double omega_threshold(double lambda, double m, CountSign sign);

BracketEstimate xi_inside_bracket(double lambda, double m, double eps, const WSpectra& w, Pair pair);

// Eigenvalues of Omega^(1)(lambda): sqrt((l+m)/(l-m)) mu+/2 and sqrt((l-m)/(l+m)) mu-/2.
LogSpectrum build_omega1(double lambda, double m, const WSpectra& w);

struct ArctanTrace {
  double path_direct = 0.0;     // sum arctan(scaled mu / s)
  double path_staircase = 0.0;  // Cauchy integrals of the counting staircases
};
// Tr arctan(s^{-1} Omega^(1)); throws CrossCheckError when the two paths differ by > 1e-10.
ArctanTrace trace_arctan_omega1(double lambda, double m, double s, const WSpectra& w);

struct OmegaModel {
  double lambda = 0.0, m = 1.0;
  double k_lambda = 0.0;
  Eigen::Matrix2d moments;      // [[int cos^2 g, int sin cos g], [., int sin^2 g]]
  Eigen::Matrix2cd a_tilde;     // [[|l+m| V11, k V13], [k V31, |l-m| V33]]
  Eigen::MatrixXcd kernel;      // assembled 8x8 block (moments (x) spinor part)
  Eigen::VectorXd kernel_eigenvalues;
  LogSpectrum spectrum;
  std::optional<double> trace_transverse;  // Tr pUp when known exactly
  double log_prefactor = 0.0;              // log of 1 / (2 k_lambda)

  double trace() const;  // sum of eigenvalues of the truncated model
};

OmegaModel build_omega_full(double lambda, double m, const PotentialSpec& p,
                            const ToeplitzModel& transverse_model, const Grid1D& grid);

// Tr arctan(c * spectrum) with an optional linear tail correction for the
// eigenvalues dropped by truncation (tail = known trace - retained sum).
double trace_arctan(const LogSpectrum& spec, double log_c, std::optional<double> tail_mass = {});

struct OmegaSource {
  const WSpectra* w = nullptr;          // Omega^(1) path (default)
  const OmegaModel* full = nullptr;     // full Omega path
};

BracketEstimate xi_outside_bracket(double lambda, double m, double eps, const OmegaSource& omega, Pair pair);

// Leading-order prediction for xi near the threshold approached by lambda.
double predict_xi(const AsymptoticLaw& law, double lambda, double m, Pair pair);
// 1/(2 cos(pi/alpha)) for power laws, 1/2 otherwise.
double outside_prefactor(const AsymptoticLaw& law);

struct LevinsonRow {
  double eps = 0.0;
  double lambda_inside = 0.0, lambda_outside = 0.0;
  BracketEstimate inside, outside;
  double ratio = 0.0;
  double target = 0.0;
};
std::vector<LevinsonRow> levinson_ratio(const AsymptoticLaw& law, Pair pair, const std::vector<double>& eps_sequence,
                                        double m, double bracket_eps, const WSpectra& w);

struct SpecABCheck {
  double lambda = 0.0;
  std::vector<double> o_plus;     // nonzero eigenvalues of the assembled O_+
  std::vector<double> omega_plus; // leading eigenvalues of omega_+
  double max_rel_diff = 0.0;
  std::size_t dimension = 0;
};
// O_+ = (1/2) sqrt((m+l)/(m-l)) K_+^* K_+ on span{sqrt(U) phi_k} (x) grid (x) C^4.
SpecABCheck spec_ab_check(double lambda, double m, const PotentialSpec& p, const ToeplitzModel& transverse_model,
                          const Grid1D& grid);

struct SsfSweepRow {
  double lambda = 0.0, eps = 0.0;
  BracketEstimate bracket;
  double prediction = 0.0;
  double ratio_mid_to_prediction = 0.0;
};
CsvTable ssf_sweep_table(const std::vector<SsfSweepRow>& rows);

}  // namespace dssf

#pragma once

// Closed-form constants, sample-size thresholds and complexity bounds for
// progressive constraint sampling, plus a grid scan that estimates the
// strong-Morse margins of a two-dimensional problem.
//
// The constants are inputs: the module evaluates formulas, it does not verify
// that a problem satisfies the assumptions behind them.

#include "pcsm/model.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace pcsm::theory {

struct ProblemConstants {
  double sigma_min = 1.0;     // lower bound on sigma_m of every sampled Jacobian
  double kappa_grad_f = 1.0;  // bound on ||grad f||
  double kappa_grad_c = 1.0;  // bound on ||grad c||
  double kappa_hess_f = 1.0;  // bound on ||grad^2 f||
  double kappa_hess_c = 1.0;  // bound on ||grad^2 [c]_j||
  double gamma_c = 1.0;       // dispersion of the constraint terms
  double gamma_grad_c = 1.0;  // relative dispersion of the term Jacobians
  double gamma_hess_c = 1.0;  // relative dispersion of the term Hessians
  double alpha = 1.0;         // strong-Morse gradient radius
  double beta = 1.0;          // strong-Morse curvature margin
  Index m = 1;
  Index n_samples = 1;

  void validate() const;
};

struct Kappas {
  double kappa1 = 0.0;
  double kappa2 = 0.0;
  double kappa3 = 0.0;
};

struct Taus {
  double tau1 = 0.0;
  double tau2 = 0.0;
};

struct MorseMargins {
  double alpha_s = 0.0;
  double beta_s = 0.0;
  bool alpha_ok = false;  // alpha_s >= alpha / 2
  bool beta_ok = false;   // beta_s >= beta / 2
};

struct SampleSizeThresholds {
  double acute = 0.0;        // |S| must exceed this for acute Jacobian perturbations
  double multiplier = 0.0;   // |S| at or above this bounds the multiplier deviation
  Index morse = 0;           // smallest |S| inheriting the strong-Morse property
  Index warm_start = 0;      // smallest p1 for the tolerance-schedule guarantee
};

struct FletcherConstants {
  double kappa_s = 0.0;
  double sigma_min = 1.0;
  double beta_s = 0.0;
  Index m = 1;
  double eta1 = 0.0;
  double eta2 = 0.0;
  double eta3 = 0.0;
  double eta4 = 0.0;
  double eps_bar = 0.0;
  double m_bar = 0.0;  // Lipschitz constant of the Fletcher Hessian (user supplied)
  double r = 0.0;      // sublevel radius (user supplied)
};

struct RhoInterval {
  double rho_lo = 0.0;
  double rho_hi = 0.0;
  bool hi_unbounded = false;
};

struct ComplexityInputs {
  Index n_samples = 1;
  Index first_sample_size = 1;
  double eps1 = 1.0;   // first-level tolerances
  double zeta1 = 1.0;
  double eps = 1.0;    // final tolerances
  double zeta = 1.0;
  double u1 = 1.0;
  double u2 = 1.0;
  double omega_bar = 1.0;
  double tau1 = 1.0;
  double kappa1 = 1.0;
};

struct ComplexityBounds {
  double one_shot = 0.0;
  double progressive = 0.0;
};

/// sqrt(N (N - s) / s^2), the sampling-error scale of an s-element sample.
double xi(Index n_samples, Index sample_size);

Kappas kappas(const ProblemConstants& c);
Taus taus(const ProblemConstants& c);
MorseMargins morse_margins(const ProblemConstants& c, double xi_value);
SampleSizeThresholds min_sample_sizes(const ProblemConstants& c);

/// eta_1..eta_4 and eps_bar from kappa_S, sigma_min, beta_S and m.
FletcherConstants fletcher_constants(double kappa_s, double sigma_min, double beta_s, Index m,
                                     double m_bar, double r);

/// (rho_lo(eps), rho_hi(eps)) for eps in [0, eps_bar). eps = 0 gives the
/// unbounded limit. Throws EpsilonOutOfRange otherwise.
RhoInterval fletcher_rho_interval(const FletcherConstants& fc, double beta_s, double epsilon);

ComplexityBounds complexity_bounds(const ComplexityInputs& in);

// --- strong-Morse grid scan --------------------------------------------------

struct GridSpec {
  std::array<double, 2> lo{-1.0, -1.0};
  std::array<double, 2> hi{1.0, 1.0};
  Index resolution = 101;  // points per axis
};

struct MorsePoint {
  double x1 = 0.0;
  double x2 = 0.0;
  double grad_l_norm = 0.0;
  double lambda_min_abs = 0.0;  // min |eig| of the reduced Hessian
  double lambda_min = 0.0;      // min eig of the reduced Hessian
  bool rank_ok = true;

  friend bool operator==(const MorsePoint&, const MorsePoint&) = default;
};

struct MorseGrid {
  std::vector<MorsePoint> points;  // x1 varies slowest
  double eps_level = 0.0;
  Index qualifying = 0;            // rank-ok points with grad_l_norm <= eps_level
  double min_lambda = 0.0;         // min lambda_min_abs over qualifying points (+inf if none)
};

/// Evaluates ||grad L_S(x, y_S(x))|| and the reduced-Hessian eigenvalues on a
/// grid over a two-dimensional problem. Points are split across threads; the
/// output order is fixed.
MorseGrid morse_scan(const SampledProblem& p, const SampleSet& s, const GridSpec& grid,
                     double eps_level, unsigned threads = 0);

}  // namespace pcsm::theory

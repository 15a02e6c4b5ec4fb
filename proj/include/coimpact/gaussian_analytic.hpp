#pragma once

namespace coimpact {

/// Exchangeable zero-mean Gaussian volumes of N co-executed metaorders.
struct GaussianPanelModel {
  int n = 2;
  double second_moment = 0.0;  // E[phi^2 | N]
  double c_phi = 0.0;          // pairwise volume correlation

  /// Requires n >= 2, second_moment > 0 and c_phi in (-1/(n-1), 1).
  void validate() const;
};

/// Couplings of the joint density exp(-A/2 sum phi_i^2 + B/N sum_{i<j} phi_i phi_j).
struct GaussianParams {
  double a_n = 0.0;
  double b_n = 0.0;
};

struct GaussianMoments {
  double second_moment = 0.0;  // E[phi_i^2]
  double cross_moment = 0.0;   // E[phi_i phi_j], i != j
  double c_phi = 0.0;
};

/// Eigenvalues of the coupling matrix: lambda1 along (1, ..., 1), lambda2 with
/// multiplicity N - 1, and lambda1_tilde of the (N-1)x(N-1) block left after
/// conditioning on one metaorder.
struct EigenTriple {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  double lambda1_tilde = 0.0;
};

/// 2^{3/4} Gamma(5/4) / sqrt(pi), approximately 0.8600.
double xi_constant();

/// Expected impact I_N(phi)/Y of one metaorder among N with i.i.d.
/// N(0, sigma_n^2) volumes:
///   Gamma(1/4)/(2 sqrt(pi)) * phi / (2 (N-1) sigma^2)^{1/4} * e^{-z} 1F1(5/4; 3/2; z),
/// z = phi^2 / (2 (N-1) sigma^2). Throws DomainError for n < 2.
double iid_gaussian_impact(double phi, int n, double sigma_n);

/// Slope of the linear regime, 2^{3/4} Gamma(5/4) / (pi^2 sigma^2 (N-1))^{1/4}.
double small_phi_slope(int n, double sigma_n);

/// Closed-form crossover estimate xi^{-1} sigma sqrt(N-1).
double crossover_phi_star(int n, double sigma_n);

/// Abscissa where the linear asymptote meets sqrt(phi), found by bisection.
double asymptote_intersection(int n, double sigma_n);

/// Universal curve y(phi~) = I_N(phi) / ((N-1) sigma^2)^{1/4},
/// phi~ = phi / (sqrt(N-1) sigma).
double rescaled_impact(double phi_tilde);

GaussianParams gaussian_params_from_moments(const GaussianPanelModel& model);
GaussianMoments moments_from_params(double a_n, double b_n, int n);
EigenTriple eigen_triple(const GaussianPanelModel& model);

/// I_N(phi)/Y for exchangeable correlated Gaussian volumes: the i.i.d. curve
/// evaluated at phi (1 + (N-1) C) with variance 1 / lambda1_tilde.
double correlated_gaussian_impact(double phi, const GaussianPanelModel& model);

/// Large-N linear slope for volumes in the domain of attraction of a
/// symmetric stable law with characteristic function exp(-c |t|^alpha):
///   Gamma(1/(2 alpha)) / (sqrt(2 pi) alpha (c (N-1))^{1/(2 alpha)}).
/// Asymptotic guidance only. Throws DomainError unless 0 < alpha < 2.
double levy_linear_slope(int n, double c, double alpha);

/// (c (N-1))^{1/alpha}
double levy_crossover(int n, double c, double alpha);

}  // namespace coimpact

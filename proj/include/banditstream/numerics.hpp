#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "banditstream/errors.hpp"

namespace banditstream {

// Counter-based 64-bit generator (splitmix-style). Identical seed gives an
// identical stream; child(stream) derives an independent stream from the
// original seed so parallel runs never share state.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0);

  Rng child(std::uint64_t stream) const;
  static std::uint64_t mix(std::uint64_t a, std::uint64_t b);

  std::uint64_t next_u64();
  double uniform();                       // in (0, 1)
  double uniform(double lo, double hi);   // in [lo, hi)
  int uniform_int(int n);                 // in [0, n)
  double normal();
  double normal(double mean, double sd);

 private:
  std::uint64_t seed_;
  std::uint64_t state_;
};

// Dense symmetric positive-definite matrix. Construction symmetrizes the
// input and rejects matrices that are not symmetric within 1e-12 relative.
class SpdMatrix {
 public:
  explicit SpdMatrix(Eigen::MatrixXd m);
  int dim() const { return static_cast<int>(m_.rows()); }
  const Eigen::MatrixXd& matrix() const { return m_; }

 private:
  Eigen::MatrixXd m_;
};

// Lower-triangular Cholesky factor; NotPositiveDefinite when a pivot <= 0.
Eigen::MatrixXd chol(const Eigen::MatrixXd& m);
Eigen::MatrixXd chol(const SpdMatrix& m);

Eigen::VectorXd solve_spd(const Eigen::MatrixXd& m, const Eigen::VectorXd& v);
Eigen::VectorXd solve_spd(const SpdMatrix& m, const Eigen::VectorXd& v);

Eigen::VectorXd sample_mvn(Rng& rng, const Eigen::VectorXd& mean,
                           const Eigen::MatrixXd& cov);
Eigen::VectorXd sample_mvn(Rng& rng, const Eigen::VectorXd& mean,
                           const SpdMatrix& cov);

// Marsaglia-Tsang with the a<1 boost. Shape a, rate b.
double sample_gamma(Rng& rng, double a, double b);

double norm_cdf(double z);
double norm_pdf(double z);
// Acklam rational approximation refined with one Newton step; |Phi(z)-p| < 1e-9.
double norm_inv_cdf(double p);

// Regularized lower incomplete gamma P(a, x).
double gamma_p(double a, double x);
// Inverse CDF of the chi-square law with d degrees of freedom, by bisection
// on the incomplete gamma; accurate to 1e-8 in probability.
double chi2_inv_cdf(double p, int d);

// Componentwise Gaussian restricted to [mu_j - w_j, mu_j + w_j] with
// w_j = L/sqrt(d) - |mu_j|, so E[x] = mu and ||x|| <= L. Rejection within the
// window; uniform-in-window fallback when the acceptance rate drops below 1e-3.
Eigen::VectorXd sample_truncated_gaussian(Rng& rng, const Eigen::VectorXd& mu,
                                          double sigma, double L);

}  // namespace banditstream

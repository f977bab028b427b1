#include "banditstream/numerics.hpp"

#include <cmath>
#include <limits>

namespace banditstream {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

std::uint64_t splitmix_mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace

Rng::Rng(std::uint64_t seed) : seed_(seed), state_(splitmix_mix(seed + kGolden)) {}

std::uint64_t Rng::mix(std::uint64_t a, std::uint64_t b) {
  return splitmix_mix(splitmix_mix(a + kGolden) ^ (b * 0xD1342543DE82EF95ull + 1));
}

Rng Rng::child(std::uint64_t stream) const { return Rng(mix(seed_, stream)); }

std::uint64_t Rng::next_u64() {
  state_ += kGolden;
  return splitmix_mix(state_);
}

double Rng::uniform() {
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

int Rng::uniform_int(int n) {
  if (n <= 0) throw InvalidParameter("uniform_int: n must be positive");
  return static_cast<int>((static_cast<unsigned __int128>(next_u64()) *
                           static_cast<unsigned __int128>(n)) >> 64);
}

double Rng::normal() { return norm_inv_cdf(uniform()); }

double Rng::normal(double mean, double sd) { return mean + sd * normal(); }

SpdMatrix::SpdMatrix(Eigen::MatrixXd m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols() || m_.rows() == 0)
    throw DimensionMismatch("SpdMatrix: matrix must be square and non-empty");
  const double scale = std::max(1.0, m_.cwiseAbs().maxCoeff());
  const double asym = (m_ - m_.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * scale)
    throw InvalidParameter("SpdMatrix: matrix not symmetric within tolerance");
  m_ = ((m_ + m_.transpose()) / 2.0).eval();
}

Eigen::MatrixXd chol(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols() || m.rows() == 0)
    throw DimensionMismatch("chol: matrix must be square and non-empty");
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success)
    throw NotPositiveDefinite("chol: matrix is not positive definite");
  return llt.matrixL();
}

Eigen::MatrixXd chol(const SpdMatrix& m) { return chol(m.matrix()); }

Eigen::VectorXd solve_spd(const Eigen::MatrixXd& m, const Eigen::VectorXd& v) {
  if (m.rows() != m.cols())
    throw DimensionMismatch("solve_spd: matrix must be square");
  if (m.rows() != v.size())
    throw DimensionMismatch("solve_spd: dimension mismatch between matrix and vector");
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success)
    throw NotPositiveDefinite("solve_spd: matrix is not positive definite");
  return llt.solve(v);
}

Eigen::VectorXd solve_spd(const SpdMatrix& m, const Eigen::VectorXd& v) {
  return solve_spd(m.matrix(), v);
}

Eigen::VectorXd sample_mvn(Rng& rng, const Eigen::VectorXd& mean,
                           const Eigen::MatrixXd& cov) {
  if (cov.rows() != mean.size())
    throw DimensionMismatch("sample_mvn: mean/cov dimensions differ");
  Eigen::MatrixXd L = chol(cov);
  Eigen::VectorXd z(mean.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = rng.normal();
  return mean + L * z;
}

Eigen::VectorXd sample_mvn(Rng& rng, const Eigen::VectorXd& mean,
                           const SpdMatrix& cov) {
  return sample_mvn(rng, mean, cov.matrix());
}

double sample_gamma(Rng& rng, double a, double b) {
  if (!(a > 0.0) || !(b > 0.0))
    throw InvalidParameter("sample_gamma: shape and rate must be positive");
  if (a < 1.0) {
    const double u = rng.uniform();
    return sample_gamma(rng, a + 1.0, b) * std::pow(u, 1.0 / a);
  }
  const double d = a - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = rng.normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v / b;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v / b;
  }
}

double norm_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double norm_pdf(double z) {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI);
}

double norm_inv_cdf(double p) {
  if (!(p > 0.0) || !(p < 1.0))
    throw DomainError("norm_inv_cdf: p must lie in (0, 1)");

  // Acklam's rational approximation.
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double p_low = 0.02425;
  double x;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  // One Newton step against the exact CDF.
  const double pdf = norm_pdf(x);
  if (pdf > 1e-280) x -= (norm_cdf(x) - p) / pdf;
  return x;
}

double gamma_p(double a, double x) {
  if (!(a > 0.0)) throw DomainError("gamma_p: shape must be positive");
  if (x < 0.0) throw DomainError("gamma_p: x must be nonnegative");
  if (x == 0.0) return 0.0;
  const double lg = std::lgamma(a);
  if (x < a + 1.0) {
    // Series expansion.
    double sum = 1.0 / a;
    double term = sum;
    double ap = a;
    for (int n = 0; n < 500; ++n) {
      ap += 1.0;
      term *= x / ap;
      sum += term;
      if (std::abs(term) < std::abs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - lg);
  }
  // Continued fraction (modified Lentz).
  const double tiny = 1e-300;
  double b0 = x + 1.0 - a;
  double c0 = 1.0 / tiny;
  double d0 = 1.0 / b0;
  double h = d0;
  for (int i = 1; i < 500; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b0 += 2.0;
    d0 = an * d0 + b0;
    if (std::abs(d0) < tiny) d0 = tiny;
    c0 = b0 + an / c0;
    if (std::abs(c0) < tiny) c0 = tiny;
    d0 = 1.0 / d0;
    const double delta = d0 * c0;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  const double q = std::exp(-x + a * std::log(x) - lg) * h;
  return 1.0 - q;
}

double chi2_inv_cdf(double p, int d) {
  if (!(p > 0.0) || !(p < 1.0))
    throw DomainError("chi2_inv_cdf: p must lie in (0, 1)");
  if (d < 1) throw DomainError("chi2_inv_cdf: dof must be >= 1");
  const double a = 0.5 * d;
  double hi = d + 10.0 * std::sqrt(2.0 * d) + 10.0;
  while (gamma_p(a, 0.5 * hi) < p) hi *= 2.0;
  double lo = 0.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (gamma_p(a, 0.5 * mid) < p)
      lo = mid;
    else
      hi = mid;
    if (hi - lo < 1e-13 * (1.0 + hi)) break;
  }
  return 0.5 * (lo + hi);
}

Eigen::VectorXd sample_truncated_gaussian(Rng& rng, const Eigen::VectorXd& mu,
                                          double sigma, double L) {
  if (!(sigma > 0.0) || !(L > 0.0))
    throw InvalidParameter("sample_truncated_gaussian: sigma and L must be positive");
  const double bound = L / std::sqrt(static_cast<double>(mu.size()));
  Eigen::VectorXd x(mu.size());
  for (Eigen::Index j = 0; j < mu.size(); ++j) {
    const double w = bound - std::abs(mu[j]);
    if (w < -1e-12)
      throw InvalidParameter("sample_truncated_gaussian: |mu_j| exceeds L/sqrt(d)");
    if (w <= 0.0) {
      x[j] = mu[j];
      continue;
    }
    const double accept = 2.0 * norm_cdf(w / sigma) - 1.0;
    if (accept < 1e-3) {
      x[j] = rng.uniform(mu[j] - w, mu[j] + w);
      continue;
    }
    for (;;) {
      const double draw = rng.normal(mu[j], sigma);
      if (std::abs(draw - mu[j]) <= w) {
        x[j] = draw;
        break;
      }
    }
  }
  return x;
}

}  // namespace banditstream

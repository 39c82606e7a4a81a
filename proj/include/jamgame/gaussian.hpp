#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace jamgame {

/// Scalar Gaussian observation law N(mean, variance).
struct ScalarGaussian {
  double mean = 0.0;
  double variance = 1.0;

  ScalarGaussian() = default;
  ScalarGaussian(double mean, double variance);

  double stddev() const;
  double pdf(double x) const;
};

/// Independent coordinates with per-coordinate variances.
struct DiagonalGaussian {
  std::vector<double> mean;
  std::vector<double> variances;

  DiagonalGaussian() = default;
  DiagonalGaussian(std::vector<double> mean, std::vector<double> variances);

  /// Zero-mean isotropic model of dimension m.
  static DiagonalGaussian isotropic(std::size_t m, double variance);

  std::size_t dim() const { return mean.size(); }
  double trace() const;
  bool is_isotropic() const;
};

/// Gaussian with a full SPD covariance, factorized once as
/// covariance = W^T diag(eigenvalues) W with W having orthonormal rows.
class GeneralGaussian {
 public:
  GeneralGaussian(Eigen::VectorXd mean, Eigen::MatrixXd covariance);

  std::size_t dim() const { return static_cast<std::size_t>(mean_.size()); }
  const Eigen::VectorXd& mean() const { return mean_; }
  const Eigen::MatrixXd& covariance() const { return covariance_; }
  const Eigen::MatrixXd& rotation() const { return rotation_; }
  const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }

 private:
  Eigen::VectorXd mean_;
  Eigen::MatrixXd covariance_;
  Eigen::MatrixXd rotation_;
  Eigen::VectorXd eigenvalues_;
};

using SourceModel = std::variant<ScalarGaussian, DiagonalGaussian, GeneralGaussian>;

std::size_t dimension(const SourceModel& model);

// Standard normal helpers. Q is the upper tail 1 - Phi.
double std_normal_pdf(double z);
double std_normal_tail(double z);
double std_normal_tail_inverse(double p);

/// P(X > t).
double tail_prob(const ScalarGaussian& g, double t);

/// E[(X - mean)^2 1(X - mean > t)] for t >= 0, i.e. the one-sided tail
/// second moment of the centered variable. Throws DomainError on t < 0.
double tail_second_moment(const ScalarGaussian& g, double t);

/// Raw moments of X restricted to the open interval (lo, hi); either end
/// may be infinite.
struct IntervalMoments {
  double mass = 0.0;    // P(lo < X < hi)
  double first = 0.0;   // E[X 1(.)]
  double second = 0.0;  // E[X^2 1(.)]

  /// E[(X - y)^2 1(.)]
  double centered_second(double y) const { return second - 2.0 * y * first + y * y * mass; }
  /// E[(X - y) 1(.)]
  double centered_first(double y) const { return first - y * mass; }

  IntervalMoments& operator+=(const IntervalMoments& o) {
    mass += o.mass;
    first += o.first;
    second += o.second;
    return *this;
  }
};

IntervalMoments interval_moments(const ScalarGaussian& g, double lo, double hi);

/// Upper clamp applied to jamming probabilities before forming thresholds
/// c / (1 - phi).
inline constexpr double kMaxJamProbability = 1.0 - 1e-9;

/// Clamps phi in [0, 1) to [0, kMaxJamProbability]. Throws on phi < 0 or
/// phi >= 1.
double clamp_jam_probability(double phi);

enum class PhiBoundary {
  kReject,      // phi >= 1 is a DomainError
  kDegenerate,  // phi >= 1 means never transmit: the clipped loss is 0
};

/// E[min{(1 - phi)(X - x_hat0)^2, c}].
double clipped_sq_loss(const ScalarGaussian& g, double x_hat0, double c, double phi,
                       PhiBoundary boundary = PhiBoundary::kReject);

/// Row-major block of observations, one row per draw.
struct SampleMatrix {
  std::size_t rows = 0;
  std::size_t dim = 0;
  std::vector<double> data;

  std::span<const double> row(std::size_t i) const { return {data.data() + i * dim, dim}; }
  std::span<double> row(std::size_t i) { return {data.data() + i * dim, dim}; }
};

/// Draw `count` observations. Row i uses stream (seed, trial=i, lane=0), so the
/// output does not depend on the number of worker threads.
SampleMatrix sample(const SourceModel& model, std::uint64_t seed, std::size_t count);

struct Whitened {
  DiagonalGaussian model;    // mean W mu, variances = eigenvalues
  Eigen::MatrixXd rotation;  // W
};

Whitened whiten(const GeneralGaussian& g);

/// Monte Carlo estimate with its standard error (0 for closed forms).
struct Estimate {
  double value = 0.0;
  double std_err = 0.0;
};

/// E[||X||^2 1(||X||^2 > r)] for a zero-mean isotropic Gaussian, via the
/// chi-square identity E[Q 1(Q > s)] = k P(chi2_{k+2} > s).
double norm_sq_tail_moment_isotropic(std::size_t m, double variance, double r);

/// Sampled E[||X - mean||^2 1(||X - mean||^2 > r)].
Estimate norm_sq_tail_moment_mc(const DiagonalGaussian& g, double r, std::size_t samples,
                                std::uint64_t seed);

/// Closed form when the variances are equal, Monte Carlo otherwise.
Estimate norm_sq_tail_moment(const DiagonalGaussian& g, double r, std::size_t samples,
                             std::uint64_t seed);

/// A fixed set of squared deviations ||X - mean||^2, sorted, with prefix sums.
/// Tail and clipped functionals evaluated on it are exact step functions of
/// their threshold, so bisection over them is deterministic and monotone.
class NormSqSamples {
 public:
  NormSqSamples(const DiagonalGaussian& g, std::size_t samples, std::uint64_t seed);

  std::size_t size() const { return sorted_.size(); }

  /// Sample mean of ||X||^2 1(||X||^2 > r) with standard error.
  Estimate tail_moment(double r) const;

  /// Sample mean of min{(1 - phi)||X||^2, c}.
  double clipped_loss(double c, double phi) const;

 private:
  std::size_t first_above(double r) const;

  std::vector<double> sorted_;
  std::vector<double> prefix_;     // prefix_[i] = sum of sorted_[0..i)
  std::vector<double> suffix_;     // suffix_[i] = sum of sorted_[i..n)
  std::vector<double> suffix_sq_;  // same, of squares
};

}  // namespace jamgame

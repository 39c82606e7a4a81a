#include "jamgame/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "jamgame/errors.hpp"
#include "jamgame/rng.hpp"

namespace jamgame {

using detail::require;

ScalarGaussian::ScalarGaussian(double mean_, double variance_) : mean(mean_), variance(variance_) {
  require(std::isfinite(mean) && std::isfinite(variance) && variance > 0.0,
          "ScalarGaussian: variance must be finite and > 0");
}

double ScalarGaussian::stddev() const { return std::sqrt(variance); }

double ScalarGaussian::pdf(double x) const {
  const double s = stddev();
  return std_normal_pdf((x - mean) / s) / s;
}

DiagonalGaussian::DiagonalGaussian(std::vector<double> mean_, std::vector<double> variances_)
    : mean(std::move(mean_)), variances(std::move(variances_)) {
  require(!mean.empty() && mean.size() == variances.size(),
          "DiagonalGaussian: mean and variances must have equal length >= 1");
  for (double v : variances) require(std::isfinite(v) && v > 0.0, "DiagonalGaussian: variances must be > 0");
}

DiagonalGaussian DiagonalGaussian::isotropic(std::size_t m, double variance) {
  return DiagonalGaussian(std::vector<double>(m, 0.0), std::vector<double>(m, variance));
}

double DiagonalGaussian::trace() const {
  double t = 0.0;
  for (double v : variances) t += v;
  return t;
}

bool DiagonalGaussian::is_isotropic() const {
  return std::all_of(variances.begin(), variances.end(),
                     [&](double v) { return v == variances.front(); });
}

GeneralGaussian::GeneralGaussian(Eigen::VectorXd mean, Eigen::MatrixXd covariance)
    : mean_(std::move(mean)), covariance_(std::move(covariance)) {
  const auto m = mean_.size();
  require(m >= 1 && covariance_.rows() == m && covariance_.cols() == m,
          "GeneralGaussian: covariance must be m x m with m = mean length");
  const double scale = covariance_.cwiseAbs().maxCoeff();
  require((covariance_ - covariance_.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * std::max(scale, 1.0),
          "GeneralGaussian: covariance must be symmetric");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(covariance_);
  if (eig.info() != Eigen::Success) throw NotSpdError("GeneralGaussian: eigendecomposition failed");
  const double floor = 1e-12 * covariance_.trace() / static_cast<double>(m);
  eigenvalues_ = eig.eigenvalues();
  for (Eigen::Index i = 0; i < m; ++i) {
    if (!(eigenvalues_(i) > floor)) {
      throw NotSpdError("GeneralGaussian: eigenvalue " + std::to_string(eigenvalues_(i)) +
                        " below floor " + std::to_string(floor));
    }
  }
  rotation_ = eig.eigenvectors().transpose();
}

std::size_t dimension(const SourceModel& model) {
  return std::visit(
      [](const auto& g) -> std::size_t {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, ScalarGaussian>) {
          return 1;
        } else {
          return g.dim();
        }
      },
      model);
}

double std_normal_pdf(double z) {
  if (std::isinf(z)) return 0.0;
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

double std_normal_tail(double z) { return 0.5 * std::erfc(z / std::numbers::sqrt2); }

double std_normal_tail_inverse(double p) {
  require(p > 0.0 && p < 1.0, "std_normal_tail_inverse: p must lie in (0, 1)");
  return std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
}

double tail_prob(const ScalarGaussian& g, double t) {
  return std_normal_tail((t - g.mean) / g.stddev());
}

double tail_second_moment(const ScalarGaussian& g, double t) {
  require(t >= 0.0, "tail_second_moment: t must be >= 0");
  if (std::isinf(t)) return 0.0;
  const double z = t / g.stddev();
  return g.variance * (std_normal_tail(z) + z * std_normal_pdf(z));
}

namespace {

// z * pdf(z) with the z = +-inf limit taken as 0.
double z_pdf(double z) { return std::isinf(z) ? 0.0 : z * std_normal_pdf(z); }

// P(za < Z < zb), evaluated on whichever side keeps both terms small.
double std_mass(double za, double zb) {
  if (za >= 0.0) return std_normal_tail(za) - std_normal_tail(zb);
  if (zb <= 0.0) return std_normal_tail(-zb) - std_normal_tail(-za);
  return 1.0 - std_normal_tail(zb) - std_normal_tail(-za);
}

}  // namespace

IntervalMoments interval_moments(const ScalarGaussian& g, double lo, double hi) {
  if (!(hi > lo)) return {};
  const double s = g.stddev();
  const double za = (lo - g.mean) / s;
  const double zb = (hi - g.mean) / s;
  const double m0 = std_mass(za, zb);
  const double m1z = std_normal_pdf(za) - std_normal_pdf(zb);
  const double m2z = m0 + z_pdf(za) - z_pdf(zb);
  IntervalMoments out;
  out.mass = m0;
  out.first = g.mean * m0 + s * m1z;
  out.second = g.mean * g.mean * m0 + 2.0 * g.mean * s * m1z + g.variance * m2z;
  return out;
}

double clamp_jam_probability(double phi) {
  require(phi >= 0.0 && phi < 1.0, "jamming probability must lie in [0, 1)");
  return std::min(phi, kMaxJamProbability);
}

double clipped_sq_loss(const ScalarGaussian& g, double x_hat0, double c, double phi,
                       PhiBoundary boundary) {
  require(c > 0.0, "clipped_sq_loss: c must be > 0");
  if (phi >= 1.0 && boundary == PhiBoundary::kDegenerate) {
    require(phi == 1.0, "clipped_sq_loss: phi must be <= 1");
    return 0.0;
  }
  phi = clamp_jam_probability(phi);
  const double keep = 1.0 - phi;
  // Deviation Y = X - x_hat0; the clip binds when |Y| > r.
  const ScalarGaussian dev{g.mean - x_hat0, g.variance};
  const double r = std::sqrt(c / keep);
  if (std::isinf(r)) return keep * (dev.variance + dev.mean * dev.mean);
  const double inner = interval_moments(dev, -r, r).second;
  const double outside = tail_prob(dev, r) + std_normal_tail((r + dev.mean) / dev.stddev());
  return keep * inner + c * outside;
}

namespace {

void fill_normals(const Stream& stream, std::span<double> out) {
  std::size_t k = 0;
  for (std::uint32_t draw = 0; k < out.size(); ++draw) {
    const auto [z0, z1] = stream.normal_pair(draw);
    out[k++] = z0;
    if (k < out.size()) out[k++] = z1;
  }
}

}  // namespace

SampleMatrix sample(const SourceModel& model, std::uint64_t seed, std::size_t count) {
  require(count >= 1, "sample: count must be >= 1");
  SampleMatrix out;
  out.rows = count;
  out.dim = dimension(model);
  out.data.resize(count * out.dim);
  const auto n = static_cast<std::int64_t>(count);

  std::visit(
      [&](const auto& g) {
        using T = std::decay_t<decltype(g)>;
#pragma omp parallel for schedule(static)
        for (std::int64_t i = 0; i < n; ++i) {
          const Stream stream(seed, {static_cast<std::uint64_t>(i), 0});
          auto row = out.row(static_cast<std::size_t>(i));
          fill_normals(stream, row);
          if constexpr (std::is_same_v<T, ScalarGaussian>) {
            row[0] = g.mean + g.stddev() * row[0];
          } else if constexpr (std::is_same_v<T, DiagonalGaussian>) {
            for (std::size_t j = 0; j < row.size(); ++j) row[j] = g.mean[j] + std::sqrt(g.variances[j]) * row[j];
          } else {
            Eigen::Map<Eigen::VectorXd> x(row.data(), static_cast<Eigen::Index>(row.size()));
            const Eigen::VectorXd scaled = g.eigenvalues().cwiseSqrt().cwiseProduct(x);
            x = g.mean() + g.rotation().transpose() * scaled;
          }
        }
      },
      model);
  return out;
}

Whitened whiten(const GeneralGaussian& g) {
  const Eigen::VectorXd rotated_mean = g.rotation() * g.mean();
  std::vector<double> mean(rotated_mean.data(), rotated_mean.data() + rotated_mean.size());
  std::vector<double> variances(g.eigenvalues().data(), g.eigenvalues().data() + g.eigenvalues().size());
  return {DiagonalGaussian(std::move(mean), std::move(variances)), g.rotation()};
}

double norm_sq_tail_moment_isotropic(std::size_t m, double variance, double r) {
  require(r >= 0.0, "norm_sq_tail_moment: r must be >= 0");
  require(m >= 1 && variance > 0.0, "norm_sq_tail_moment: need m >= 1, variance > 0");
  const double k = static_cast<double>(m);
  if (std::isinf(r)) return 0.0;
  return variance * k * boost::math::gamma_q(0.5 * (k + 2.0), 0.5 * r / variance);
}

Estimate norm_sq_tail_moment_mc(const DiagonalGaussian& g, double r, std::size_t samples,
                                std::uint64_t seed) {
  require(r >= 0.0, "norm_sq_tail_moment: r must be >= 0");
  return NormSqSamples(g, samples, seed).tail_moment(r);
}

Estimate norm_sq_tail_moment(const DiagonalGaussian& g, double r, std::size_t samples,
                             std::uint64_t seed) {
  if (g.is_isotropic()) return {norm_sq_tail_moment_isotropic(g.dim(), g.variances.front(), r), 0.0};
  return norm_sq_tail_moment_mc(g, r, samples, seed);
}

NormSqSamples::NormSqSamples(const DiagonalGaussian& g, std::size_t samples, std::uint64_t seed) {
  require(samples >= 2, "NormSqSamples: need at least 2 samples");
  const SampleMatrix draws = sample(g, seed, samples);
  sorted_.resize(samples);
  for (std::size_t i = 0; i < samples; ++i) {
    double q = 0.0;
    const auto x = draws.row(i);
    for (std::size_t j = 0; j < x.size(); ++j) {
      const double dev = x[j] - g.mean[j];
      q += dev * dev;
    }
    sorted_[i] = q;
  }
  std::sort(sorted_.begin(), sorted_.end());
  prefix_.assign(samples + 1, 0.0);
  suffix_.assign(samples + 1, 0.0);
  suffix_sq_.assign(samples + 1, 0.0);
  for (std::size_t i = 0; i < samples; ++i) prefix_[i + 1] = prefix_[i] + sorted_[i];
  for (std::size_t i = samples; i-- > 0;) {
    suffix_[i] = suffix_[i + 1] + sorted_[i];
    suffix_sq_[i] = suffix_sq_[i + 1] + sorted_[i] * sorted_[i];
  }
}

std::size_t NormSqSamples::first_above(double r) const {
  return static_cast<std::size_t>(std::upper_bound(sorted_.begin(), sorted_.end(), r) - sorted_.begin());
}

Estimate NormSqSamples::tail_moment(double r) const {
  const auto n = static_cast<double>(sorted_.size());
  const std::size_t idx = first_above(r);
  const double mean = suffix_[idx] / n;
  const double var = std::max(0.0, (suffix_sq_[idx] - n * mean * mean) / (n - 1.0));
  return {mean, std::sqrt(var / n)};
}

double NormSqSamples::clipped_loss(double c, double phi) const {
  const double keep = 1.0 - clamp_jam_probability(phi);
  const std::size_t idx = first_above(c / keep);
  const auto n = static_cast<double>(sorted_.size());
  return (keep * prefix_[idx] + c * static_cast<double>(sorted_.size() - idx)) / n;
}

}  // namespace jamgame

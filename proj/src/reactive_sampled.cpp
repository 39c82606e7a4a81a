#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "jamgame/errors.hpp"
#include "jamgame/reactive.hpp"

namespace jamgame::reactive {

namespace {

constexpr std::size_t kBlock = 1024;

// Per-sample contribution layout: objective, grad_x0 (m), grad_x1 (m),
// grad_alpha, grad_beta, dc_g0 (m), dc_g1 (m).
struct Layout {
  std::size_t m;
  std::size_t width() const { return 4 * m + 3; }
  std::size_t gx0() const { return 1; }
  std::size_t gx1() const { return 1 + m; }
  std::size_t galpha() const { return 1 + 2 * m; }
  std::size_t gbeta() const { return 2 + 2 * m; }
  std::size_t dc0() const { return 3 + 2 * m; }
  std::size_t dc1() const { return 3 + 3 * m; }
};

struct Sums {
  std::vector<double> s;
  std::vector<double> s2;
  explicit Sums(std::size_t w) : s(w, 0.0), s2(w, 0.0) {}
  void merge(const Sums& o) {
    for (std::size_t k = 0; k < s.size(); ++k) {
      s[k] += o.s[k];
      s2[k] += o.s2[k];
    }
  }
};

struct Kernel {
  Layout lay;
  const ReprSymbols& sym;
  ReactivePolicy pol;
  GameCosts costs;

  // Adds sample x into sums, using buf (width()) as scratch.
  void add(std::span<const double> x, Sums& acc, std::vector<double>& buf) const {
    const std::size_t m = lay.m;
    double d0 = 0.0;
    double d1 = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      d0 += (x[j] - sym.x_hat0[j]) * (x[j] - sym.x_hat0[j]);
      d1 += (x[j] - sym.x_hat1[j]) * (x[j] - sym.x_hat1[j]);
    }
    const double al = pol.alpha;
    const double be = pol.beta;
    const double q = (al - be) * d1 + (1.0 - al) * d0 - costs.c - costs.d * (al - be);
    std::fill(buf.begin(), buf.end(), 0.0);
    if (q > 0.0) {
      buf[0] = be * d1 + costs.c - costs.d * be;
      buf[lay.gbeta()] = d1 - costs.d;
      for (std::size_t j = 0; j < m; ++j) {
        buf[lay.gx1() + j] = -2.0 * be * (x[j] - sym.x_hat1[j]);
        buf[lay.dc0() + j] = -2.0 * (1.0 - al) * (x[j] - sym.x_hat0[j]);
        buf[lay.dc1() + j] = -2.0 * al * (x[j] - sym.x_hat1[j]);
      }
    } else {
      buf[0] = al * d1 + (1.0 - al) * d0 - costs.d * al;
      buf[lay.galpha()] = d1 - d0 - costs.d;
      for (std::size_t j = 0; j < m; ++j) {
        buf[lay.gx0() + j] = -2.0 * (1.0 - al) * (x[j] - sym.x_hat0[j]);
        buf[lay.gx1() + j] = -2.0 * al * (x[j] - sym.x_hat1[j]);
        buf[lay.dc1() + j] = -2.0 * be * (x[j] - sym.x_hat1[j]);
      }
    }
    for (std::size_t k = 0; k < buf.size(); ++k) {
      acc.s[k] += buf[k];
      acc.s2[k] += buf[k] * buf[k];
    }
  }
};

Evaluation finish(const Layout& lay, const Sums& acc, std::size_t count) {
  const double n = static_cast<double>(count);
  std::vector<double> mean(lay.width());
  std::vector<double> se(lay.width());
  for (std::size_t k = 0; k < lay.width(); ++k) {
    mean[k] = acc.s[k] / n;
    const double var = std::max(0.0, (acc.s2[k] - n * mean[k] * mean[k]) / (n - 1.0));
    se[k] = std::sqrt(var / n);
  }
  auto slice = [&](const std::vector<double>& v, std::size_t at) {
    return std::vector<double>(v.begin() + static_cast<std::ptrdiff_t>(at),
                               v.begin() + static_cast<std::ptrdiff_t>(at + lay.m));
  };
  Evaluation e;
  e.objective = mean[0];
  e.objective_se = se[0];
  e.grad_x0 = slice(mean, lay.gx0());
  e.grad_x1 = slice(mean, lay.gx1());
  e.grad_alpha = mean[lay.galpha()];
  e.grad_beta = mean[lay.gbeta()];
  e.dc_g0 = slice(mean, lay.dc0());
  e.dc_g1 = slice(mean, lay.dc1());
  e.grad_x0_se = slice(se, lay.gx0());
  e.grad_x1_se = slice(se, lay.gx1());
  e.grad_alpha_se = se[lay.galpha()];
  e.grad_beta_se = se[lay.gbeta()];
  return e;
}

void check_inputs(const ReprSymbols& symbols, const ReactivePolicy& policy, std::size_t m) {
  detail::require(symbols.x_hat0.size() == m && symbols.x_hat1.size() == m,
                  "SampledModel: symbol dimension mismatch");
  detail::require(policy.alpha >= 0.0 && policy.alpha <= 1.0 && policy.beta >= 0.0 && policy.beta <= 1.0,
                  "reactive policy must lie in [0, 1]^2");
}

}  // namespace

SampledModel::SampledModel(const SourceModel& source, GameCosts costs, std::size_t samples,
                           std::uint64_t seed)
    : costs_(costs) {
  detail::require(samples >= 2, "SampledModel: need at least 2 samples");
  draws_ = sample(source, seed, samples);
  std::visit(
      [&](const auto& g) {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, ScalarGaussian>) {
          mean_ = {g.mean};
          stddevs_ = {g.stddev()};
        } else if constexpr (std::is_same_v<T, DiagonalGaussian>) {
          mean_ = g.mean;
          for (double v : g.variances) stddevs_.push_back(std::sqrt(v));
        } else {
          mean_.assign(g.mean().data(), g.mean().data() + g.mean().size());
          for (Eigen::Index j = 0; j < g.covariance().rows(); ++j) {
            stddevs_.push_back(std::sqrt(g.covariance()(j, j)));
          }
        }
      },
      source);
  sample_mean_.assign(draws_.dim, 0.0);
  for (std::size_t i = 0; i < draws_.rows; ++i) {
    const auto x = draws_.row(i);
    for (std::size_t j = 0; j < draws_.dim; ++j) sample_mean_[j] += x[j];
  }
  for (double& v : sample_mean_) v /= static_cast<double>(draws_.rows);
}

Evaluation SampledModel::evaluate_serial(const ReprSymbols& symbols, const ReactivePolicy& policy) const {
  check_inputs(symbols, policy, dim());
  const Kernel k{{dim()}, symbols, policy, costs_};
  Sums acc(k.lay.width());
  std::vector<double> buf(k.lay.width());
  for (std::size_t i = 0; i < draws_.rows; ++i) k.add(draws_.row(i), acc, buf);
  return finish(k.lay, acc, draws_.rows);
}

Evaluation SampledModel::evaluate(const ReprSymbols& symbols, const ReactivePolicy& policy) const {
  check_inputs(symbols, policy, dim());
  const Kernel k{{dim()}, symbols, policy, costs_};
  const std::size_t blocks = (draws_.rows + kBlock - 1) / kBlock;
  std::vector<Sums> partial(blocks, Sums(k.lay.width()));
  const auto nb = static_cast<std::int64_t>(blocks);
#pragma omp parallel
  {
    std::vector<double> buf(k.lay.width());
#pragma omp for schedule(static)
    for (std::int64_t b = 0; b < nb; ++b) {
      const std::size_t lo = static_cast<std::size_t>(b) * kBlock;
      const std::size_t hi = std::min(draws_.rows, lo + kBlock);
      for (std::size_t i = lo; i < hi; ++i) k.add(draws_.row(i), partial[static_cast<std::size_t>(b)], buf);
    }
  }
  Sums acc(k.lay.width());
  for (const auto& p : partial) acc.merge(p);
  return finish(k.lay, acc, draws_.rows);
}

}  // namespace jamgame::reactive

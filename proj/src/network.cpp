#include "clocknet/network.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>

namespace clocknet {

namespace {

constexpr double kGoldenRatio = 0.6180339887498949;

/// Golden-section maximization on [lo, hi].
double golden_max(const std::function<double(double)>& f, double lo, double hi,
                  int iters = 100) {
  double a = lo, b = hi;
  double x1 = b - kGoldenRatio * (b - a);
  double x2 = a + kGoldenRatio * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int i = 0; i < iters && (b - a) > 1e-14 * (1.0 + std::abs(a) + std::abs(b)); ++i) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kGoldenRatio * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kGoldenRatio * (b - a);
      f1 = f(x1);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

void ChainConfig::validate() const {
  if (clocks.empty()) {
    throw std::invalid_argument("ChainConfig: at least one clock required");
  }
  if (segments.size() != clocks.size()) {
    throw std::invalid_argument("ChainConfig: one channel segment per clock required");
  }
  for (const auto& c : clocks) {
    if (c.n_atoms < 1 || c.d <= 0.0 || c.finesse <= 0.0 || c.eta < 0.0) {
      throw std::invalid_argument("ChainConfig: clock parameters must be positive");
    }
  }
  for (const auto& seg : segments) {
    if (seg.r < 0.0) {
      throw std::invalid_argument("ChainConfig: segment attenuation must be >= 0");
    }
  }
}

std::vector<double> ChainConfig::accumulated_attenuation() const {
  std::vector<double> acc(clocks.size(), 0.0);
  double running = 0.0;
  for (std::size_t i = clocks.size(); i-- > 0;) {
    running += segments[i].r;
    acc[i] = running;
  }
  return acc;
}

double chain_snr_term(const ChainClock& clock, double r_accumulated) {
  return std::sqrt(4.0 * clock.d * static_cast<double>(clock.n_atoms) * clock.finesse *
                   clock.eta * std::exp(-2.0 * clock.eta) * std::exp(-r_accumulated) /
                   M_PI);
}

double chain_snr(const ChainConfig& cfg) {
  cfg.validate();
  const auto acc = cfg.accumulated_attenuation();
  double snr = 0.0;
  for (std::size_t i = 0; i < cfg.clocks.size(); ++i) {
    snr += chain_snr_term(cfg.clocks[i], acc[i]);
  }
  return snr;
}

std::vector<double> allocate_finesse(double f_last, const ChainConfig& cfg) {
  cfg.validate();
  if (f_last <= 0.0) {
    throw std::invalid_argument("allocate_finesse: f_last must be positive");
  }
  // The closed-form profile assumes a uniform per-hop attenuation.
  const std::size_t m = cfg.clocks.size();
  for (std::size_t i = 0; i + 1 < m; ++i) {
    if (std::abs(cfg.segments[i].r - cfg.segments[0].r) > 1e-12) {
      throw std::invalid_argument("allocate_finesse: per-hop attenuation must be uniform");
    }
  }
  const auto acc = cfg.accumulated_attenuation();
  std::vector<double> f(m);
  for (std::size_t i = 0; i < m; ++i) {
    f[i] = f_last * std::exp(-(acc[i] - acc[m - 1]));
  }
  return f;
}

double chain_improvement(int m, double total_transmission, TransmissionConvention conv) {
  if (m < 1) {
    throw std::invalid_argument("chain_improvement: m must be >= 1");
  }
  if (total_transmission <= 0.0 || total_transmission > 1.0) {
    throw std::invalid_argument("chain_improvement: transmission must be in (0, 1]");
  }
  const double lnt = std::abs(std::log(total_transmission));
  double r = 0.0;
  switch (conv) {
    case TransmissionConvention::per_hop_exponent:
      r = lnt;
      break;
    case TransmissionConvention::total_over_m:
      r = lnt / static_cast<double>(m);
      break;
    case TransmissionConvention::total_over_m_minus_1:
      r = (m > 1) ? lnt / static_cast<double>(m - 1) : 0.0;
      break;
  }
  double sum = 0.0;
  for (int k = 0; k < m; ++k) {
    sum += std::exp(-static_cast<double>(k) * r);
  }
  return sum;
}

ChainPrecisionResult chain_precision(int m, double r, double d, long long n_atoms,
                                     double f_last) {
  if (m < 1 || r < 0.0 || d <= 0.0 || n_atoms < 1 || f_last <= 0.0) {
    throw std::invalid_argument("chain_precision: invalid parameters");
  }
  const double unit = std::sqrt(4.0 * d * static_cast<double>(n_atoms) * f_last /
                                (M_PI * M_E));
  double sum = 0.0;
  for (int k = 0; k < m; ++k) {
    sum += std::exp(-static_cast<double>(k) * r);
  }
  ChainPrecisionResult res;
  res.exact = 1.0 / (unit * sum);
  // Dense-chain limit: sum -> 1/r, so (S/N)^{-1} -> unit^{-1} r = unit^{-1} M^{-1} |ln t|.
  res.asymptotic = (r > 0.0) ? r / unit : res.exact;
  res.diverged = std::abs(res.asymptotic - res.exact) > 0.10 * res.exact;
  return res;
}

OptimizeResult optimize_chain(const ChainConfig& cfg, const OptimizeOptions& opts) {
  cfg.validate();
  OptimizeResult res;
  res.config = cfg;
  const auto acc = cfg.accumulated_attenuation();

  if (opts.free_finesse && opts.coupling <= 0.0) {
    throw std::invalid_argument("optimize_chain: photon-budget coupling must be positive");
  }
  if (!opts.free_finesse && !opts.free_eta) {
    throw std::invalid_argument("optimize_chain: at least one free parameter required");
  }

  double best = chain_snr(res.config);
  for (res.sweeps = 1; res.sweeps <= opts.max_sweeps; ++res.sweeps) {
    for (std::size_t i = 0; i < res.config.clocks.size(); ++i) {
      ChainClock& clock = res.config.clocks[i];
      const double r_i = acc[i];
      if (opts.free_finesse) {
        // Photon budget: realized eta_i = coupling e^{r_i} F_i, capped by the
        // clock's decoherence budget.
        const double scale = opts.coupling * std::exp(r_i);
        const double f_cap = std::min(opts.finesse_hi, clock.eta / scale);
        const double f_opt = golden_max(
            [&](double f) {
              ChainClock trial = clock;
              trial.finesse = f;
              trial.eta = scale * f;
              return chain_snr_term(trial, r_i);
            },
            1e-12, f_cap);
        clock.finesse = f_opt;
        clock.eta = scale * f_opt;
      } else {
        clock.eta = golden_max(
            [&](double eta) {
              ChainClock trial = clock;
              trial.eta = eta;
              return chain_snr_term(trial, r_i);
            },
            opts.eta_lo, opts.eta_hi);
      }
    }
    const double snr = chain_snr(res.config);
    if (snr - best <= opts.rel_tol * std::abs(best)) {
      best = std::max(best, snr);
      res.converged = true;
      break;
    }
    best = snr;
  }
  res.snr = best;
  return res;
}

ChainConfig make_uniform_chain(int m, long long n_atoms, double d, double f_last,
                               double r, double eta) {
  if (m < 1) {
    throw std::invalid_argument("make_uniform_chain: m must be >= 1");
  }
  ChainConfig cfg;
  cfg.clocks.resize(m);
  cfg.segments.resize(m);
  for (int i = 0; i < m; ++i) {
    cfg.clocks[i] = {n_atoms, d, f_last, eta};
    cfg.segments[i].r = (i + 1 < m) ? r : 0.0;
  }
  const auto f = allocate_finesse(f_last, cfg);
  for (int i = 0; i < m; ++i) {
    cfg.clocks[i].finesse = f[i];
  }
  return cfg;
}

}  // namespace clocknet

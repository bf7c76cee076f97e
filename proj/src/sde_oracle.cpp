// SPDX-License-Identifier: MIT
#include "degenkernel/sde_oracle.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "degenkernel/error.hpp"

namespace degenkernel {

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> c, std::array<std::uint32_t, 2> k) {
  constexpr std::uint32_t kM0 = 0xD2511F53u;
  constexpr std::uint32_t kM1 = 0xCD9E8D57u;
  constexpr std::uint32_t kW0 = 0x9E3779B9u;
  constexpr std::uint32_t kW1 = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * c[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * c[2];
    c = {static_cast<std::uint32_t>(p1 >> 32) ^ c[1] ^ k[0], static_cast<std::uint32_t>(p1),
         static_cast<std::uint32_t>(p0 >> 32) ^ c[3] ^ k[1], static_cast<std::uint32_t>(p0)};
    k[0] += kW0;
    k[1] += kW1;
  }
  return c;
}

namespace {

// uniform on (0,1) from two 32-bit words, never 0 or 1
double to_unit(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t bits = ((static_cast<std::uint64_t>(hi) << 32) | lo) >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

// (-1,1) from one 32-bit word
double signed_unit(std::uint32_t w) { return (static_cast<double>(w) + 0.5) * 0x1.0p-31 - 1.0; }

// Per-path stream. Normals and bridge uniforms use disjoint counter spaces.
class PathStream {
 public:
  PathStream(std::uint64_t seed, std::uint64_t path)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        path_lo_(static_cast<std::uint32_t>(path)),
        path_hi_(static_cast<std::uint32_t>(path >> 32) & 0x7FFFFFFFu) {}

  // Marsaglia polar method on 32-bit uniforms; two attempts per Philox block
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    for (;;) {
      if (pos_ == 4) {
        block_ = philox4x32(
            {static_cast<std::uint32_t>(n_), static_cast<std::uint32_t>(n_ >> 32), path_lo_, path_hi_}, key_);
        ++n_;
        pos_ = 0;
      }
      const double u = signed_unit(block_[pos_]);
      const double v = signed_unit(block_[pos_ + 1]);
      pos_ += 2;
      const double s = u * u + v * v;
      if (s >= 1.0 || s == 0.0) continue;
      const double f = std::sqrt(-2.0 * std::log(s) / s);
      spare_ = v * f;
      have_spare_ = true;
      return u * f;
    }
  }

  double uniform() {
    const auto w = philox4x32(
        {static_cast<std::uint32_t>(u_), static_cast<std::uint32_t>(u_ >> 32), path_lo_, path_hi_ | 0x80000000u}, key_);
    ++u_;
    return to_unit(w[0], w[1]);
  }

 private:
  std::array<std::uint32_t, 2> key_;
  std::uint32_t path_lo_;
  std::uint32_t path_hi_;
  std::uint64_t n_ = 0;
  std::uint64_t u_ = 0;
  std::array<std::uint32_t, 4> block_{};
  int pos_ = 4;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

// Crossing probabilities below e^{-40} are treated as zero without a draw.
constexpr double kBridgeCutoff = 40.0;

struct PathOutcome {
  double z = 0.0;           // final state, NaN when absorbed
  double hit = 0.0;         // absorption time, NaN when alive
};

PathOutcome run_path(double nu, const RealFn& dtil, double z0, int steps, double dt, const SimConfig& cfg,
                     std::uint64_t path) {
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  PathOutcome out{nan, nan};
  const double level = cfg.absorb_below;
  if (!(z0 > level)) {
    out.hit = 0.0;
    return out;
  }
  PathStream rng(cfg.seed, path);
  if (cfg.scheme == Scheme::radial) {
    const double r_abs = std::sqrt(std::max(level, 0.0));
    const double sd = std::sqrt(0.5 * dt);
    double R = std::sqrt(z0);
    for (int n = 0; n < steps; ++n) {
      const double drift = (nu - 0.5) + (dtil ? dtil(R * R) : 0.0);
      const double Rn = R + sd * rng.normal() + drift / (2.0 * R) * dt;
      bool dead = !(Rn > r_abs);
      if (!dead && cfg.bridge_correction) {
        const double e = 4.0 * (R - r_abs) * (Rn - r_abs) / dt;
        if (e < kBridgeCutoff && rng.uniform() < std::exp(-e)) dead = true;
      }
      if (dead) {
        out.hit = (n + 1) * dt;
        return out;
      }
      R = Rn;
    }
    out.z = R * R;
    return out;
  }
  double Y = z0;
  for (int n = 0; n < steps; ++n) {
    const double drift = nu + (dtil ? dtil(Y) : 0.0);
    const double Yn = Y + std::sqrt(2.0 * Y * dt) * rng.normal() + drift * dt;
    bool dead = !(Yn > level);
    if (!dead && cfg.bridge_correction) {
      // frozen local variance 2Y per unit time
      const double e = (Y - level) * (Yn - level) / (Y * dt);
      if (e < kBridgeCutoff && rng.uniform() < std::exp(-e)) dead = true;
    }
    if (dead) {
      out.hit = (n + 1) * dt;
      return out;
    }
    Y = Yn;
  }
  out.z = Y;
  return out;
}

void check_config(double t, const SimConfig& cfg) {
  if (!(t > 0.0)) throw DomainError("simulation horizon t must be positive");
  if (!(cfg.dt > 0.0)) throw DomainError("time step must be positive");
  if (cfg.n_paths < 1) throw DomainError("path count must be positive");
  if (cfg.bins < 1) throw DomainError("histogram needs at least one bin");
  if (!(cfg.absorb_below >= 0.0)) throw DomainError("absorption level must be non-negative");
}

// map: final z -> histogram coordinate
SimResult simulate(double nu, const RealFn& dtil, double z0, double t, const SimConfig& cfg, const RealFn& map,
                   double auto_hi) {
  check_config(t, cfg);
  const int steps = std::max(1, static_cast<int>(std::ceil(t / cfg.dt - 1e-9)));
  const double dt = t / steps;
  const long n = cfg.n_paths;
  std::vector<PathOutcome> outcomes(static_cast<std::size_t>(n));

#pragma omp parallel for schedule(dynamic, 64) if (cfg.parallel)
  for (long i = 0; i < n; ++i) {
    auto o = run_path(nu, dtil, z0, steps, dt, cfg, static_cast<std::uint64_t>(i));
    if (std::isfinite(o.z) && map) o.z = map(o.z);
    outcomes[static_cast<std::size_t>(i)] = o;
  }

  SimResult res;
  res.n_paths = n;
  const double hi = cfg.hist_hi > 0.0 ? cfg.hist_hi : auto_hi;
  auto& h = res.histogram;
  h.edges.resize(cfg.bins + 1);
  for (int b = 0; b <= cfg.bins; ++b) h.edges[b] = hi * b / cfg.bins;
  std::vector<long> counts(cfg.bins, 0);
  for (const auto& o : outcomes) {
    if (std::isfinite(o.z)) {
      ++res.n_survived;
      const long b = static_cast<long>(std::floor(o.z / hi * cfg.bins));
      if (b >= 0 && b < cfg.bins) {
        ++counts[b];
      } else {
        ++res.beyond_histogram;
      }
    } else {
      ++res.n_absorbed;
      res.hitting_times.push_back(o.hit);
    }
  }
  const double dn = static_cast<double>(n);
  res.survival = res.n_survived / dn;
  res.survival_se = std::sqrt(res.survival * (1.0 - res.survival) / dn);
  h.mass.resize(cfg.bins);
  h.se.resize(cfg.bins);
  for (int b = 0; b < cfg.bins; ++b) {
    h.mass[b] = counts[b] / dn;
    h.se[b] = std::sqrt(h.mass[b] * (1.0 - h.mass[b]) / dn);
  }
  return res;
}

double auto_hi_z(double z0, double t) {
  const double r = std::sqrt(std::max(z0, 0.0)) + 6.0 * std::sqrt(t);
  return r * r;
}

}  // namespace

SimResult simulate_model(ModelIndex nu, const RealFn& d_tilde, double z0, double t, const SimConfig& cfg) {
  if (!(z0 >= 0.0)) throw DomainError("start point must be non-negative");
  return simulate(nu, d_tilde, z0, t, cfg, {}, auto_hi_z(z0, t));
}

SimResult simulate_general(const TransformBundle& bundle, double x0, double t, const SimConfig& cfg) {
  if (!(x0 > 0.0)) throw DomainError("start point must be positive");
  const double z0 = bundle.phi(x0);
  RealFn dtil;
  if (!bundle.drift_free()) dtil = [&bundle](double z) { return bundle.d_tilde(z); };
  auto map = [&bundle](double z) { return bundle.psi(z); };
  return simulate(bundle.nu(), dtil, z0, t, cfg, map, bundle.psi(auto_hi_z(z0, t)));
}

SimResult simulate_general(const GeneralKernel& gk, double x0, double t, const SimConfig& cfg) {
  return simulate_general(gk.bundle(), x0, t, cfg);
}

}  // namespace degenkernel

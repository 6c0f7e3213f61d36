#include "obsv/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "obsv/kernels.hpp"
#include "obsv/rng.hpp"

namespace obsv {

EvolutionFamily::EvolutionFamily(EllipticSymbol symbol, GridSpace space)
    : symbol_(std::move(symbol)), space_(space) {
  space_.validate();
  symbol_.validate();
  if (symbol_.dim != space_.dim) {
    throw std::invalid_argument("evolution: symbol and grid dimension differ");
  }
  const auto cert = check_ellipticity(symbol_, space_);
  if (!cert.pass) {
    throw std::invalid_argument("evolution: symbol is not uniformly elliptic: " +
                                cert.reason);
  }
  const std::size_t size = space_.size();
  const int pieces = symbol_.pieces();
  piece_symbol_.resize(static_cast<std::size_t>(pieces) * size);
  for (int k = 0; k < pieces; ++k) {
    for (std::size_t flat = 0; flat < size; ++flat) {
      piece_symbol_[k * size + flat] = symbol_.value(k, space_.freq_vec(flat));
    }
  }
  cum_.assign(static_cast<std::size_t>(pieces + 1) * size, cplx{0.0, 0.0});
  for (int k = 0; k < pieces; ++k) {
    const double len = symbol_.mesh[k + 1] - symbol_.mesh[k];
    for (std::size_t flat = 0; flat < size; ++flat) {
      cum_[(k + 1) * size + flat] =
          cum_[k * size + flat] + len * piece_symbol_[k * size + flat];
    }
  }
}

cplx EvolutionFamily::phase(double t, double s, std::size_t flat) const {
  const std::size_t size = space_.size();
  const int kt = symbol_.piece_of(t);
  const int ks = symbol_.piece_of(s);
  const cplx at = cum_[(kt) * size + flat] +
                  (t - symbol_.mesh[kt]) * piece_symbol_[kt * size + flat];
  const cplx as = cum_[(ks) * size + flat] +
                  (s - symbol_.mesh[ks]) * piece_symbol_[ks * size + flat];
  return at - as;
}

void EvolutionFamily::apply_spectral(double t, double s,
                                     std::span<cplx> coeffs) const {
  if (t < s) throw std::domain_error("evolution: need s <= t");
  if (s < 0.0 || t > horizon()) {
    throw std::domain_error("evolution: times outside [0,T]");
  }
  if (t == s) return;
  const std::size_t size = space_.size();
  if (coeffs.size() != size) throw std::invalid_argument("evolution: size mismatch");
  std::vector<cplx> mult(size);
  for (std::size_t flat = 0; flat < size; ++flat) {
    mult[flat] = std::exp(-phase(t, s, flat));
  }
  kernels::active().cmul(coeffs.data(), coeffs.data(), mult.data(), size);
}

Field EvolutionFamily::apply(double t, double s, const Field& x) const {
  if (!space_.compatible(x.space)) {
    throw std::invalid_argument("evolution: field lives on a different grid");
  }
  if (t < s) throw std::domain_error("evolution: need s <= t");
  if (s < 0.0 || t > horizon()) {
    throw std::domain_error("evolution: times outside [0,T]");
  }
  if (t == s) return x;  // identity, exactly
  auto coeffs = spectrum(x);
  apply_spectral(t, s, coeffs);
  return from_spectrum(x.space, std::move(coeffs));
}

double SpectralProjector::weight(double freq_abs) const {
  if (mode == Mode::sharp || width <= 0.0) {
    return freq_abs <= lambda ? 1.0 : 0.0;
  }
  const double u = (freq_abs - lambda) / (width * lambda);
  if (u <= 0.0) return 1.0;
  if (u >= 1.0) return 0.0;
  const auto bump = [](double v) { return std::exp(-1.0 / v); };
  return bump(1.0 - u) / (bump(u) + bump(1.0 - u));
}

Field apply_projector(const SpectralProjector& pr, const Field& x) {
  auto coeffs = spectrum(x);
  std::vector<double> weights(coeffs.size());
  for (std::size_t flat = 0; flat < coeffs.size(); ++flat) {
    weights[flat] = pr.weight(x.space.freq_abs(flat));
  }
  kernels::active().rmul(coeffs.data(), coeffs.data(), weights.data(),
                         coeffs.size());
  return from_spectrum(x.space, std::move(coeffs));
}

Field apply_complement(const SpectralProjector& pr, const Field& x) {
  Field projected = apply_projector(pr, x);
  Field out = zero_field(x.space);
  kernels::active().csub(out.data.data(), x.data.data(), projected.data.data(),
                         out.data.size());
  return out;
}

namespace {

std::vector<Field> probe_fields(const GridSpace& g, int trials, Rng& rng) {
  std::vector<Field> probes;
  std::vector<int> modes{0, 1, -1, g.n / 4, g.n / 2 - 1};
  std::sort(modes.begin(), modes.end());
  modes.erase(std::unique(modes.begin(), modes.end()), modes.end());
  for (int k : modes) probes.push_back(mode_field(g, {k, 0}));
  for (int i = 0; i < trials; ++i) probes.push_back(random_field(g, rng));
  return probes;
}

struct HullPoint {
  double x, y;
};

// Upper convex hull (increasing x), the only points that can attain
// max_i (y_i - w x_i) for any slope w.
std::vector<HullPoint> upper_hull(std::vector<HullPoint> pts) {
  std::sort(pts.begin(), pts.end(), [](const HullPoint& a, const HullPoint& b) {
    return a.x < b.x || (a.x == b.x && a.y > b.y);
  });
  std::vector<HullPoint> dedup;
  for (const auto& p : pts) {
    if (dedup.empty() || p.x != dedup.back().x) dedup.push_back(p);
  }
  std::vector<HullPoint> hull;
  for (const auto& p : dedup) {
    while (hull.size() >= 2) {
      const auto& a = hull[hull.size() - 2];
      const auto& b = hull[hull.size() - 1];
      const double cross = (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
      if (cross >= 0.0) {
        hull.pop_back();
      } else {
        break;
      }
    }
    hull.push_back(p);
  }
  return hull;
}

}  // namespace

ExpBound estimate_exp_bound(const EvolutionFamily& fam,
                            std::span<const double> times, int trials,
                            std::uint64_t seed) {
  if (times.size() < 2) {
    throw std::invalid_argument("estimate_exp_bound: need at least two times");
  }
  Rng rng = Rng(seed).fork(0x657870ULL);
  const auto probes = probe_fields(fam.space(), trials, rng);
  std::vector<HullPoint> pts;
  for (std::size_t i = 0; i < times.size(); ++i) {
    for (std::size_t j = i + 1; j < times.size(); ++j) {
      const double s = times[i];
      const double t = times[j];
      if (!(t > s)) continue;
      for (const auto& x : probes) {
        const double nx = x.norm();
        if (nx == 0.0) continue;
        const double ny = fam.apply(t, s, x).norm();
        if (ny <= 0.0) continue;
        pts.push_back({t - s, std::log(ny / nx)});
      }
    }
  }
  const auto hull = upper_hull(pts);
  const double horizon = fam.horizon();

  const auto log_m_for = [&hull](double omega) {
    double worst = 0.0;
    for (const auto& p : hull) worst = std::max(worst, p.y - omega * p.x);
    return worst;
  };

  std::vector<double> candidates{0.0};
  for (std::size_t i = 0; i + 1 < hull.size(); ++i) {
    candidates.push_back((hull[i + 1].y - hull[i].y) /
                         (hull[i + 1].x - hull[i].x));
  }
  for (const auto& p : hull) candidates.push_back(p.y / p.x);

  double best_omega = 0.0;
  double best_logm = log_m_for(0.0);
  double best_obj = best_logm;
  for (double omega : candidates) {
    if (!std::isfinite(omega)) continue;
    const double logm = log_m_for(omega);
    const double obj = logm + omega * horizon;
    const bool better =
        obj < best_obj - 1e-12 ||
        (obj < best_obj + 1e-12 &&
         (logm < best_logm - 1e-12 ||
          (logm < best_logm + 1e-12 && std::abs(omega) < std::abs(best_omega))));
    if (better) {
      best_obj = obj;
      best_omega = omega;
      best_logm = logm;
    }
  }

  ExpBound out;
  out.M = std::exp(best_logm);
  out.omega = best_omega;
  out.samples = static_cast<int>(pts.size());
  double slack = kInf;
  for (const auto& p : pts) {
    slack = std::min(slack, best_logm + best_omega * p.x - p.y);
  }
  out.worst_slack = slack;
  return out;
}

DeCertificate certify_de(const EvolutionFamily& fam,
                         const SpectralProjector& projector_template,
                         std::span<const double> lambda_grid,
                         std::span<const double> times, int trials,
                         std::uint64_t seed) {
  DeCertificate cert;
  cert.gamma2 = static_cast<double>(fam.symbol().degree);
  cert.gamma3 = 1.0;
  cert.gamma4 = 0.0;
  cert.grid_n = fam.space().n;
  if (lambda_grid.empty() || times.size() < 2) {
    cert.failure = "empty lambda or time grid";
    return cert;
  }

  Rng rng = Rng(seed).fork(0x6465ULL);
  const GridSpace& g = fam.space();

  struct Sample {
    double z;      // lambda^{gamma2} (t-s)
    double y;      // -log ratio, +inf when the tail vanished
    double ratio;
  };
  std::vector<Sample> samples;

  for (std::size_t i = 0; i < times.size(); ++i) {
    for (std::size_t j = i + 1; j < times.size(); ++j) {
      const double s = times[i];
      const double t = times[j];
      if (!(t > s)) continue;
      std::vector<Field> probes;
      for (int k = 0; k < trials; ++k) probes.push_back(random_field(g, rng));
      for (double lambda : lambda_grid) {
        const int above = static_cast<int>(std::floor(lambda)) + 1;
        if (above <= g.n / 2 - 1) probes.push_back(mode_field(g, {above, 0}));
        SpectralProjector pr = projector_template;
        pr.lambda = lambda;
        for (const auto& x : probes) {
          const double nx = x.norm();
          if (nx == 0.0) continue;
          const Field evolved = fam.apply(t, s, x);
          const double tail = apply_complement(pr, evolved).norm();
          const double z =
              std::pow(lambda, cert.gamma2) * (t - s);
          if (tail == 0.0) {
            samples.push_back({z, kInf, 0.0});
          } else {
            samples.push_back({z, -std::log(tail / nx), tail / nx});
          }
        }
        if (above <= g.n / 2 - 1) probes.pop_back();
      }
    }
  }
  cert.samples = static_cast<int>(samples.size());

  const auto verify = [&samples](double d2, double d3) {
    double worst = -kInf;
    for (const auto& smp : samples) {
      if (smp.ratio == 0.0) continue;
      const double rhs = d2 * std::exp(-d3 * smp.z);
      // measured tails at the fp noise floor are not counted as violations
      const double viol = (smp.ratio - 1e-14) / rhs - 1.0;
      worst = std::max(worst, viol);
    }
    return worst;
  };

  const double analytic = full_symbol_decay(fam.symbol(), g);
  if (analytic > 0.0) {
    const double worst = verify(1.0, analytic);
    if (worst <= 1e-10) {
      cert.d2 = 1.0;
      cert.d3 = analytic;
      cert.pass = true;
      cert.provenance = "analytic";
      cert.worst_violation = worst;
      return cert;
    }
  }

  // least-squares slope of y against z over informative samples
  double sz = 0.0, sy = 0.0, szz = 0.0, szy = 0.0;
  std::size_t count = 0;
  for (const auto& smp : samples) {
    if (!std::isfinite(smp.y)) continue;
    sz += smp.z;
    sy += smp.y;
    szz += smp.z * smp.z;
    szy += smp.z * smp.y;
    ++count;
  }
  if (count < 2) {
    cert.failure = "not enough informative samples";
    return cert;
  }
  const double denom = static_cast<double>(count) * szz - sz * sz;
  const double slope = denom != 0.0
                           ? (static_cast<double>(count) * szy - sz * sy) / denom
                           : 0.0;
  if (!(slope > 0.0)) {
    cert.failure = "measured ratios do not decay in lambda";
    return cert;
  }
  double excess = 0.0;
  for (const auto& smp : samples) {
    if (!std::isfinite(smp.y)) continue;
    excess = std::max(excess, slope * smp.z - smp.y);
  }
  cert.d3 = slope;
  cert.d2 = std::max(1.0, std::exp(excess));
  cert.worst_violation = verify(cert.d2, cert.d3);
  cert.pass = cert.worst_violation <= 1e-10;
  cert.provenance = "fitted";
  if (!cert.pass) cert.failure = "fitted envelope does not certify the samples";
  return cert;
}

}  // namespace obsv

#include "obsv/observation.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "obsv/fft.hpp"
#include "obsv/kernels.hpp"
#include "obsv/rng.hpp"

namespace obsv {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kVolSlack = 1e-12;

// exact length of [lo,hi) cap union of disjoint 1-D segments
double clip_length(const std::vector<std::array<double, 2>>& segs, double lo,
                   double hi) {
  double total = 0.0;
  for (const auto& s : segs) {
    const double a = std::max(s[0], lo);
    const double b = std::min(s[1], hi);
    if (b > a) total += b - a;
  }
  return total;
}

// union area of boxes clipped to [wx0,wx1) x [wy0,wy1), via an x-sweep with
// y-interval union per slab
double union_area(const std::vector<Box>& boxes, double wx0, double wx1,
                  double wy0, double wy1) {
  std::vector<double> xs;
  for (const auto& b : boxes) {
    const double x0 = std::max(b.lo[0], wx0);
    const double x1 = std::min(b.hi[0], wx1);
    if (x1 > x0) {
      xs.push_back(x0);
      xs.push_back(x1);
    }
  }
  if (xs.empty()) return 0.0;
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  double area = 0.0;
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    const double xm = 0.5 * (xs[i] + xs[i + 1]);
    std::vector<std::array<double, 2>> ys;
    for (const auto& b : boxes) {
      if (b.lo[0] <= xm && xm < b.hi[0]) {
        const double y0 = std::max(b.lo[1], wy0);
        const double y1 = std::min(b.hi[1], wy1);
        if (y1 > y0) ys.push_back({y0, y1});
      }
    }
    std::sort(ys.begin(), ys.end());
    double len = 0.0, cur_hi = -1.0;
    for (const auto& y : ys) {
      if (y[0] > cur_hi) {
        len += y[1] - y[0];
        cur_hi = y[1];
      } else if (y[1] > cur_hi) {
        len += y[1] - cur_hi;
        cur_hi = y[1];
      }
    }
    area += len * (xs[i + 1] - xs[i]);
  }
  return area;
}

// split [start, start+len) on the circle of circumference 2pi into plain
// segments
std::vector<std::array<double, 2>> wrap_segments(double start, double len) {
  start = std::fmod(start, kTwoPi);
  if (start < 0.0) start += kTwoPi;
  if (start + len <= kTwoPi) return {{start, start + len}};
  return {{start, kTwoPi}, {0.0, start + len - kTwoPi}};
}

}  // namespace

SensorFamily::SensorFamily(double horizon, std::vector<double> mesh,
                           std::vector<std::vector<Box>> pieces, int dim)
    : horizon_(horizon), dim_(dim), mesh_(std::move(mesh)),
      pieces_(std::move(pieces)) {
  if (dim_ != 1 && dim_ != 2) throw std::invalid_argument("sensors: dim must be 1 or 2");
  if (mesh_.size() < 2 || mesh_.front() != 0.0 || mesh_.back() != horizon_) {
    throw std::invalid_argument("sensors: mesh must span [0,T]");
  }
  for (std::size_t i = 1; i < mesh_.size(); ++i) {
    if (!(mesh_[i] > mesh_[i - 1])) {
      throw std::invalid_argument("sensors: mesh must be strictly increasing");
    }
  }
  if (pieces_.size() + 1 != mesh_.size()) {
    throw std::invalid_argument("sensors: one box list per mesh piece");
  }
  for (auto& piece : pieces_) {
    for (auto& box : piece) {
      if (dim_ == 1) {
        box.lo[1] = 0.0;
        box.hi[1] = kTwoPi;
      }
      for (int axis = 0; axis < 2; ++axis) {
        if (box.lo[axis] < 0.0 || box.hi[axis] > kTwoPi ||
            !(box.lo[axis] < box.hi[axis])) {
          throw std::invalid_argument("sensors: boxes must lie in [0,2pi)^d");
        }
      }
    }
  }
}

SensorFamily SensorFamily::full(double horizon, int dim) {
  Box all{{0.0, 0.0}, {kTwoPi, kTwoPi}};
  return SensorFamily(horizon, {0.0, horizon}, {{all}}, dim);
}

SensorFamily SensorFamily::empty(double horizon, int dim) {
  return SensorFamily(horizon, {0.0, horizon}, {{}}, dim);
}

SensorFamily SensorFamily::stripes(double horizon, int dim, double period,
                                   double fill) {
  const double count_real = kTwoPi / period;
  const int count = static_cast<int>(std::lround(count_real));
  if (count < 1 || std::abs(count_real - count) > 1e-9) {
    throw std::invalid_argument("stripes: period must divide the torus side");
  }
  if (!(fill > 0.0 && fill <= 1.0)) {
    throw std::invalid_argument("stripes: fill must lie in (0,1]");
  }
  std::vector<Box> boxes;
  for (int j = 0; j < count; ++j) {
    Box b{{j * period, 0.0}, {j * period + fill * period, kTwoPi}};
    b.hi[0] = std::min(b.hi[0], kTwoPi);
    boxes.push_back(b);
  }
  return SensorFamily(horizon, {0.0, horizon}, {std::move(boxes)}, dim);
}

SensorFamily SensorFamily::switching_halves(double horizon, int dim) {
  const double pi = 0.5 * kTwoPi;
  Box left{{0.0, 0.0}, {pi, kTwoPi}};
  Box right{{pi, 0.0}, {kTwoPi, kTwoPi}};
  return SensorFamily(horizon, {0.0, 0.5 * horizon, horizon},
                      {{left}, {right}}, dim);
}

SensorFamily SensorFamily::stripes_on(const TimeSet& E, int dim, double period,
                                      double fill) {
  const SensorFamily pattern = stripes(E.horizon(), dim, period, fill);
  std::vector<double> mesh{0.0};
  std::vector<std::vector<Box>> pieces;
  for (const auto& iv : E.intervals()) {
    if (iv.a > mesh.back()) {
      mesh.push_back(iv.a);
      pieces.push_back({});  // off E: empty sensors
    }
    mesh.push_back(iv.b);
    pieces.push_back(pattern.boxes(0));
  }
  if (mesh.back() < E.horizon()) {
    mesh.push_back(E.horizon());
    pieces.push_back({});
  }
  return SensorFamily(E.horizon(), std::move(mesh), std::move(pieces), dim);
}

int SensorFamily::piece_of(double t) const {
  if (t < 0.0 || t > horizon_) throw std::domain_error("sensors: time outside [0,T]");
  for (int k = 0; k + 2 < static_cast<int>(mesh_.size()); ++k) {
    if (t < mesh_[k + 1]) return k;
  }
  return pieces() - 1;
}

std::optional<double> SensorFamily::representative(int piece,
                                                   const TimeSet& E) const {
  const double lo = mesh_[piece];
  const double hi = mesh_[piece + 1];
  for (const auto& iv : E.intervals()) {
    const double a = std::max(iv.a, lo);
    const double b = std::min(iv.b, hi);
    if (b > a) return 0.5 * (a + b);
  }
  return std::nullopt;
}

std::vector<int> SensorFamily::pieces_meeting(const TimeSet& E) const {
  std::vector<int> out;
  for (int k = 0; k < pieces(); ++k) {
    if (E.measure({mesh_[k], mesh_[k + 1]}) > 0.0) out.push_back(k);
  }
  return out;
}

double SensorFamily::window_intersection(int piece,
                                         std::array<double, 2> corner,
                                         double window_side) const {
  const auto& boxes = pieces_[piece];
  if (boxes.empty()) return 0.0;
  const auto segs_x = wrap_segments(corner[0], window_side);
  if (dim_ == 1) {
    std::vector<std::array<double, 2>> box_segs;
    for (const auto& b : boxes) box_segs.push_back({b.lo[0], b.hi[0]});
    // merge overlaps so the clip sum stays exact
    std::sort(box_segs.begin(), box_segs.end());
    std::vector<std::array<double, 2>> merged;
    for (const auto& s : box_segs) {
      if (!merged.empty() && s[0] <= merged.back()[1]) {
        merged.back()[1] = std::max(merged.back()[1], s[1]);
      } else {
        merged.push_back(s);
      }
    }
    double vol = 0.0;
    for (const auto& w : segs_x) vol += clip_length(merged, w[0], w[1]);
    return vol;
  }
  const auto segs_y = wrap_segments(corner[1], window_side);
  double vol = 0.0;
  for (const auto& wx : segs_x) {
    for (const auto& wy : segs_y) {
      vol += union_area(boxes, wx[0], wx[1], wy[0], wy[1]);
    }
  }
  return vol;
}

double SensorFamily::volume(int piece) const {
  if (dim_ == 1) return window_intersection(piece, {0.0, 0.0}, kTwoPi);
  return union_area(pieces_[piece], 0.0, kTwoPi, 0.0, kTwoPi);
}

std::vector<double> SensorFamily::mask(const GridSpace& g, int piece) const {
  if (g.dim != dim_) throw std::invalid_argument("sensors: grid dimension mismatch");
  std::vector<double> out(g.size(), 0.0);
  for (std::size_t flat = 0; flat < out.size(); ++flat) {
    const auto pt = g.point(flat);
    for (const auto& b : pieces_[piece]) {
      const bool inside_x = pt[0] >= b.lo[0] && pt[0] < b.hi[0];
      const bool inside_y =
          dim_ == 1 || (pt[1] >= b.lo[1] && pt[1] < b.hi[1]);
      if (inside_x && inside_y) {
        out[flat] = 1.0;
        break;
      }
    }
  }
  return out;
}

double SensorFamily::csup(const GridSpace& g, const TimeSet& E) const {
  for (int piece : pieces_meeting(E)) {
    const auto m = mask(g, piece);
    for (double v : m) {
      if (v != 0.0) return 1.0;
    }
  }
  return 0.0;
}

Field apply_C(const SensorFamily& fam, const GridSpace& g, double t,
              const Field& x) {
  const auto m = fam.mask(g, fam.piece_of(t));
  Field out = zero_field(g);
  kernels::active().rmul(out.data.data(), x.data.data(), m.data(),
                         out.data.size());
  return out;
}

namespace {

ThicknessReport scan_windows(
    const SensorFamily& fam, const std::vector<int>& time_pieces,
    const std::vector<double>& weights, double total_weight, double L,
    double rho, int scan_n, const std::vector<double>& witness_times) {
  ThicknessReport rep;
  rep.worst_ratio = kInf;
  rep.pass = true;
  const double target = rho * (fam.dim() == 1 ? L : L * L);
  const double h = kTwoPi / scan_n;
  const int ny = fam.dim() == 2 ? scan_n : 1;
  for (int ix = 0; ix < scan_n; ++ix) {
    for (int iy = 0; iy < ny; ++iy) {
      const std::array<double, 2> corner{ix * h, iy * h};
      double acc = 0.0;
      double min_piece = kInf;
      int min_idx = 0;
      for (std::size_t k = 0; k < time_pieces.size(); ++k) {
        const double vol = fam.window_intersection(time_pieces[k], corner, L);
        acc += weights[k] * vol;
        if (vol < min_piece) {
          min_piece = vol;
          min_idx = static_cast<int>(k);
        }
      }
      const bool averaged = total_weight > 0.0;
      const double value = averaged ? acc / total_weight : min_piece;
      const double denom = fam.dim() == 1 ? L : L * L;
      rep.worst_ratio = std::min(rep.worst_ratio, value / denom);
      if (value + kVolSlack * denom < target) {
        rep.pass = false;
        rep.witness_x = corner;
        rep.witness_t = witness_times[averaged ? 0 : min_idx];
        return rep;
      }
    }
  }
  return rep;
}

}  // namespace

ThicknessReport uniform_thickness_check(const SensorFamily& fam,
                                        const TimeSet& E, double L, double rho,
                                        int scan_n) {
  if (!(L > 0.0 && L <= kTwoPi)) {
    throw std::invalid_argument("thickness: window side must lie in (0, 2pi]");
  }
  const auto pieces = fam.pieces_meeting(E);
  std::vector<double> witness_times;
  for (int k : pieces) {
    witness_times.push_back(fam.representative(k, E).value_or(fam.mesh()[k]));
  }
  // per-piece check: weights unused (total_weight = 0 selects the min form)
  std::vector<double> weights(pieces.size(), 0.0);
  return scan_windows(fam, pieces, weights, 0.0, L, rho, scan_n, witness_times);
}

ThicknessReport mean_thickness_check(const SensorFamily& fam, double L,
                                     double rho, int scan_n) {
  if (!(L > 0.0 && L <= kTwoPi)) {
    throw std::invalid_argument("thickness: window side must lie in (0, 2pi]");
  }
  std::vector<int> pieces;
  std::vector<double> weights;
  for (int k = 0; k < fam.pieces(); ++k) {
    pieces.push_back(k);
    weights.push_back(fam.mesh()[k + 1] - fam.mesh()[k]);
  }
  std::vector<double> witness_times{0.0};
  return scan_windows(fam, pieces, weights, fam.horizon(), L, rho, scan_n,
                      witness_times);
}

namespace {

struct EnvelopeFit {
  double d0 = 1.0;
  double d1 = 0.0;
  double worst_residual = 0.0;
};

EnvelopeFit fit_envelope(const std::vector<double>& lambdas,
                         const std::vector<double>& log_ratios, double gamma1,
                         double d1_min) {
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const auto n = static_cast<double>(lambdas.size());
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    const double x = std::pow(lambdas[i], gamma1);
    sx += x;
    sy += log_ratios[i];
    sxx += x * x;
    sxy += x * log_ratios[i];
  }
  const double denom = n * sxx - sx * sx;
  const double slope = denom > 0.0 ? (n * sxy - sx * sy) / denom : 0.0;
  EnvelopeFit fit;
  fit.d1 = std::max(slope, d1_min);
  double excess = -kInf;
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    excess = std::max(excess,
                      log_ratios[i] - fit.d1 * std::pow(lambdas[i], gamma1));
  }
  fit.d0 = std::max(1.0, std::exp(excess));
  fit.worst_residual = -kInf;
  const double log_d0 = std::log(fit.d0);
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    fit.worst_residual =
        std::max(fit.worst_residual,
                 log_ratios[i] - log_d0 - fit.d1 * std::pow(lambdas[i], gamma1));
  }
  return fit;
}

// grid frequencies with |xi| <= lambda
std::vector<std::size_t> band_modes(const GridSpace& g, double lambda) {
  std::vector<std::size_t> modes;
  for (std::size_t flat = 0; flat < g.size(); ++flat) {
    if (g.freq_abs(flat) <= lambda) modes.push_back(flat);
  }
  return modes;
}

}  // namespace

UcpCertificate certify_ucp(const SensorFamily& fam, const TimeSet& E,
                           const GridSpace& g,
                           std::span<const double> lambda_grid, int trials,
                           double gamma1, double d1_min, std::uint64_t seed,
                           UcpMethod method) {
  UcpCertificate cert;
  cert.gamma1 = gamma1;
  cert.seed = seed;
  cert.grid_n = g.n;
  cert.lambda_grid.assign(lambda_grid.begin(), lambda_grid.end());
  if (lambda_grid.empty()) {
    cert.failure = "empty lambda grid";
    return cert;
  }
  if (!(E.measure() > 0.0)) {
    cert.failure = "time set has zero measure";
    return cert;
  }
  const auto pieces = fam.pieces_meeting(E);
  if (pieces.empty()) {
    cert.failure = "no sensor pieces meet the time set";
    return cert;
  }
  if (method == UcpMethod::automatic) {
    method = g.p == 2.0 ? UcpMethod::exact_p2 : UcpMethod::sample;
  }

  std::vector<double> lambdas;
  std::vector<double> log_ratios;

  if (method == UcpMethod::exact_p2) {
    if (g.p != 2.0) {
      cert.failure = "exact certification requires p = 2";
      return cert;
    }
    cert.method = "exact_p2";
    // Fourier coefficients of each piece mask, for the Gram matrices
    for (double lambda : lambda_grid) {
      const auto modes = band_modes(g, lambda);
      const int K = static_cast<int>(modes.size());
      double worst = 1.0;
      for (int piece : pieces) {
        const auto m = fam.mask(g, piece);
        std::vector<cplx> mhat(m.size());
        for (std::size_t i = 0; i < m.size(); ++i) mhat[i] = m[i];
        if (g.dim == 1) {
          fft(mhat.data(), mhat.size(), false);
        } else {
          fft2d(mhat.data(), g.n, g.n, false);
        }
        const double scale = 1.0 / static_cast<double>(g.size());
        for (auto& v : mhat) v *= scale;
        Eigen::MatrixXcd gram(K, K);
        for (int u = 0; u < K; ++u) {
          const auto fu = g.freq_vec(modes[u]);
          for (int v = 0; v < K; ++v) {
            const auto fv = g.freq_vec(modes[v]);
            // e^{i(xi_u - xi_v)x} on the grid aliases mod N per axis
            auto wrap = [&g](int k) {
              int r = k % g.n;
              if (r < 0) r += g.n;
              return static_cast<std::size_t>(r);
            };
            const std::size_t bin =
                g.dim == 1 ? wrap(fu[0] - fv[0])
                           : wrap(fu[0] - fv[0]) * static_cast<std::size_t>(g.n) +
                                 wrap(fu[1] - fv[1]);
            gram(u, v) = mhat[bin];
          }
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(gram);
        const double lo = solver.eigenvalues().minCoeff();
        if (!(lo > 1e-12)) {
          cert.failure = "sensor cannot see the band: piece " +
                         std::to_string(piece) + " at lambda " +
                         std::to_string(lambda);
          return cert;
        }
        worst = std::max(worst, (1.0 + 1e-10) / std::sqrt(lo));
      }
      lambdas.push_back(lambda);
      log_ratios.push_back(std::log(worst));
      cert.samples += static_cast<int>(pieces.size());
    }
  } else {
    cert.method = "sample";
    Rng rng = Rng(seed).fork(0x756370ULL);
    for (double lambda : lambda_grid) {
      const auto modes = band_modes(g, lambda);
      std::vector<Field> probes;
      const std::size_t stride = modes.size() > 64 ? modes.size() / 64 + 1 : 1;
      for (std::size_t i = 0; i < modes.size(); i += stride) {
        probes.push_back(mode_field(g, g.freq_vec(modes[i])));
      }
      for (int k = 0; k < trials; ++k) {
        probes.push_back(random_bandlimited(g, lambda, rng));
      }
      for (const auto& x : probes) {
        const double num = x.norm();
        if (num == 0.0) continue;
        double den = kInf;
        for (int piece : pieces) {
          const auto m = fam.mask(g, piece);
          Field masked = zero_field(g);
          kernels::active().rmul(masked.data.data(), x.data.data(), m.data(),
                                 masked.data.size());
          den = std::min(den, masked.norm());
        }
        if (!(den > 0.0)) {
          cert.failure = "sensor never sees the field at lambda " +
                         std::to_string(lambda);
          return cert;
        }
        lambdas.push_back(lambda);
        log_ratios.push_back(std::log(num / den));
        ++cert.samples;
      }
    }
  }

  const auto fit = fit_envelope(lambdas, log_ratios, gamma1, d1_min);
  cert.d0 = fit.d0;
  cert.d1 = fit.d1;
  cert.worst_residual = fit.worst_residual;
  cert.lambda_max = *std::max_element(cert.lambda_grid.begin(),
                                      cert.lambda_grid.end());
  cert.pass = cert.worst_residual <= 1e-10;
  return cert;
}

}  // namespace obsv

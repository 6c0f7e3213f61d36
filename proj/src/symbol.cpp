#include "obsv/symbol.hpp"

#include <cmath>
#include <stdexcept>

namespace obsv {

namespace {

// (i xi1)^a1 (i xi2)^a2 for integer frequencies
cplx i_pow_term(std::array<int, 2> alpha, std::array<int, 2> xi) {
  double mag = 1.0;
  for (int axis = 0; axis < 2; ++axis) {
    for (int k = 0; k < alpha[axis]; ++k) mag *= static_cast<double>(xi[axis]);
  }
  switch ((alpha[0] + alpha[1]) & 3) {
    case 0: return {mag, 0.0};
    case 1: return {0.0, mag};
    case 2: return {-mag, 0.0};
    default: return {0.0, -mag};
  }
}

}  // namespace

void EllipticSymbol::validate() const {
  if (dim != 1 && dim != 2) throw std::invalid_argument("symbol: dim must be 1 or 2");
  if (degree < 2) throw std::invalid_argument("symbol: degree must be >= 2");
  if (mesh.size() < 2 || mesh.front() != 0.0) {
    throw std::invalid_argument("symbol: mesh must start at 0");
  }
  for (std::size_t i = 1; i < mesh.size(); ++i) {
    if (!(mesh[i] > mesh[i - 1])) {
      throw std::invalid_argument("symbol: mesh must be strictly increasing");
    }
  }
  const auto piece_count = mesh.size() - 1;
  for (const auto& term : terms) {
    if (term.alpha[0] < 0 || term.alpha[1] < 0 ||
        term.alpha[0] + term.alpha[1] > degree) {
      throw std::invalid_argument("symbol: term order exceeds the degree");
    }
    if (dim == 1 && term.alpha[1] != 0) {
      throw std::invalid_argument("symbol: 1-D symbols take single indices");
    }
    if (term.values.size() != piece_count) {
      throw std::invalid_argument("symbol: coefficient count must match mesh");
    }
  }
}

int EllipticSymbol::piece_of(double t) const {
  if (t < mesh.front() || t > mesh.back()) {
    throw std::domain_error("symbol: time outside [0,T]");
  }
  for (int k = 0; k + 2 < static_cast<int>(mesh.size()); ++k) {
    if (t < mesh[k + 1]) return k;
  }
  return pieces() - 1;
}

cplx EllipticSymbol::value(int piece, std::array<int, 2> xi) const {
  cplx acc = 0.0;
  for (const auto& term : terms) {
    acc += term.values[piece] * i_pow_term(term.alpha, xi);
  }
  return acc;
}

cplx EllipticSymbol::principal(int piece, std::array<int, 2> xi) const {
  cplx acc = 0.0;
  for (const auto& term : terms) {
    if (term.alpha[0] + term.alpha[1] == degree) {
      acc += term.values[piece] * i_pow_term(term.alpha, xi);
    }
  }
  return acc;
}

EllipticSymbol heat_symbol(double horizon, double diffusivity) {
  EllipticSymbol sym;
  sym.dim = 1;
  sym.degree = 2;
  sym.mesh = {0.0, horizon};
  sym.terms.push_back({{2, 0}, {cplx{-diffusivity, 0.0}}});
  sym.ellipticity = diffusivity;
  sym.validate();
  return sym;
}

EllipticSymbol modulated_symbol(double horizon, int degree,
                                std::vector<double> mesh,
                                std::vector<double> theta) {
  if (mesh.empty() || mesh.back() != horizon) {
    throw std::invalid_argument("modulated_symbol: mesh must end at horizon");
  }
  if (theta.size() + 1 != mesh.size()) {
    throw std::invalid_argument("modulated_symbol: one theta per piece");
  }
  EllipticSymbol sym;
  sym.dim = 1;
  sym.degree = degree;
  sym.mesh = std::move(mesh);
  // theta(t) xi^degree expressed through (i xi)^degree
  double sign = 1.0;
  switch (degree & 3) {
    case 0: sign = 1.0; break;
    case 2: sign = -1.0; break;
    default:
      throw std::invalid_argument(
          "modulated_symbol: odd degrees have no real xi^m representation");
  }
  EllipticSymbol::Term term;
  term.alpha = {degree, 0};
  term.values.reserve(theta.size());
  double cmin = theta.front();
  for (double v : theta) {
    term.values.push_back(cplx{sign * v, 0.0});
    cmin = std::min(cmin, v);
  }
  sym.terms.push_back(std::move(term));
  sym.ellipticity = cmin;
  sym.validate();
  return sym;
}

EllipticityCertificate check_ellipticity(const EllipticSymbol& sym,
                                         const GridSpace& g) {
  sym.validate();
  EllipticityCertificate cert;
  cert.degree = sym.degree;

  bool principal_present = false;
  for (const auto& term : sym.terms) {
    if (term.alpha[0] + term.alpha[1] != sym.degree) continue;
    for (const auto& v : term.values) {
      if (v != cplx{0.0, 0.0}) principal_present = true;
    }
  }
  if (!principal_present) {
    cert.reason = "principal part vanishes identically";
    return cert;
  }

  double worst = kInf;
  for (int piece = 0; piece < sym.pieces(); ++piece) {
    for (std::size_t flat = 0; flat < g.size(); ++flat) {
      const auto xi = g.freq_vec(flat);
      if (xi[0] == 0 && xi[1] == 0) continue;
      const double mag = g.freq_abs(flat);
      const double ratio = sym.principal(piece, xi).real() /
                           std::pow(mag, static_cast<double>(sym.degree));
      worst = std::min(worst, ratio);
    }
  }
  cert.c = worst;
  if (!(worst > 0.0)) {
    cert.reason = "principal part is not positive on the grid";
    return cert;
  }
  if (worst < sym.ellipticity * (1.0 - 1e-12)) {
    cert.reason = "declared ellipticity constant not attained on the grid";
    return cert;
  }
  cert.pass = true;
  return cert;
}

double full_symbol_decay(const EllipticSymbol& sym, const GridSpace& g) {
  double worst = kInf;
  for (int piece = 0; piece < sym.pieces(); ++piece) {
    for (std::size_t flat = 0; flat < g.size(); ++flat) {
      const auto xi = g.freq_vec(flat);
      if (xi[0] == 0 && xi[1] == 0) continue;
      const double mag = g.freq_abs(flat);
      worst = std::min(worst, sym.value(piece, xi).real() /
                                  std::pow(mag, static_cast<double>(sym.degree)));
    }
  }
  return worst;
}

}  // namespace obsv

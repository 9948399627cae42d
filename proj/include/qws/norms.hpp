#pragma once

// Anisotropic Agmon-Hormander style norms on window fields.
//
// The binning is chirality-adapted: Left/Right components are grouped by the
// dyadic size of |x1| (their propagation coordinate) and summed freely over
// x2; Down/Up components swap the roles.  With r_{-1} = 0, r_j = 2^j and
// annuli I_j = {y : r_{j-1} <= |y| < r_j} (so I_0 = {0}, I_1 = {+-1},
// I_2 = {+-2, +-3}, ...):
//
//   a_j(f)^2    = sum_{p in {L,R}} sum_{x1 in I_j} sum_{x2} |f_p(x)|^2
//               + sum_{p in {D,U}} sum_{x2 in I_j} sum_{x1} |f_p(x)|^2
//   ||f||_B     = sum_j r_j^{1/2} a_j(f)
//   M_{B*}(u)^2 = max_{rho in {1..L}} (1/rho) [ sum_{p in {L,R}} sum_{|x1|<rho}
//                 sum_{x2} |u_p|^2 + (D,U analog) ]
//   ||f||_{2,s}^2 = sum_{p in {L,R}} (1+x1^2)^s |f_p|^2 + (D,U analog with x2)
//
// The B* quantity is the truncated maximal seminorm: the supremum over the
// scale rho runs over the integers 1..L available on the window.
//
// The dual pairing (u, f) = sum_x <u(x), f(x)> conjugates the SECOND
// argument, and satisfies |(u, f)| <= M_{B*}(u) ||f||_B when both fields are
// fully resolved by the window.

#include <cmath>
#include <vector>

#include "qws/lattice.hpp"

namespace qws {

/// Dyadic shell index of an integer coordinate: the j with |y| in I_j.
inline int shell_index(int y) {
  int const a = iabs(y);
  int j = 0;
  // smallest j with a < 2^j
  while ((1 << j) <= a) ++j;
  return j;
}

/// Number of shells meeting [-L, L]: indices 0 .. shell_count-1.
inline int shell_count(int L) { return shell_index(L) + 1; }

struct NormReport {
  double l2 = 0.0;
  double bNorm = 0.0;
  double bStarNorm = 0.0;                 // truncated maximal seminorm M_{B*}
  std::vector<double> aShells;            // a_j, j = 0 .. dyadic depth of window
  std::vector<std::pair<double, double>> l2s;  // (s, weighted norm) per request
};

inline double l2_norm(const GridField& f) {
  double sum = 0.0;
  for (const cplx& v : f.raw()) sum += std::norm(v);
  return std::sqrt(sum);
}

/// Weighted norm with weight (1 + x1^2)^s on Left/Right components and
/// (1 + x2^2)^s on Down/Up components.
inline double l2s_norm(const GridField& f, double s) {
  double sum = 0.0;
  f.for_each_site([&](Site x) {
    double const w1 = std::pow(1.0 + static_cast<double>(x.x1) * x.x1, s);
    double const w2 = std::pow(1.0 + static_cast<double>(x.x2) * x.x2, s);
    sum += w1 * (std::norm(f.at(x, Chirality::Left)) + std::norm(f.at(x, Chirality::Right)));
    sum += w2 * (std::norm(f.at(x, Chirality::Down)) + std::norm(f.at(x, Chirality::Up)));
  });
  return std::sqrt(sum);
}

/// The squared shell masses a_j(f)^2 for all shells meeting the window.
inline std::vector<double> shell_masses_squared(const GridField& f) {
  std::vector<double> aj2(static_cast<std::size_t>(shell_count(f.window().L)), 0.0);
  f.for_each_site([&](Site x) {
    auto const j1 = static_cast<std::size_t>(shell_index(x.x1));
    auto const j2 = static_cast<std::size_t>(shell_index(x.x2));
    aj2[j1] += std::norm(f.at(x, Chirality::Left)) + std::norm(f.at(x, Chirality::Right));
    aj2[j2] += std::norm(f.at(x, Chirality::Down)) + std::norm(f.at(x, Chirality::Up));
  });
  return aj2;
}

inline double b_norm(const GridField& f) {
  double sum = 0.0;
  std::vector<double> const aj2 = shell_masses_squared(f);
  for (std::size_t j = 0; j < aj2.size(); ++j)
    sum += std::sqrt(std::ldexp(1.0, static_cast<int>(j))) * std::sqrt(aj2[j]);
  return sum;
}

inline double bstar_seminorm(const GridField& f) {
  int const L = f.window().L;
  // Partial masses by propagation-coordinate magnitude: mass1[a] collects
  // Left/Right amplitude at |x1| = a, mass2[a] Down/Up at |x2| = a.
  std::vector<double> mass1(static_cast<std::size_t>(L + 1), 0.0);
  std::vector<double> mass2(static_cast<std::size_t>(L + 1), 0.0);
  f.for_each_site([&](Site x) {
    mass1[static_cast<std::size_t>(iabs(x.x1))] +=
        std::norm(f.at(x, Chirality::Left)) + std::norm(f.at(x, Chirality::Right));
    mass2[static_cast<std::size_t>(iabs(x.x2))] +=
        std::norm(f.at(x, Chirality::Down)) + std::norm(f.at(x, Chirality::Up));
  });
  double best = 0.0;
  double below = 0.0;  // anisotropic mass at coordinates < rho
  for (int rho = 1; rho <= L; ++rho) {
    below += mass1[static_cast<std::size_t>(rho - 1)] + mass2[static_cast<std::size_t>(rho - 1)];
    best = std::max(best, below / rho);
  }
  return std::sqrt(best);
}

inline NormReport norms(const GridField& f, const std::vector<double>& sList = {}) {
  NormReport r;
  r.l2 = l2_norm(f);
  std::vector<double> const aj2 = shell_masses_squared(f);
  r.aShells.reserve(aj2.size());
  r.bNorm = 0.0;
  for (std::size_t j = 0; j < aj2.size(); ++j) {
    double const aj = std::sqrt(aj2[j]);
    r.aShells.push_back(aj);
    r.bNorm += std::sqrt(std::ldexp(1.0, static_cast<int>(j))) * aj;
  }
  r.bStarNorm = bstar_seminorm(f);
  for (double s : sList) r.l2s.emplace_back(s, l2s_norm(f, s));
  return r;
}

// ---------------------------------------------------------------------------
// Dual pairing
// ---------------------------------------------------------------------------

/// (u, f) = sum_x <u(x), f(x)>, conjugating the second argument.  Both fields
/// must live on the same window.
inline cplx pairing(const GridField& u, const GridField& f) {
  cplx sum(0.0, 0.0);
  f.for_each_site([&](Site x) {
    for (Chirality p : all_chiralities) sum += u.value_or_zero(x, p) * std::conj(f.at(x, p));
  });
  return sum;
}

/// Pairing of an exact evaluator against a window-supported field.  The sum
/// runs over the support window of f, which is all of it when f is a source.
inline cplx pairing(const FieldEvaluator& u, const GridField& f) {
  cplx sum(0.0, 0.0);
  f.for_each_site([&](Site x) {
    Vec4 const uv = u(x);
    for (Chirality p : all_chiralities)
      sum += uv(index_of(p)) * std::conj(f.at(x, p));
  });
  return sum;
}

/// Pairing with the evaluator in the conjugated slot; the sum still runs over
/// the window of the finitely supported first argument.
inline cplx pairing(const GridField& f, const FieldEvaluator& w) {
  cplx sum(0.0, 0.0);
  f.for_each_site([&](Site x) {
    Vec4 const wv = w(x);
    for (Chirality p : all_chiralities)
      sum += f.at(x, p) * std::conj(wv(index_of(p)));
  });
  return sum;
}

}  // namespace qws

#pragma once

// Shared helpers for the test suite: seeded random fields and max-difference
// comparators.  Every random quantity in the suite flows from an explicitly
// seeded generator so failures replay exactly.

#include <cstdlib>
#include <filesystem>
#include <random>
#include <string>

#include "qws/lattice.hpp"

namespace qws::testing {

/// Fresh scratch directory under the system temp root, removed on destruction.
struct ScratchDir {
  std::filesystem::path path;
  explicit ScratchDir(std::string const& tag) {
    path = std::filesystem::temp_directory_path() /
           ("qws_" + tag + "_" + std::to_string(std::rand()));
    std::filesystem::create_directories(path);
  }
  ~ScratchDir() { std::filesystem::remove_all(path); }
  ScratchDir(ScratchDir const&) = delete;
  ScratchDir& operator=(ScratchDir const&) = delete;
};

inline cplx random_unit_complex(std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  return {g(rng), g(rng)};
}

/// Dense random field on the window, restricted to |x_j| <= supportRadius
/// (the whole window if negative).
inline GridField random_field(Window w, std::mt19937_64& rng, int supportRadius = -1) {
  GridField f(w);
  int const r = supportRadius < 0 ? w.L : supportRadius;
  for (int x1 = -r; x1 <= r; ++x1)
    for (int x2 = -r; x2 <= r; ++x2)
      for (Chirality p : all_chiralities) f.at(Site{x1, x2}, p) = random_unit_complex(rng);
  return f;
}

/// sup_x |a(x) - b(x)| over the window of a (componentwise max modulus).
inline double max_difference(const GridField& a, const GridField& b) {
  double m = 0.0;
  a.for_each_site([&](Site x) {
    for (Chirality p : all_chiralities)
      m = std::max(m, std::abs(a.at(x, p) - b.value_or_zero(x, p)));
  });
  return m;
}

/// sup over the window of |a(x) - e(x)| with e an exact evaluator.
inline double max_difference(const GridField& a, const FieldEvaluator& e) {
  double m = 0.0;
  a.for_each_site([&](Site x) {
    Vec4 const v = e(x);
    for (Chirality p : all_chiralities)
      m = std::max(m, std::abs(a.at(x, p) - v(index_of(p))));
  });
  return m;
}

}  // namespace qws::testing

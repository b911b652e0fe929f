#pragma once

#include <random>

#include "toposnake/grid.hpp"

namespace toposnake::testing {

inline ScalarField random_field(GridDims dims, std::mt19937& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  ScalarField f(dims);
  for (auto& v : f.values()) v = u(rng);
  return f;
}

inline VectorField random_vector_field(GridDims dims, std::mt19937& rng, double lo = -1.0, double hi = 1.0) {
  VectorField f;
  f.c1 = random_field(dims, rng, lo, hi);
  f.c2 = random_field(dims, rng, lo, hi);
  return f;
}

}  // namespace toposnake::testing

// Deterministic direction sets on the unit sphere.
#pragma once

#include <vector>

#include "rmkac/matrix.hpp"

namespace rmkac {

class CollisionModel;

// d = 2: equally spaced angles; d = 3: Fibonacci lattice; d >= 4: Kronecker
// low-discrepancy points pushed through the Gaussian quantile and normalized.
std::vector<Vector> sphere_directions(int dim, int count);

// sphere_directions plus the model's declared critical directions.
std::vector<Vector> direction_set(const CollisionModel& model, int count);

}  // namespace rmkac

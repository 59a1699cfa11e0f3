#pragma once

#include "tmts/metrics.hpp"

// Slow reference computations written straight from the definitions.
namespace tmts::oracle {

// Distance from p to the triangle by search over barycentric coordinates: a
// dense grid, then pattern search around the best point.
double sampled_distance(const Vec3& p, const Triangle& t);

// Normal consistency with an all-pairs closest-face search per centroid.
NormalConsistency brute_force_nc(const MeshReal& src, const MeshReal& ref);

}  // namespace tmts::oracle

#pragma once

#include <random>

#include "dppgeo/kernel.hpp"

namespace dppgeo {

/// Random L-ensemble with strictly positive correlations: R is the
/// correlation matrix of W W^T + (m/4) I with W uniform on [0,1], and
/// log L_aa is uniform on [-u1_range, u1_range].
LKernel random_positive_kernel(int m, std::mt19937_64& rng, double u1_range = 1.5);

/// u coordinates of random_positive_kernel (all signs +1).
UPoint random_u(int m, std::mt19937_64& rng, double u1_range = 1.5);

/// Random positive definite kernel with arbitrary correlation signs.
LKernel random_signed_kernel(int m, std::mt19937_64& rng);

}  // namespace dppgeo

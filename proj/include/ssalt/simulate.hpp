#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "ssalt/model.hpp"
#include "ssalt/rng.hpp"

namespace ssalt {

// Inverse of the cause-specific CDF under the step profile: the t with
// G_{l,j}(t) = u. Throws DomainError unless 0 < u < 1.
double sample_cause_lifetime(const ModelParams& params, std::size_t risk,
                             const DesignSpec& design, double u);

// n units; each draws both latent cause lifetimes, keeps the smaller (ties go
// to cause 1) and is censored at tc if it survives past it.
Dataset simulate_dataset(const ModelParams& params, const DesignSpec& design,
                         RngSeed seed);

// Same draws as simulate_dataset, also returning the latent
// (cause-1, cause-2) lifetime pair of every unit.
Dataset simulate_dataset(const ModelParams& params, const DesignSpec& design,
                         RngSeed seed,
                         std::vector<std::array<double, 2>>& latent);

}  // namespace ssalt

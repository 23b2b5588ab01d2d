#pragma once

// Synthetic tables with the UCI parkinsons column layout. Values are drawn
// from class-conditional Gaussians; they are NOT the clinical data and only
// exercise the pipeline end to end.

#include "rcbench/data.hpp"

#include <cstdint>

namespace rcbench::testing {

struct SyntheticSpec {
    std::size_t positives = 147;
    std::size_t negatives = 48;
    std::uint64_t seed = 7;
    /// Multiplies every class-mean shift; 0 makes the classes identical.
    double separation = 1.0;
};

FeatureTable synthetic_table(const SyntheticSpec& spec = {});

/// Two well-separated Gaussian blobs in d dimensions (labels 0/1).
FeatureTable blobs(std::size_t per_class, std::size_t d, double gap, std::uint64_t seed);

}  // namespace rcbench::testing

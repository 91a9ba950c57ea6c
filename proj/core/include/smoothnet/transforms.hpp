#pragma once

#include "smoothnet/pose_sequence.hpp"

namespace smoothnet {

// Maps pixel coordinates into [-1, 1]: x -> 2x/width - 1, y -> 2y/height - 1.
// Requires layout xy in pixel units; result is unitless.
PoseSequence normalize_2d(const PoseSequence& seq, double width, double height);
// Inverse of normalize_2d; result is in pixel units.
PoseSequence denormalize_2d(const PoseSequence& seq, double width, double height);

// Subtracts the root joint per frame; the root becomes exactly (0,0,0).
PoseSequence root_relative_3d(const PoseSequence& seq, std::size_t root_joint);

}  // namespace smoothnet

#pragma once

#include <cstddef>
#include <string>

#include "smoothnet/matrix.hpp"

namespace smoothnet {

enum class Layout { kXy, kXyz, kGeneric };
enum class Units { kPixel, kMeter, kMm, kUnitless };

std::string layout_name(Layout layout);
Layout layout_from_name(const std::string& name);
std::string units_name(Units units);
Units units_from_name(const std::string& name);

// L frames of C channels; for xy/xyz layouts the channels group into
// num_joints joints of dims coordinates (C = N*D). Generic sequences are
// treated as C independent 1-D channels.
struct PoseSequence {
  double fps = 30.0;
  std::size_t num_joints = 0;
  std::size_t dims = 1;
  Layout layout = Layout::kGeneric;
  Units units = Units::kUnitless;
  Matrix frames;  // L x C

  std::size_t length() const { return frames.rows; }
  std::size_t channels() const { return frames.cols; }
};

// Throws on layout/channel inconsistencies or non-finite values.
void validate_sequence(const PoseSequence& seq);

// Convenience constructor for generic unit-less data.
PoseSequence make_generic_sequence(Matrix frames, double fps);

}  // namespace smoothnet

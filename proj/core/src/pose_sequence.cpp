#include "smoothnet/pose_sequence.hpp"

#include "smoothnet/errors.hpp"

namespace smoothnet {

std::string layout_name(Layout layout) {
  switch (layout) {
    case Layout::kXy: return "xy";
    case Layout::kXyz: return "xyz";
    default: return "generic";
  }
}

Layout layout_from_name(const std::string& name) {
  if (name == "xy") return Layout::kXy;
  if (name == "xyz") return Layout::kXyz;
  if (name == "generic") return Layout::kGeneric;
  throw ConfigError("unknown layout '" + name + "' (expected xy|xyz|generic)");
}

std::string units_name(Units units) {
  switch (units) {
    case Units::kPixel: return "pixel";
    case Units::kMeter: return "meter";
    case Units::kMm: return "mm";
    default: return "unitless";
  }
}

Units units_from_name(const std::string& name) {
  if (name == "pixel") return Units::kPixel;
  if (name == "meter") return Units::kMeter;
  if (name == "mm") return Units::kMm;
  if (name == "unitless") return Units::kUnitless;
  throw ConfigError("unknown units '" + name + "' (expected pixel|meter|mm|unitless)");
}

void validate_sequence(const PoseSequence& seq) {
  if (seq.frames.cols == 0) throw ShapeError("sequence has no channels");
  if (seq.layout == Layout::kXy || seq.layout == Layout::kXyz) {
    const std::size_t d = seq.layout == Layout::kXy ? 2 : 3;
    if (seq.dims != d) {
      throw ShapeError("layout " + layout_name(seq.layout) + " requires dims=" +
                       std::to_string(d));
    }
    if (seq.num_joints * seq.dims != seq.frames.cols) {
      throw ShapeError("channels (" + std::to_string(seq.frames.cols) +
                       ") != num_joints*dims (" + std::to_string(seq.num_joints * seq.dims) +
                       ")");
    }
  }
  if (!(seq.fps > 0.0)) throw ConfigError("fps must be > 0");
  if (!seq.frames.all_finite()) throw NumericError("sequence contains non-finite values");
}

PoseSequence make_generic_sequence(Matrix frames, double fps) {
  PoseSequence seq;
  seq.fps = fps;
  seq.num_joints = frames.cols;
  seq.dims = 1;
  seq.layout = Layout::kGeneric;
  seq.units = Units::kUnitless;
  seq.frames = std::move(frames);
  return seq;
}

}  // namespace smoothnet

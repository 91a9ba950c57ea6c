#include "smoothnet/transforms.hpp"

#include "smoothnet/errors.hpp"

namespace smoothnet {

namespace {

void check_2d(const PoseSequence& seq, Units expect_units, const char* op) {
  validate_sequence(seq);
  if (seq.layout != Layout::kXy) {
    throw ShapeError(std::string(op) + ": requires layout xy, got " + layout_name(seq.layout));
  }
  if (seq.units != expect_units) {
    throw ConfigError(std::string(op) + ": requires units " + units_name(expect_units) +
                      ", got " + units_name(seq.units));
  }
}

}  // namespace

PoseSequence normalize_2d(const PoseSequence& seq, double width, double height) {
  check_2d(seq, Units::kPixel, "normalize_2d");
  if (!(width > 0.0) || !(height > 0.0)) throw ConfigError("normalize_2d: bad frame size");
  PoseSequence out = seq;
  for (std::size_t t = 0; t < out.length(); ++t) {
    double* row = out.frames.row_ptr(t);
    for (std::size_t j = 0; j < out.num_joints; ++j) {
      row[2 * j] = 2.0 * row[2 * j] / width - 1.0;
      row[2 * j + 1] = 2.0 * row[2 * j + 1] / height - 1.0;
    }
  }
  out.units = Units::kUnitless;
  return out;
}

PoseSequence denormalize_2d(const PoseSequence& seq, double width, double height) {
  check_2d(seq, Units::kUnitless, "denormalize_2d");
  if (!(width > 0.0) || !(height > 0.0)) throw ConfigError("denormalize_2d: bad frame size");
  PoseSequence out = seq;
  for (std::size_t t = 0; t < out.length(); ++t) {
    double* row = out.frames.row_ptr(t);
    for (std::size_t j = 0; j < out.num_joints; ++j) {
      row[2 * j] = (row[2 * j] + 1.0) * width / 2.0;
      row[2 * j + 1] = (row[2 * j + 1] + 1.0) * height / 2.0;
    }
  }
  out.units = Units::kPixel;
  return out;
}

PoseSequence root_relative_3d(const PoseSequence& seq, std::size_t root_joint) {
  validate_sequence(seq);
  if (seq.layout != Layout::kXyz) {
    throw ShapeError("root_relative_3d: requires layout xyz, got " + layout_name(seq.layout));
  }
  if (root_joint >= seq.num_joints) {
    throw ConfigError("root_relative_3d: root joint " + std::to_string(root_joint) +
                      " out of range (N=" + std::to_string(seq.num_joints) + ")");
  }
  PoseSequence out = seq;
  for (std::size_t t = 0; t < out.length(); ++t) {
    double* row = out.frames.row_ptr(t);
    const double rx = row[3 * root_joint], ry = row[3 * root_joint + 1],
                 rz = row[3 * root_joint + 2];
    for (std::size_t j = 0; j < out.num_joints; ++j) {
      row[3 * j] -= rx;
      row[3 * j + 1] -= ry;
      row[3 * j + 2] -= rz;
    }
    // Guard against rounding: the root is zero by definition.
    row[3 * root_joint] = 0.0;
    row[3 * root_joint + 1] = 0.0;
    row[3 * root_joint + 2] = 0.0;
  }
  return out;
}

}  // namespace smoothnet

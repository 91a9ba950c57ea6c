#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "smoothnet/pose_sequence.hpp"

namespace smoothnet {

// Canonical JSON: {"format_version":1, "fps", "num_joints", "dims",
// "layout", "units", "frames":[[...C values...],...]}; lossless for
// 64-bit values.
std::string sequence_to_json(const PoseSequence& seq);
PoseSequence sequence_from_json(const std::string& text);
void save_sequence(const std::string& path, const PoseSequence& seq);
PoseSequence load_sequence(const std::string& path);

// CSV twin with header "frame,c0,c1,..."; values at 17 significant digits,
// which round-trips doubles exactly. Metadata is not carried: loaded
// sequences come back generic/unitless at the default fps.
void save_csv(const std::string& path, const PoseSequence& seq);
PoseSequence load_csv(const std::string& path);

struct ManifestPair {
  std::string noisy;
  std::string clean;
  std::string split;  // "train" | "test"
};

struct Manifest {
  std::vector<ManifestPair> pairs;
  std::uint64_t seed = 0;
};

std::string manifest_to_json(const Manifest& manifest);
Manifest manifest_from_json(const std::string& text);
void save_manifest(const std::string& path, const Manifest& manifest);
// Relative pair paths are resolved against the manifest's directory.
Manifest load_manifest(const std::string& path);

}  // namespace smoothnet

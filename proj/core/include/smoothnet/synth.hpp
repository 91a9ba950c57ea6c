#pragma once

#include <cstdint>
#include <vector>

#include "smoothnet/pose_sequence.hpp"

namespace smoothnet {

// Ground-truth generator: every channel is an independent superposition of
// num_sinusoids sinusoids with amplitude, frequency, and phase drawn
// uniformly within the bounds.
struct MotionSpec {
  std::size_t length_l = 256;
  std::size_t channels = 51;
  std::size_t num_sinusoids = 3;
  double max_freq = 2.0;  // Hz, must stay below fps/2
  double max_amp = 0.3;
  double fps = 50.0;
  std::uint64_t seed = 0;
  Layout layout = Layout::kGeneric;
  Units units = Units::kUnitless;
};

void validate_motion_spec(const MotionSpec& spec);
PoseSequence synth_motion(const MotionSpec& spec);

enum class NoiseKind { kGaussianImpulsive, kSudden, kLongTerm };

std::string noise_kind_name(NoiseKind kind);
NoiseKind noise_kind_from_name(const std::string& name);

// gaussian_impulsive: each (frame, channel) entry is perturbed by N(0, sigma^2)
// independently with probability p. sudden: one random frame per channel gets
// a spike. long_term: a random span of `span` frames per channel gets a
// constant bias plus per-frame N(0, sigma^2).
struct NoiseSpec {
  NoiseKind kind = NoiseKind::kGaussianImpulsive;
  double p = 1.0;
  double sigma = 0.0;
  std::size_t span = 1;
  double bias = 0.0;
  std::uint64_t seed = 0;
};

void validate_noise_spec(const NoiseSpec& spec);
PoseSequence inject_noise(const PoseSequence& seq, const NoiseSpec& spec);

struct SequencePair {
  PoseSequence noisy;
  PoseSequence clean;
};

struct Dataset {
  std::vector<SequencePair> train;
  std::vector<SequencePair> test;
};

// count independent paired sequences, the first round(count*split) as the
// train split; per-sequence seeds derive from the spec seeds.
Dataset make_dataset(const MotionSpec& motion, const NoiseSpec& noise, std::size_t count,
                     double split);

}  // namespace smoothnet

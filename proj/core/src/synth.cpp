#include "smoothnet/synth.hpp"

#include <cmath>

#include "smoothnet/errors.hpp"
#include "smoothnet/rng.hpp"

namespace smoothnet {

void validate_motion_spec(const MotionSpec& spec) {
  if (spec.length_l < 1) throw ConfigError("motion spec: length_l must be >= 1");
  if (spec.channels < 1) throw ConfigError("motion spec: channels must be >= 1");
  if (spec.num_sinusoids < 1) throw ConfigError("motion spec: num_sinusoids must be >= 1");
  if (!(spec.fps > 0.0)) throw ConfigError("motion spec: fps must be > 0");
  if (!(spec.max_freq < spec.fps / 2.0)) {
    throw ConfigError("motion spec: max_freq must be below fps/2 (Nyquist)");
  }
  if (!(spec.max_freq >= 0.0)) throw ConfigError("motion spec: max_freq must be >= 0");
  if (!(spec.max_amp >= 0.0)) throw ConfigError("motion spec: max_amp must be >= 0");
  if (spec.layout == Layout::kXy && spec.channels % 2 != 0) {
    throw ConfigError("motion spec: xy layout needs an even channel count");
  }
  if (spec.layout == Layout::kXyz && spec.channels % 3 != 0) {
    throw ConfigError("motion spec: xyz layout needs channels divisible by 3");
  }
}

PoseSequence synth_motion(const MotionSpec& spec) {
  validate_motion_spec(spec);
  PoseSequence seq;
  seq.fps = spec.fps;
  seq.layout = spec.layout;
  seq.units = spec.units;
  switch (spec.layout) {
    case Layout::kXy:
      seq.dims = 2;
      seq.num_joints = spec.channels / 2;
      break;
    case Layout::kXyz:
      seq.dims = 3;
      seq.num_joints = spec.channels / 3;
      break;
    default:
      seq.dims = 1;
      seq.num_joints = spec.channels;
  }
  seq.frames = Matrix(spec.length_l, spec.channels);

  Rng rng(spec.seed);
  std::vector<double> amp(spec.num_sinusoids), omega(spec.num_sinusoids),
      phase(spec.num_sinusoids);
  for (std::size_t c = 0; c < spec.channels; ++c) {
    for (std::size_t k = 0; k < spec.num_sinusoids; ++k) {
      amp[k] = rng.uniform(0.0, spec.max_amp);
      omega[k] = 2.0 * M_PI * rng.uniform(0.0, spec.max_freq) / spec.fps;
      phase[k] = rng.uniform(0.0, 2.0 * M_PI);
    }
    for (std::size_t t = 0; t < spec.length_l; ++t) {
      double v = 0.0;
      for (std::size_t k = 0; k < spec.num_sinusoids; ++k) {
        v += amp[k] * std::sin(omega[k] * static_cast<double>(t) + phase[k]);
      }
      seq.frames(t, c) = v;
    }
  }
  return seq;
}

std::string noise_kind_name(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::kGaussianImpulsive: return "gaussian_impulsive";
    case NoiseKind::kSudden: return "sudden";
    default: return "long_term";
  }
}

NoiseKind noise_kind_from_name(const std::string& name) {
  if (name == "gaussian_impulsive") return NoiseKind::kGaussianImpulsive;
  if (name == "sudden") return NoiseKind::kSudden;
  if (name == "long_term") return NoiseKind::kLongTerm;
  throw ConfigError("unknown noise kind '" + name + "'");
}

void validate_noise_spec(const NoiseSpec& spec) {
  if (!(spec.p >= 0.0 && spec.p <= 1.0)) throw ConfigError("noise spec: p must be in [0, 1]");
  if (!(spec.sigma >= 0.0)) throw ConfigError("noise spec: sigma must be >= 0");
  if (spec.span < 1) throw ConfigError("noise spec: span must be >= 1");
}

PoseSequence inject_noise(const PoseSequence& seq, const NoiseSpec& spec) {
  validate_sequence(seq);
  validate_noise_spec(spec);
  const std::size_t length = seq.length(), channels = seq.channels();
  PoseSequence out = seq;
  Rng rng(spec.seed);
  switch (spec.kind) {
    case NoiseKind::kGaussianImpulsive:
      for (std::size_t t = 0; t < length; ++t) {
        double* row = out.frames.row_ptr(t);
        for (std::size_t c = 0; c < channels; ++c) {
          if (rng.uniform() < spec.p) row[c] += spec.sigma * rng.gaussian();
        }
      }
      break;
    case NoiseKind::kSudden:
      for (std::size_t c = 0; c < channels; ++c) {
        const std::size_t t = rng.uniform_index(length);
        out.frames(t, c) += spec.sigma * rng.gaussian();
      }
      break;
    case NoiseKind::kLongTerm:
      if (spec.span > length) {
        throw ConfigError("noise spec: span " + std::to_string(spec.span) +
                          " exceeds sequence length " + std::to_string(length));
      }
      for (std::size_t c = 0; c < channels; ++c) {
        const std::size_t start = rng.uniform_index(length - spec.span + 1);
        for (std::size_t t = start; t < start + spec.span; ++t) {
          out.frames(t, c) += spec.bias + spec.sigma * rng.gaussian();
        }
      }
      break;
  }
  return out;
}

Dataset make_dataset(const MotionSpec& motion, const NoiseSpec& noise, std::size_t count,
                     double split) {
  validate_motion_spec(motion);
  validate_noise_spec(noise);
  if (!(split > 0.0 && split < 1.0)) throw ConfigError("make_dataset: split must be in (0, 1)");
  const auto n_train = static_cast<std::size_t>(std::llround(split * static_cast<double>(count)));
  Dataset ds;
  for (std::size_t i = 0; i < count; ++i) {
    MotionSpec mi = motion;
    mi.seed = Rng::derive_seed(motion.seed, i);
    NoiseSpec ni = noise;
    ni.seed = Rng::derive_seed(noise.seed, i + 0x10000);
    SequencePair pair;
    pair.clean = synth_motion(mi);
    pair.noisy = inject_noise(pair.clean, ni);
    auto& bucket = i < n_train ? ds.train : ds.test;
    bucket.push_back(std::move(pair));
  }
  return ds;
}

}  // namespace smoothnet

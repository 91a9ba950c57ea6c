#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "smoothnet/pose_sequence.hpp"

namespace smoothnet {

enum class FilterKind { kGaussian, kSavgol, kOneEuro, kMovingAvg };

std::string filter_kind_name(FilterKind kind);
FilterKind filter_kind_from_name(const std::string& name);

// One spec covers all four kinds; only the fields for the chosen kind are
// read. fps = 0 means "use the sequence's fps" in apply_filter.
struct FilterSpec {
  FilterKind kind = FilterKind::kGaussian;
  std::size_t window = 129;   // gaussian | savgol | moving_avg; odd
  double sigma = 4.0;         // gaussian
  std::size_t polyorder = 2;  // savgol
  double min_cutoff = 1e-4;   // one_euro
  double beta = 0.7;          // one_euro
  double d_cutoff = 1.0;      // one_euro
  double fps = 0.0;           // one_euro
};

// Throws ConfigError on invalid combinations. Gaussian and moving-average
// accept any odd window >= 1 (window 1 is the identity); Savitzky-Golay
// needs window >= 3 and polyorder < window.
void validate_filter_spec(const FilterSpec& spec);

// Normalized samples of exp(-t^2 / 2 sigma^2) at offsets -r..r.
std::vector<double> gaussian_kernel(double sigma, std::size_t window);

// Convolution weights reproducing the least-squares polynomial fit
// evaluated at the window center.
std::vector<double> savgol_coeffs(std::size_t window, std::size_t polyorder);

// Per-channel series ops; boundaries use whole-sample reflect padding for
// gaussian/moving_avg and polynomial extension for savgol.
std::vector<double> apply_gaussian(const std::vector<double>& series, const FilterSpec& spec);
std::vector<double> apply_savgol(const std::vector<double>& series, const FilterSpec& spec);
std::vector<double> apply_one_euro(const std::vector<double>& series, const FilterSpec& spec);
std::vector<double> apply_moving_average(const std::vector<double>& series,
                                         const FilterSpec& spec);

// Applies the chosen filter to every channel independently; metadata is
// preserved.
PoseSequence apply_filter(const PoseSequence& seq, const FilterSpec& spec);

}  // namespace smoothnet

#include "smoothnet/filters.hpp"

#include <cmath>

#include "smoothnet/errors.hpp"
#include "smoothnet/matrix.hpp"

namespace smoothnet {

std::string filter_kind_name(FilterKind kind) {
  switch (kind) {
    case FilterKind::kGaussian: return "gaussian";
    case FilterKind::kSavgol: return "savgol";
    case FilterKind::kOneEuro: return "one_euro";
    default: return "moving_avg";
  }
}

FilterKind filter_kind_from_name(const std::string& name) {
  if (name == "gaussian") return FilterKind::kGaussian;
  if (name == "savgol") return FilterKind::kSavgol;
  if (name == "one_euro" || name == "one-euro") return FilterKind::kOneEuro;
  if (name == "moving_avg" || name == "moving-avg") return FilterKind::kMovingAvg;
  throw ConfigError("unknown filter kind '" + name + "'");
}

void validate_filter_spec(const FilterSpec& spec) {
  switch (spec.kind) {
    case FilterKind::kGaussian:
      if (spec.window < 1 || spec.window % 2 == 0) {
        throw ConfigError("gaussian: window must be odd and >= 1");
      }
      if (!(spec.sigma > 0.0)) throw ConfigError("gaussian: sigma must be > 0");
      break;
    case FilterKind::kSavgol:
      if (spec.window < 3 || spec.window % 2 == 0) {
        throw ConfigError("savgol: window must be odd and >= 3");
      }
      if (spec.polyorder >= spec.window) {
        throw ConfigError("savgol: polyorder must be < window");
      }
      break;
    case FilterKind::kOneEuro:
      if (!(spec.min_cutoff > 0.0)) throw ConfigError("one_euro: min_cutoff must be > 0");
      if (!(spec.d_cutoff > 0.0)) throw ConfigError("one_euro: d_cutoff must be > 0");
      if (!(spec.beta >= 0.0)) throw ConfigError("one_euro: beta must be >= 0");
      if (!(spec.fps >= 0.0)) throw ConfigError("one_euro: fps must be >= 0");
      break;
    case FilterKind::kMovingAvg:
      if (spec.window < 1 || spec.window % 2 == 0) {
        throw ConfigError("moving_avg: window must be odd and >= 1");
      }
      break;
  }
}

namespace {

// Whole-sample mirror: x[-k] = x[k], x[L-1+k] = x[L-1-k].
std::size_t reflect_index(long i, std::size_t length) {
  const long n = static_cast<long>(length);
  if (n == 1) return 0;
  const long period = 2 * n - 2;
  long m = i % period;
  if (m < 0) m += period;
  return static_cast<std::size_t>(m < n ? m : period - m);
}

std::vector<double> convolve_reflect(const std::vector<double>& series,
                                     const std::vector<double>& kernel) {
  const std::size_t length = series.size();
  const long r = static_cast<long>(kernel.size() - 1) / 2;
  std::vector<double> out(length);
  for (std::size_t i = 0; i < length; ++i) {
    double acc = 0.0;
    for (long j = -r; j <= r; ++j) {
      acc += kernel[static_cast<std::size_t>(j + r)] *
             series[reflect_index(static_cast<long>(i) + j, length)];
    }
    out[i] = acc;
  }
  return out;
}

}  // namespace

std::vector<double> gaussian_kernel(double sigma, std::size_t window) {
  FilterSpec check;
  check.kind = FilterKind::kGaussian;
  check.window = window;
  check.sigma = sigma;
  validate_filter_spec(check);
  const long r = static_cast<long>(window - 1) / 2;
  std::vector<double> kernel(window);
  double sum = 0.0;
  for (long t = -r; t <= r; ++t) {
    const double v = std::exp(-static_cast<double>(t * t) / (2.0 * sigma * sigma));
    kernel[static_cast<std::size_t>(t + r)] = v;
    sum += v;
  }
  for (auto& v : kernel) v /= sum;
  return kernel;
}

std::vector<double> apply_gaussian(const std::vector<double>& series, const FilterSpec& spec) {
  if (series.empty()) throw ShapeError("apply_gaussian: empty series");
  return convolve_reflect(series, gaussian_kernel(spec.sigma, spec.window));
}

namespace {

// Vandermonde matrix over centered offsets -r..r, one column per power.
Matrix savgol_design(std::size_t window, std::size_t polyorder) {
  const long r = static_cast<long>(window - 1) / 2;
  Matrix a(window, polyorder + 1);
  for (long t = -r; t <= r; ++t) {
    double p = 1.0;
    for (std::size_t k = 0; k <= polyorder; ++k) {
      a(static_cast<std::size_t>(t + r), k) = p;
      p *= static_cast<double>(t);
    }
  }
  return a;
}

double poly_eval(const std::vector<double>& coeffs, double t) {
  double acc = 0.0;
  for (std::size_t k = coeffs.size(); k-- > 0;) acc = acc * t + coeffs[k];
  return acc;
}

}  // namespace

std::vector<double> savgol_coeffs(std::size_t window, std::size_t polyorder) {
  FilterSpec check;
  check.kind = FilterKind::kSavgol;
  check.window = window;
  check.polyorder = polyorder;
  validate_filter_spec(check);
  const Matrix a = savgol_design(window, polyorder);
  std::vector<double> coeffs(window);
  std::vector<double> e(window, 0.0);
  for (std::size_t j = 0; j < window; ++j) {
    e[j] = 1.0;
    // Center value of the fit to e_j = constant coefficient of lstsq(A, e_j).
    coeffs[j] = solve_least_squares(a, e)[0];
    e[j] = 0.0;
  }
  return coeffs;
}

std::vector<double> apply_savgol(const std::vector<double>& series, const FilterSpec& spec) {
  validate_filter_spec(spec);
  const std::size_t length = series.size(), window = spec.window;
  if (length < window) {
    throw ConfigError("apply_savgol: series length " + std::to_string(length) +
                      " < window " + std::to_string(window));
  }
  const std::size_t r = (window - 1) / 2;
  const auto kernel = savgol_coeffs(window, spec.polyorder);
  std::vector<double> out(length);
  for (std::size_t i = r; i + r < length; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < window; ++j) acc += kernel[j] * series[i - r + j];
    out[i] = acc;
  }
  const Matrix a = savgol_design(window, spec.polyorder);
  std::vector<double> left(series.begin(), series.begin() + static_cast<long>(window));
  const auto lc = solve_least_squares(a, left);
  for (std::size_t i = 0; i < r; ++i) {
    out[i] = poly_eval(lc, static_cast<double>(i) - static_cast<double>(r));
  }
  std::vector<double> right(series.end() - static_cast<long>(window), series.end());
  const auto rc = solve_least_squares(a, right);
  const double center = static_cast<double>(length - 1 - r);
  for (std::size_t i = length - r; i < length; ++i) {
    out[i] = poly_eval(rc, static_cast<double>(i) - center);
  }
  return out;
}

std::vector<double> apply_one_euro(const std::vector<double>& series, const FilterSpec& spec) {
  validate_filter_spec(spec);
  if (!(spec.fps > 0.0)) throw ConfigError("one_euro: fps must be > 0");
  if (series.empty()) throw ShapeError("apply_one_euro: empty series");
  auto alpha = [&](double cutoff) { return 1.0 / (1.0 + spec.fps / (2.0 * M_PI * cutoff)); };
  std::vector<double> out(series.size());
  out[0] = series[0];
  double x_hat = series[0];
  double dx_hat = 0.0;
  const double alpha_d = alpha(spec.d_cutoff);
  for (std::size_t t = 1; t < series.size(); ++t) {
    const double dx = (series[t] - x_hat) * spec.fps;
    dx_hat = alpha_d * dx + (1.0 - alpha_d) * dx_hat;
    const double fc = spec.min_cutoff + spec.beta * std::abs(dx_hat);
    const double a = alpha(fc);
    x_hat = a * series[t] + (1.0 - a) * x_hat;
    out[t] = x_hat;
  }
  return out;
}

std::vector<double> apply_moving_average(const std::vector<double>& series,
                                         const FilterSpec& spec) {
  validate_filter_spec(spec);
  if (series.empty()) throw ShapeError("apply_moving_average: empty series");
  const std::vector<double> kernel(spec.window, 1.0 / static_cast<double>(spec.window));
  return convolve_reflect(series, kernel);
}

PoseSequence apply_filter(const PoseSequence& seq, const FilterSpec& spec) {
  validate_sequence(seq);
  FilterSpec resolved = spec;
  if (spec.kind == FilterKind::kOneEuro && !(spec.fps > 0.0)) resolved.fps = seq.fps;
  validate_filter_spec(resolved);
  PoseSequence out = seq;
  std::vector<double> series(seq.length());
  for (std::size_t c = 0; c < seq.channels(); ++c) {
    for (std::size_t t = 0; t < seq.length(); ++t) series[t] = seq.frames(t, c);
    std::vector<double> filtered;
    switch (resolved.kind) {
      case FilterKind::kGaussian: filtered = apply_gaussian(series, resolved); break;
      case FilterKind::kSavgol: filtered = apply_savgol(series, resolved); break;
      case FilterKind::kOneEuro: filtered = apply_one_euro(series, resolved); break;
      case FilterKind::kMovingAvg: filtered = apply_moving_average(series, resolved); break;
    }
    for (std::size_t t = 0; t < seq.length(); ++t) out.frames(t, c) = filtered[t];
  }
  return out;
}

}  // namespace smoothnet

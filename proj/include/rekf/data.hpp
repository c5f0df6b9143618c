#ifndef REKF_DATA_HPP
#define REKF_DATA_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rekf/numerics.hpp"

namespace rekf {

struct Experiment {
  Matrix u;  // N x n_u
  Matrix y;  // N x n_y
};

/// Per-channel affine scaling computed on training data. Channels whose
/// standard deviation vanishes, and binary output channels, are left as-is.
struct ChannelScaling {
  Vector mean;
  Vector std;
  std::vector<bool> active;

  Vector apply(const Vector& v) const;
  Vector invert(const Vector& v) const;
};

struct Scaling {
  ChannelScaling u;
  ChannelScaling y;
  bool computed = false;
};

struct Dataset {
  std::vector<Experiment> experiments;
  std::optional<double> sample_time;
  std::vector<bool> binary_y;
  Scaling scaling;

  Eigen::Index n_u() const;
  Eigen::Index n_y() const;
  Eigen::Index total_samples() const;
  void validate() const;
};

/// CSV with header u1..u<nu>, y1..y<ny> and an optional leading `exp`
/// column grouping rows into experiments.
Dataset load_csv(const std::string& path, Eigen::Index n_u, Eigen::Index n_y);
void save_csv(const std::string& path, const Dataset& data);

Scaling compute_scaling(const Dataset& train);
Dataset apply_scaling(const Dataset& data, const Scaling& s);

/// Standard scaling on the non-binary channels; returns the scaled dataset
/// with the metadata frozen into it.
std::pair<Dataset, Scaling> standardize(const Dataset& data);

/// Best fit rate 100 * (1 - |Y - Yhat| / |Y - mean(Y)|), channels stacked.
double bfr(const Matrix& y, const Matrix& y_pred);

/// Fraction of samples whose thresholded prediction (>= 0.5 maps to 1)
/// matches the binary label.
double accuracy(const Matrix& y, const Matrix& y_pred);

struct GeneratedData {
  Dataset train;
  Dataset test;
  std::string generator;
  std::uint64_t seed = 0;
  double sigma = 0.0;
  Eigen::Index n_total = 0;
};

/// The 3-state linear system with binary outputs: states driven by a
/// piecewise-constant uniform input resampled with probability 0.9 per
/// step, output thresholded at a noisy hyperplane. First half train,
/// second half test.
GeneratedData gen_binary_linear(double sigma, Eigen::Index n_total, std::uint64_t seed);

/// Synthetic nonlinear SISO benchmark: a saturated second-order recursion
///   x1+ = 0.8 x1 - 0.35 x2 + 0.6 tanh(1.5 u + 0.4 x1)
///   x2+ = x1
///   y   = tanh(1.2 x1) + 0.3 x2
/// excited by a multisine input. First half train, second half test.
GeneratedData gen_nonlinear_benchmark(std::uint64_t seed, Eigen::Index n_total);

}  // namespace rekf

#endif  // REKF_DATA_HPP

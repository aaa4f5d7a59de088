#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "batchbo/loop.hpp"
#include "batchbo/twist.hpp"

namespace batchbo {

/// Orthonormal m x N basis that maps the search space into a lower dimension.
struct CompressionModel {
  std::size_t original_dim = 0;
  std::size_t compressed_dim = 0;
  Matrix basis;  // compressed_dim x original_dim, orthonormal rows
  double epsilon = 0.0;
  std::size_t n_comp_samples = 0;
  /// Median number of non-zero sparse-code coefficients.
  std::size_t sparsity_estimate = 0;
  /// sqrt(N) * max |<e_i, basis row>| over coordinate sensing vectors.
  double incoherence_estimate = 0.0;
  /// Normalized code energy of every basis direction, descending.
  std::vector<double> energy_spectrum;
  /// Mean relative reconstruction error on the calibration samples.
  double calibration_error = 0.0;
  /// epsilon was unattainable and the identity map was returned.
  bool identity_fallback = false;
};

struct CompressionOptions {
  /// lambda = lambda_scale * |M^T y|_inf per sample.
  double lambda_scale = 0.1;
  TwistOptions twist{.max_iters = 200};
};

/// Learns a compression from calibration samples (rows).
///
/// The change of basis P is the set of principal directions of the samples.
/// Each sample is sparse-coded in P with TwIST; directions are ranked by code
/// energy and m is the smallest count whose projection reconstructs the
/// samples with mean relative error <= epsilon.
CompressionModel fit_compression(const Matrix& samples, double epsilon, std::uint64_t seed,
                                 const CompressionOptions& options = {});

Vector compress_point(const CompressionModel& model, const Vector& x);
/// Least-norm pre-image basis^T z.
Vector decompress_point(const CompressionModel& model, const Vector& z);

/// Mean of |x - decompress(compress(x))| / |x| over rows (zero rows count as 0).
double reconstruction_error(const CompressionModel& model, const Matrix& samples);

/// Measurement-count scale mu^2 S log(N)^2 of a model.
double measurement_scale(const CompressionModel& model);

struct CsOptions {
  double epsilon = 0.05;
  std::size_t n_comp = 1000;
  CompressionOptions compression;
};

/// KMBBO run in a compressed space: calibrate on n_comp domain draws, cluster in
/// the compressed space, decompress each centroid (clipped to the box, or
/// snapped to an unevaluated pool row) before evaluation.
class CsKmbboStrategy : public Strategy {
 public:
  CsKmbboStrategy(StrategyOptions options, CsOptions cs);

  std::string name() const override { return "cs-kmbbo"; }
  void prepare(const Objective& objective, std::uint64_t seed) override;
  Proposal propose(const Objective& objective, const Dataset& data, std::size_t k, std::uint64_t seed) override;
  std::optional<CompressionSummary> compression() const override;

  const CompressionModel& model() const { return *model_; }
  const Domain& compressed_domain() const { return *compressed_domain_; }

 private:
  StrategyOptions options_;
  CsOptions cs_;
  std::optional<CompressionModel> model_;
  std::optional<Domain> compressed_domain_;
};

/// Full CS-KMBBO run with n_init uniform initial points.
RunRecord cs_kmbbo_run(const Objective& objective, std::size_t k, std::size_t n_epochs, std::size_t n_s,
                       double epsilon, std::uint64_t seed, std::size_t n_init = 10,
                       const StrategyOptions& options = {});

}  // namespace batchbo

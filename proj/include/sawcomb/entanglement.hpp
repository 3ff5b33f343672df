#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sawcomb/gaussian_state.hpp"

namespace sawcomb {

/// Split of the mode set into two nonempty parts. Canonical form keeps mode 0
/// (the smallest index) in set_i; both sets are sorted.
struct Bipartition {
  std::vector<int> set_i;
  std::vector<int> set_j;

  /// Builds the canonical bipartition of {0..n_modes-1} with `part` on one side.
  static Bipartition from_subset(std::vector<int> part, int n_modes);

  int n_modes() const { return static_cast<int>(set_i.size() + set_j.size()); }
  /// "{0, 2} : {1, 3}" with the side that excludes the last mode printed first.
  std::string label() const;
  bool operator==(const Bipartition&) const = default;
};

/// All 2^(N-1) - 1 bipartitions, ordered by the bitmask of the side that
/// excludes mode N-1: {0}:{..}, {1}:{..}, {0,1}:{..}, {2}:{..}, ...
std::vector<Bipartition> all_bipartitions(int n_modes);

struct EntanglementReport {
  double value_e = 0.0;
  double sigma = 0.0;
  double significance = 0.0;
  Eigen::VectorXd h_vec;
  Eigen::VectorXd g_vec;
  Bipartition bipartition;
};

/// λ_min(ΛVΛ + iΩ) with Λ flipping the Q quadrature of every mode in
/// transpose_set. Negative values certify entanglement across the split.
double ppt_min_eigenvalue(const CovarianceMatrix& v, std::span<const int> transpose_set);

struct Decorrelation {
  CovarianceMatrix v;
  /// Block-diagonal local symplectic map applied: v = T V Tᵀ.
  Eigen::MatrixXd transform;
  /// ‖V^IQ‖ / sqrt((‖V^II‖² + ‖V^QQ‖²)/2) after the transform.
  double residual_ratio = 0.0;
  bool within_tolerance = true;  // residual_ratio <= 0.05
};

/// Local normalisation of each mode's 2×2 block to a multiple of the identity,
/// followed by per-mode phase rotations that minimise the inter-mode I–Q
/// correlations (closed form for two modes, coordinate sweeps otherwise).
Decorrelation decorrelate(const CovarianceMatrix& v);

/// Element-wise standard errors carried through a linear map, assuming
/// independent element errors: σ'²_ab = Σ_ij T_ai² T_bj² σ²_ij.
Eigen::MatrixXd transform_sigma(const Eigen::MatrixXd& transform, const Eigen::MatrixXd& sigma);

/// E(h, g) on a covariance already in decorrelated form.
double svl_value(const CovarianceMatrix& v, const Bipartition& bp, const Eigen::VectorXd& h,
                 const Eigen::VectorXd& g);

struct SvlOptions {
  int starts = 20;
  int max_iterations = 5000;
  double rel_tol = 1e-10;
  std::uint64_t seed = 0x5eed;
};

/// Minimises E over ‖h‖² + ‖g‖² = 2 from several starts. Each step fixes the
/// signs of the two inner products at the iterate, which turns E into a
/// quadratic form bounding it from above, and moves to that form's lowest
/// eigenvector.
/// The input is used as given; call decorrelate first for measured data.
/// Throws OptimizerFailure if no start produced a finite value.
EntanglementReport svl_test(const CovarianceMatrix& v, const Bipartition& bp, const SvlOptions& opts = {});

/// E for fixed vectors, e.g. vectors optimised once on a global average.
EntanglementReport svl_evaluate(const CovarianceMatrix& v, const Bipartition& bp, const Eigen::VectorXd& h,
                                const Eigen::VectorXd& g);

/// σ = sqrt(Σ_ij σ²_ij (h_i² h_j² on II) + σ²_ij (g_i² g_j² on QQ)); sigma is
/// the interleaved element-wise standard-error matrix.
double svl_sigma(const Eigen::MatrixXd& sigma, const Eigen::VectorXd& h, const Eigen::VectorXd& g);

/// Element-wise standard error of the de-amplified covariance, given the raw
/// (amplified, vacuum-unit) covariance, the fitted amplifier model and the
/// standard error of the mean of each raw element. Negative diagonal
/// variances (from the gain–noise correlation term) clamp to zero; a message
/// is appended to `warnings` when provided.
Eigen::MatrixXd propagate_errors(const CovarianceMatrix& v_raw, const AmplifierModel& amp, const Eigen::MatrixXd& sem,
                                 std::vector<std::string>* warnings = nullptr);

struct WeightedSignificance {
  double value_e = 0.0;  // inverse-variance weighted mean
  double sigma = 0.0;    // 1/sqrt(Σ 1/σ_k²)
  double significance = 0.0;
};

/// Combines per-interval (E_k, σ_k). Throws ZeroVariance for σ_k <= 0 and
/// InsufficientData for an empty list.
WeightedSignificance significance(std::span<const double> values, std::span<const double> sigmas);

/// JSON array of {bipartition, value_e, sigma, significance} rows.
std::string significance_table_json(std::span<const EntanglementReport> rows);

}  // namespace sawcomb

#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "sawcomb/gaussian_state.hpp"

namespace sawcomb {

struct ReconstructOptions {
  /// Acceptance band for treating the input as already physical, and the
  /// relative duality gap at which the interior-point solve stops.
  double tol = 1e-9;
  int max_newton_steps = 200;  // per centring step
};

struct ReconstructResult {
  CovarianceMatrix v;
  /// max over free elements of |V'_ab - V_ab| / σ_ab.
  double objective = 0.0;
  bool converged = true;
  int newton_steps = 0;
  std::vector<std::string> warnings;
};

/// Closest physical covariance in the weighted max-norm:
///   min_V max_ab |V'_ab - V_ab| / σ_ab   s.t.  V + iΩ ⪰ 0 (hence V ⪰ 0).
/// Elements with σ_ab = 0 are held fixed; if that leaves no physical
/// completion they are relaxed to σ = 1e-12 and a warning is recorded.
/// Solved with a log-barrier interior-point method in the free upper-triangle
/// entries plus the level t.
ReconstructResult reconstruct_physical(const CovarianceMatrix& v_meas, const Eigen::MatrixXd& sigma,
                                       const ReconstructOptions& opts = {});

}  // namespace sawcomb

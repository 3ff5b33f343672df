#include "sawcomb/entanglement.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include <json.hpp>

#include "sawcomb/errors.hpp"
#include "sawcomb/scattering.hpp"

namespace sawcomb {

Bipartition Bipartition::from_subset(std::vector<int> part, int n_modes) {
  if (n_modes < 2) throw InvalidArgument("a bipartition needs at least two modes");
  std::vector<bool> in(n_modes, false);
  for (int m : part) {
    if (m < 0 || m >= n_modes) throw InvalidArgument("bipartition mode out of range");
    if (in[m]) throw InvalidArgument("bipartition lists a mode twice");
    in[m] = true;
  }
  Bipartition bp;
  for (int m = 0; m < n_modes; ++m) (in[m] == in[0] ? bp.set_i : bp.set_j).push_back(m);
  if (bp.set_j.empty()) throw InvalidArgument("bipartition sides must both be nonempty");
  return bp;
}

namespace {

std::string brace_list(const std::vector<int>& s) {
  std::ostringstream os;
  os << '{';
  for (std::size_t k = 0; k < s.size(); ++k) os << (k ? ", " : "") << s[k];
  os << '}';
  return os.str();
}

}  // namespace

std::string Bipartition::label() const {
  const int last = n_modes() - 1;
  const bool i_has_last = std::find(set_i.begin(), set_i.end(), last) != set_i.end();
  const auto& first = i_has_last ? set_j : set_i;
  const auto& second = i_has_last ? set_i : set_j;
  return brace_list(first) + " : " + brace_list(second);
}

std::vector<Bipartition> all_bipartitions(int n_modes) {
  if (n_modes < 2) throw InvalidArgument("a bipartition needs at least two modes");
  if (n_modes > 24) throw InvalidArgument("too many modes to enumerate bipartitions");
  std::vector<Bipartition> out;
  const unsigned count = 1u << (n_modes - 1);
  for (unsigned mask = 1; mask < count; ++mask) {
    std::vector<int> part;
    for (int m = 0; m < n_modes - 1; ++m)
      if (mask & (1u << m)) part.push_back(m);
    out.push_back(Bipartition::from_subset(part, n_modes));
  }
  return out;
}

double ppt_min_eigenvalue(const CovarianceMatrix& v, std::span<const int> transpose_set) {
  const int n = v.n_modes();
  Eigen::VectorXd lambda = Eigen::VectorXd::Ones(2 * n);
  for (int m : transpose_set) {
    if (m < 0 || m >= n) throw InvalidArgument("transpose set mode out of range");
    lambda(2 * m + 1) = -1.0;
  }
  const Eigen::MatrixXd vt = lambda.asDiagonal() * v.matrix() * lambda.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(physicality_matrix(vt), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

namespace {

Eigen::Matrix2d rotation(double c, double s) {
  Eigen::Matrix2d r;
  r << c, s, -s, c;
  return r;
}

Eigen::Matrix2d local_normaliser(const Eigen::Matrix2d& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(a);
  const Eigen::Vector2d w = es.eigenvalues();
  if (!(w.minCoeff() > 0.0)) return Eigen::Matrix2d::Identity();
  const double det_root = std::pow(w(0) * w(1), 0.25);
  const Eigen::Vector2d inv_sqrt = w.cwiseSqrt().cwiseInverse();
  return det_root * es.eigenvectors() * inv_sqrt.asDiagonal() * es.eigenvectors().transpose();
}

double cross_ratio(const CovarianceMatrix& v) {
  const double iq = v.iq_block().norm();
  const double in_block = std::sqrt((v.ii_block().squaredNorm() + v.qq_block().squaredNorm()) / 2.0);
  return in_block > 0.0 ? iq / in_block : 0.0;
}

}  // namespace

Decorrelation decorrelate(const CovarianceMatrix& v) {
  const int n = v.n_modes();
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  for (int j = 0; j < n; ++j) t.block<2, 2>(2 * j, 2 * j) = local_normaliser(v.matrix().block<2, 2>(2 * j, 2 * j));
  Eigen::MatrixXd w = t * v.matrix() * t.transpose();

  std::vector<Eigen::Matrix2d> rot(n, Eigen::Matrix2d::Identity());
  if (n == 2) {
    Eigen::JacobiSVD<Eigen::Matrix2d> svd(w.block<2, 2>(0, 2), Eigen::ComputeFullU | Eigen::ComputeFullV);
    Eigen::Matrix2d u = svd.matrixU();
    Eigen::Matrix2d vv = svd.matrixV();
    if (u.determinant() < 0.0) u.col(1) *= -1.0;
    if (vv.determinant() < 0.0) vv.col(1) *= -1.0;
    rot[0] = u.transpose();
    rot[1] = vv.transpose();
  } else if (n > 2) {
    for (int sweep = 0; sweep < 200; ++sweep) {
      double moved = 0.0;
      for (int j = 0; j < n; ++j) {
        Eigen::Matrix2d p = Eigen::Matrix2d::Zero();
        for (int k = 0; k < n; ++k) {
          if (k == j) continue;
          const Eigen::Matrix2d c = w.block<2, 2>(2 * j, 2 * k);
          const Eigen::Vector2d a(c(0, 1), c(1, 1));
          const Eigen::Vector2d b(c(1, 0), -c(0, 0));
          p += a * a.transpose() + b * b.transpose();
        }
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(p);
        Eigen::Vector2d cs = es.eigenvectors().col(0);
        if (cs(0) < 0.0) cs = -cs;
        const Eigen::Matrix2d r = rotation(cs(0), cs(1));
        moved = std::max(moved, std::abs(cs(1)));
        Eigen::MatrixXd rj = Eigen::MatrixXd::Identity(2 * n, 2 * n);
        rj.block<2, 2>(2 * j, 2 * j) = r;
        w = rj * w * rj.transpose();
        rot[j] = r * rot[j];
      }
      if (moved < 1e-13) break;
    }
  }

  Eigen::MatrixXd r_all = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  for (int j = 0; j < n; ++j) r_all.block<2, 2>(2 * j, 2 * j) = rot[j];
  Decorrelation out;
  out.transform = r_all * t;
  Eigen::MatrixXd vd = out.transform * v.matrix() * out.transform.transpose();
  out.v = CovarianceMatrix((vd + vd.transpose()) / 2.0);
  out.residual_ratio = cross_ratio(out.v);
  out.within_tolerance = out.residual_ratio <= 0.05;
  return out;
}

Eigen::MatrixXd transform_sigma(const Eigen::MatrixXd& transform, const Eigen::MatrixXd& sigma) {
  if (transform.cols() != sigma.rows() || sigma.rows() != sigma.cols())
    throw DimensionMismatch("transform and sigma dimensions differ");
  const Eigen::MatrixXd t2 = transform.array().square().matrix();
  const Eigen::MatrixXd s2 = sigma.array().square().matrix();
  return (t2 * s2 * t2.transpose()).array().sqrt().matrix();
}

namespace {

struct SvlProblem {
  Eigen::MatrixXd vii, vqq;
  std::vector<int> side;  // 0 for set_i, 1 for set_j, per mode

  SvlProblem(const CovarianceMatrix& v, const Bipartition& bp) : vii(v.ii_block()), vqq(v.qq_block()) {
    if (bp.n_modes() != v.n_modes()) throw DimensionMismatch("bipartition and covariance mode counts differ");
    side.assign(v.n_modes(), 0);
    for (int m : bp.set_j) side[m] = 1;
  }

  int n() const { return static_cast<int>(vii.rows()); }

  Eigen::Vector2d inner(const Eigen::VectorXd& h, const Eigen::VectorXd& g) const {
    Eigen::Vector2d s = Eigen::Vector2d::Zero();
    for (int m = 0; m < n(); ++m) s(side[m]) += h(m) * g(m);
    return s;
  }

  double value(const Eigen::VectorXd& h, const Eigen::VectorXd& g) const {
    const Eigen::Vector2d s = inner(h, g);
    return h.dot(vii * h) + g.dot(vqq * g) - 2.0 * std::abs(s(0)) - 2.0 * std::abs(s(1));
  }

  // Quadratic form that agrees with E at x and bounds it from above elsewhere.
  Eigen::MatrixXd majoriser(const Eigen::VectorXd& x) const {
    const int k = n();
    const Eigen::Vector2d s = inner(x.head(k), x.tail(k));
    Eigen::MatrixXd q = Eigen::MatrixXd::Zero(2 * k, 2 * k);
    q.topLeftCorner(k, k) = vii;
    q.bottomRightCorner(k, k) = vqq;
    for (int m = 0; m < k; ++m) {
      const double sign = s(side[m]) >= 0.0 ? 1.0 : -1.0;
      q(m, k + m) = q(k + m, m) = -sign;
    }
    return q;
  }
};

struct Descent {
  Eigen::VectorXd x;
  double value = std::numeric_limits<double>::infinity();
};

Descent descend(const SvlProblem& pb, Eigen::VectorXd x, const SvlOptions& opts) {
  const int k = pb.n();
  x *= std::sqrt(2.0) / x.norm();
  double e = pb.value(x.head(k), x.tail(k));
  // Majorise-minimise: the lowest eigenvector of the majoriser never raises E.
  for (int it = 0; it < opts.max_iterations; ++it) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(pb.majoriser(x));
    Eigen::VectorXd next = std::sqrt(2.0) * es.eigenvectors().col(0);
    if (next.dot(x) < 0.0) next = -next;
    const double e_next = pb.value(next.head(k), next.tail(k));
    if (!(e_next <= e)) break;
    const double change = e - e_next;
    x = next;
    e = e_next;
    if (change <= opts.rel_tol * std::max(1.0, std::abs(e))) break;
  }
  return {x, e};
}

std::vector<Eigen::VectorXd> starting_points(const SvlProblem& pb, const SvlOptions& opts) {
  const int k = pb.n();
  std::vector<Eigen::VectorXd> starts;
  Eigen::VectorXd ones = Eigen::VectorXd::Ones(k);
  Eigen::VectorXd split(k);
  for (int m = 0; m < k; ++m) split(m) = pb.side[m] == 0 ? 1.0 : -1.0;
  for (const auto* hv : {&ones, &split}) {
    for (const auto* gv : {&ones, &split}) {
      Eigen::VectorXd x(2 * k);
      x << *hv, *gv;
      starts.push_back(x);
    }
  }
  for (int a = 0; a < 2 * k && static_cast<int>(starts.size()) < opts.starts; ++a)
    starts.push_back(Eigen::VectorXd::Unit(2 * k, a));
  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  while (static_cast<int>(starts.size()) < opts.starts) {
    Eigen::VectorXd x(2 * k);
    for (int a = 0; a < 2 * k; ++a) x(a) = normal(rng);
    starts.push_back(x);
  }
  if (static_cast<int>(starts.size()) > opts.starts) starts.resize(std::max(opts.starts, 1));
  return starts;
}

}  // namespace

double svl_value(const CovarianceMatrix& v, const Bipartition& bp, const Eigen::VectorXd& h,
                 const Eigen::VectorXd& g) {
  const SvlProblem pb(v, bp);
  if (h.size() != pb.n() || g.size() != pb.n()) throw DimensionMismatch("h and g need one entry per mode");
  return pb.value(h, g);
}

EntanglementReport svl_test(const CovarianceMatrix& v, const Bipartition& bp, const SvlOptions& opts) {
  const SvlProblem pb(v, bp);
  const int k = pb.n();
  Descent best;
  for (const auto& x0 : starting_points(pb, opts)) {
    const Descent d = descend(pb, x0, opts);
    if (std::isfinite(d.value) && d.value < best.value) best = d;
  }
  if (!std::isfinite(best.value)) throw OptimizerFailure("no start produced a finite value");
  EntanglementReport r;
  r.h_vec = best.x.head(k);
  r.g_vec = best.x.tail(k);
  r.value_e = pb.value(r.h_vec, r.g_vec);
  r.bipartition = bp;
  return r;
}

EntanglementReport svl_evaluate(const CovarianceMatrix& v, const Bipartition& bp, const Eigen::VectorXd& h,
                                const Eigen::VectorXd& g) {
  EntanglementReport r;
  r.value_e = svl_value(v, bp, h, g);
  r.h_vec = h;
  r.g_vec = g;
  r.bipartition = bp;
  return r;
}

double svl_sigma(const Eigen::MatrixXd& sigma, const Eigen::VectorXd& h, const Eigen::VectorXd& g) {
  const auto k = h.size();
  if (g.size() != k || sigma.rows() != 2 * k || sigma.cols() != 2 * k)
    throw DimensionMismatch("sigma must be 2N×2N with N-entry h and g");
  double total = 0.0;
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) {
      const double s_ii = sigma(2 * i, 2 * j);
      const double s_qq = sigma(2 * i + 1, 2 * j + 1);
      total += s_ii * s_ii * h(i) * h(i) * h(j) * h(j) + s_qq * s_qq * g(i) * g(i) * g(j) * g(j);
    }
  }
  return std::sqrt(total);
}

Eigen::MatrixXd propagate_errors(const CovarianceMatrix& v_raw, const AmplifierModel& amp, const Eigen::MatrixXd& sem,
                                 std::vector<std::string>* warnings) {
  const Eigen::Index dim = v_raw.matrix().rows();
  if (sem.rows() != dim || sem.cols() != dim) throw DimensionMismatch("standard-error matrix has the wrong shape");
  if (!amp.fit_covariance) throw MissingFitCovariance("error propagation needs fitted gain/noise uncertainties");
  const CovarianceMatrix v = deamplify(v_raw, amp);
  const Eigen::MatrixXd& vt = v_raw.matrix();

  Eigen::MatrixXd out(dim, dim);
  for (Eigen::Index a = 0; a < dim; ++a) {
    for (Eigen::Index b = 0; b < dim; ++b) {
      const int mi = static_cast<int>(a / 2), mj = static_cast<int>(b / 2);
      const double gi = amp.gain[mi], gj = amp.gain[mj];
      const double sgi = amp.sigma_gain(mi), sgj = amp.sigma_gain(mj);
      const double delta = a == b ? 1.0 : 0.0;
      const double noise_i = 2.0 * amp.added_photons[mi] + 1.0;

      const double ta = vt(a, b) / (2.0 * std::sqrt(gi * gi * gi * gj)) * sgi;
      const double tb = vt(a, b) / (2.0 * std::sqrt(gj * gj * gj * gi)) * sgj;
      double var = (ta * ta + tb * tb) * (1.0 + delta);
      var += 2.0 * delta * std::pow(noise_i / gi * sgi, 2);
      var += delta * std::pow(2.0 * amp.sigma_noise(mi), 2);
      var += std::pow(sem(a, b) / std::sqrt(gi * gj), 2);
      var += delta * 4.0 * (v(a, a) - noise_i) / gi * amp.cov_gain_noise(mi);
      if (var < 0.0) {
        if (warnings)
          warnings->push_back("negative propagated variance at element (" + std::to_string(a) + "," +
                              std::to_string(b) + ") clamped to zero");
        var = 0.0;
      }
      out(a, b) = std::sqrt(var);
    }
  }
  return out;
}

WeightedSignificance significance(std::span<const double> values, std::span<const double> sigmas) {
  if (values.empty()) throw InsufficientData("significance needs at least one interval");
  if (values.size() != sigmas.size()) throw DimensionMismatch("one sigma per value expected");
  double w_sum = 0.0, we_sum = 0.0;
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (!(sigmas[k] > 0.0)) throw ZeroVariance("interval " + std::to_string(k) + " has zero variance");
    const double w = 1.0 / (sigmas[k] * sigmas[k]);
    w_sum += w;
    we_sum += w * values[k];
  }
  WeightedSignificance out;
  out.value_e = we_sum / w_sum;
  out.sigma = 1.0 / std::sqrt(w_sum);
  out.significance = out.value_e / out.sigma;
  return out;
}

std::string significance_table_json(std::span<const EntanglementReport> rows) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : rows) {
    arr.push_back({{"bipartition", r.bipartition.label()},
                   {"value_e", r.value_e},
                   {"sigma", r.sigma},
                   {"significance", r.significance}});
  }
  return arr.dump(2);
}

}  // namespace sawcomb

#include "sawcomb/reconstruct.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sawcomb/errors.hpp"
#include "sawcomb/scattering.hpp"

namespace sawcomb {

namespace {

struct Entry {
  int a = 0, b = 0;
  double target = 0.0;
  double sigma = 0.0;
};

class Barrier {
 public:
  Barrier(Eigen::MatrixXd base, std::vector<Entry> free)
      : base_(std::move(base)), free_(std::move(free)), omega_(symplectic_form(static_cast<int>(base_.rows() / 2))) {}

  int n_vars() const { return static_cast<int>(free_.size()) + 1; }
  double nu() const { return 2.0 * static_cast<double>(free_.size()) + static_cast<double>(base_.rows()); }
  const std::vector<Entry>& free() const { return free_; }

  Eigen::MatrixXd matrix(const Eigen::VectorXd& z) const {
    Eigen::MatrixXd v = base_;
    for (std::size_t k = 0; k < free_.size(); ++k) v(free_[k].a, free_[k].b) = v(free_[k].b, free_[k].a) = z(k);
    return v;
  }

  // Returns +inf outside the interior.
  double value(const Eigen::VectorXd& z, double tau) const {
    const double t = z(n_vars() - 1);
    double f = tau * t;
    for (std::size_t k = 0; k < free_.size(); ++k) {
      const double d = z(k) - free_[k].target;
      const double u = t * free_[k].sigma - d, l = t * free_[k].sigma + d;
      if (!(u > 0.0) || !(l > 0.0)) return std::numeric_limits<double>::infinity();
      f -= std::log(u) + std::log(l);
    }
    Eigen::LLT<Eigen::MatrixXcd> llt(hermitian(z));
    if (llt.info() != Eigen::Success) return std::numeric_limits<double>::infinity();
    const Eigen::MatrixXcd& lm = llt.matrixLLT();
    for (Eigen::Index i = 0; i < lm.rows(); ++i) {
      const double d = lm(i, i).real();
      if (!(d > 0.0)) return std::numeric_limits<double>::infinity();
      f -= 2.0 * std::log(d);
    }
    return f;
  }

  void derivatives(const Eigen::VectorXd& z, double tau, Eigen::VectorXd& grad, Eigen::MatrixXd& hess) const {
    const int nv = n_vars();
    const int m = nv - 1;
    const double t = z(m);
    grad = Eigen::VectorXd::Zero(nv);
    hess = Eigen::MatrixXd::Zero(nv, nv);
    grad(m) = tau;
    for (int k = 0; k < m; ++k) {
      const double s = free_[k].sigma;
      const double d = z(k) - free_[k].target;
      const double u = t * s - d, l = t * s + d;
      const double iu = 1.0 / u, il = 1.0 / l;
      grad(k) += iu - il;
      grad(m) -= s * (iu + il);
      hess(k, k) += iu * iu + il * il;
      hess(k, m) += -s * iu * iu + s * il * il;
      hess(m, k) = hess(k, m);
      hess(m, m) += s * s * (iu * iu + il * il);
    }
    const Eigen::MatrixXcd h = hermitian(z);
    const Eigen::MatrixXcd p = h.llt().solve(Eigen::MatrixXcd::Identity(h.rows(), h.cols()));
    for (int k = 0; k < m; ++k) {
      const int a = free_[k].a, b = free_[k].b;
      grad(k) -= a == b ? p(a, a).real() : 2.0 * p(a, b).real();
    }
    for (int k = 0; k < m; ++k) {
      for (int q = k; q < m; ++q) {
        double acc = 0.0;
        for (const auto& [a, b] : pairs(free_[k])) {
          for (const auto& [c, d] : pairs(free_[q])) acc += (p(d, a) * p(b, c)).real();
        }
        hess(k, q) += acc;
        if (q != k) hess(q, k) += acc;
      }
    }
  }

 private:
  static std::vector<std::pair<int, int>> pairs(const Entry& e) {
    if (e.a == e.b) return {{e.a, e.a}};
    return {{e.a, e.b}, {e.b, e.a}};
  }

  Eigen::MatrixXcd hermitian(const Eigen::VectorXd& z) const {
    Eigen::MatrixXcd h = matrix(z).cast<std::complex<double>>();
    h += std::complex<double>(0.0, 1.0) * omega_.cast<std::complex<double>>();
    return h;
  }

  Eigen::MatrixXd base_;
  std::vector<Entry> free_;
  Eigen::MatrixXd omega_;
};

bool strictly_physical(const Eigen::MatrixXd& v) {
  Eigen::LLT<Eigen::MatrixXcd> llt(physicality_matrix(v));
  return llt.info() == Eigen::Success;
}

// Finds a strictly physical starting matrix by inflating the free diagonal.
bool interior_start(Eigen::MatrixXd& v, const std::vector<Entry>& free) {
  const double lam = CovarianceMatrix(v).min_physical_eigenvalue();
  double c = std::max(0.0, -lam) + 1.0;
  const double scale = std::max(1.0, v.cwiseAbs().maxCoeff());
  for (int attempt = 0; attempt < 60 && c < 1e12 * scale; ++attempt, c *= 2.0) {
    Eigen::MatrixXd trial = v;
    for (const auto& e : free)
      if (e.a == e.b) trial(e.a, e.a) += c;
    if (strictly_physical(trial)) {
      v = trial;
      return true;
    }
  }
  return false;
}

}  // namespace

ReconstructResult reconstruct_physical(const CovarianceMatrix& v_meas, const Eigen::MatrixXd& sigma,
                                       const ReconstructOptions& opts) {
  const Eigen::MatrixXd& vm = v_meas.matrix();
  const auto dim = vm.rows();
  if (sigma.rows() != dim || sigma.cols() != dim) throw DimensionMismatch("sigma must match the covariance shape");
  for (Eigen::Index a = 0; a < dim; ++a)
    for (Eigen::Index b = a; b < dim; ++b)
      if (!(sigma(a, b) >= 0.0) || !std::isfinite(sigma(a, b)))
        throw InvalidArgument("sigma entries must be finite and non-negative");

  ReconstructResult res;
  if (v_meas.min_physical_eigenvalue() >= -opts.tol && v_meas.min_eigenvalue() >= -opts.tol) {
    res.v = v_meas;
    return res;
  }

  std::vector<Entry> free, fixed;
  for (Eigen::Index a = 0; a < dim; ++a) {
    for (Eigen::Index b = a; b < dim; ++b) {
      Entry e{static_cast<int>(a), static_cast<int>(b), vm(a, b), sigma(a, b)};
      (e.sigma > 0.0 ? free : fixed).push_back(e);
    }
  }

  Eigen::MatrixXd start = vm;
  if (!interior_start(start, free)) {
    res.warnings.push_back("elements with zero uncertainty admit no physical completion; relaxed to sigma = 1e-12");
    for (auto& e : fixed) {
      e.sigma = 1e-12;
      free.push_back(e);
    }
    fixed.clear();
    std::sort(free.begin(), free.end(), [](const Entry& x, const Entry& y) { return x.a != y.a ? x.a < y.a : x.b < y.b; });
    start = vm;
    if (!interior_start(start, free)) throw NonPhysicalInput("could not find a physical starting point");
  }

  const Barrier barrier(vm, free);
  const int m = static_cast<int>(free.size());
  Eigen::VectorXd z(m + 1);
  double t0 = 0.0;
  for (int k = 0; k < m; ++k) {
    z(k) = start(free[k].a, free[k].b);
    t0 = std::max(t0, std::abs(z(k) - free[k].target) / free[k].sigma);
  }
  z(m) = 1.5 * t0 + 1.0;

  double tau = 1.0;
  const double nu = barrier.nu();
  Eigen::VectorXd grad;
  Eigen::MatrixXd hess;
  bool gap_closed = false;
  for (int outer = 0; outer < 80; ++outer) {
    for (int it = 0; it < opts.max_newton_steps; ++it) {
      barrier.derivatives(z, tau, grad, hess);
      const Eigen::VectorXd dz = -hess.ldlt().solve(grad);
      const double decrement = -grad.dot(dz);
      ++res.newton_steps;
      if (!(decrement > 1e-14)) break;
      const double f0 = barrier.value(z, tau);
      double step = 1.0;
      bool moved = false;
      while (step > 1e-16) {
        const Eigen::VectorXd trial = z + step * dz;
        const double f1 = barrier.value(trial, tau);
        if (f1 <= f0 - 0.25 * step * decrement) {
          z = trial;
          moved = true;
          break;
        }
        step *= 0.5;
      }
      if (!moved || decrement < 1e-12) break;
    }
    if (nu / tau < opts.tol * std::max(1.0, z(m))) {
      gap_closed = true;
      break;
    }
    tau *= 10.0;
  }

  res.v = CovarianceMatrix(barrier.matrix(z));
  double obj = 0.0;
  for (int k = 0; k < m; ++k) obj = std::max(obj, std::abs(z(k) - free[k].target) / free[k].sigma);
  res.objective = obj;
  res.converged = gap_closed;
  if (!gap_closed) res.warnings.push_back("interior-point iteration stopped before the duality gap closed");
  return res;
}

}  // namespace sawcomb

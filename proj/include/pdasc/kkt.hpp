#pragma once

#include <algorithm>
#include <cmath>

#include "pdasc/sensing_operator.hpp"
#include "pdasc/types.hpp"

namespace pdasc {

// Componentwise soft-thresholding, the proximal map of lambda * ||.||_1.
inline double soft_threshold(double v, double lambda) {
  const double m = std::abs(v) - lambda;
  return m > 0.0 ? (v > 0.0 ? m : -m) : 0.0;
}

inline Vector soft_threshold(const Vector& v, double lambda) {
  Vector out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) out[i] = soft_threshold(v[i], lambda);
  return out;
}

// Signed active sets read off a primal-dual pair. Strict inequalities:
// components with |x_i + d_i| exactly equal to lambda count as inactive.
struct ActiveSets {
  IndexList a_plus;    // {i : x_i + d_i >  lambda}
  IndexList a_minus;   // {i : x_i + d_i < -lambda}
  IndexList inactive;  // everything else

  IndexList active_union() const {
    IndexList a;
    a.reserve(a_plus.size() + a_minus.size());
    std::merge(a_plus.begin(), a_plus.end(), a_minus.begin(), a_minus.end(),
               std::back_inserter(a));
    return a;
  }

  bool signed_equal(const ActiveSets& other) const {
    return a_plus == other.a_plus && a_minus == other.a_minus;
  }
};

inline ActiveSets active_sets_from(const Vector& x, const Vector& d, double lambda) {
  ActiveSets s;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double v = x[i] + d[i];
    if (v > lambda)
      s.a_plus.push_back(static_cast<int>(i));
    else if (v < -lambda)
      s.a_minus.push_back(static_cast<int>(i));
    else
      s.inactive.push_back(static_cast<int>(i));
  }
  return s;
}

// One primal-dual iterate. After any active-set step, x vanishes on
// sets.inactive and d equals +lambda on sets.a_plus and -lambda on
// sets.a_minus, bitwise. For a freshly constructed initial guess, `sets`
// describes what the first step will use.
struct PrimalDualState {
  Vector x;
  Vector d;
  double lambda = 0.0;
  ActiveSets sets;
};

struct KktResiduals {
  // || Psi^t Psi x + d - Psi^t y ||_inf: how far d is from the exact dual
  // variable Psi^t (y - Psi x).
  double stationarity = 0.0;
  // || x - S_lambda(x + d) ||_inf: distance from the soft-threshold fixed
  // point. Both vanish exactly at a minimizer and only there.
  double fixed_point = 0.0;

  double max() const { return std::max(stationarity, fixed_point); }
};

// Shared-subexpression form: callers that already hold Psi^t y and
// Psi^t Psi x pay nothing extra.
inline KktResiduals kkt_residual_given(const Vector& psi_t_y, const Vector& gram_x,
                                       const Vector& x, const Vector& d, double lambda) {
  KktResiduals res;
  res.stationarity = (gram_x + d - psi_t_y).lpNorm<Eigen::Infinity>();
  res.fixed_point = (x - soft_threshold(x + d, lambda)).lpNorm<Eigen::Infinity>();
  return res;
}

inline KktResiduals kkt_residual(const SensingOperator& op, const Vector& y, const Vector& x,
                                 const Vector& d, double lambda) {
  return kkt_residual_given(op.apply_adjoint(y), op.apply_adjoint(op.apply(x)), x, d, lambda);
}

// 1/2 ||Psi x - y||^2 + lambda ||x||_1
inline double objective(const SensingOperator& op, const Vector& y, const Vector& x,
                        double lambda) {
  return 0.5 * (op.apply(x) - y).squaredNorm() + lambda * x.lpNorm<1>();
}

}  // namespace pdasc

#pragma once

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

#include "pdasc/types.hpp"

namespace pdasc {

namespace detail {

// One cached FFTW plan pair per transform length. FFTW's planner mutates
// global state, so plan creation is serialized by a registry mutex;
// executions reuse each plan's private buffers and are serialized per
// length, which keeps concurrent solves correct.
class DctPlanCache {
 public:
  static DctPlanCache& instance() {
    static DctPlanCache cache;
    return cache;
  }

  void execute(bool forward, const double* in, double* out, int n) {
    Entry& e = get(n);
    std::lock_guard<std::mutex> lock(e.mu);
    std::copy_n(in, n, e.in);
    fftw_execute(forward ? e.fwd : e.inv);
    std::copy_n(e.out, n, out);
  }

 private:
  struct Entry {
    double* in = nullptr;
    double* out = nullptr;
    fftw_plan fwd = nullptr;
    fftw_plan inv = nullptr;
    std::mutex mu;
    ~Entry() {
      if (fwd) fftw_destroy_plan(fwd);
      if (inv) fftw_destroy_plan(inv);
      if (in) fftw_free(in);
      if (out) fftw_free(out);
    }
  };

  Entry& get(int n) {
    std::lock_guard<std::mutex> lock(registry_mu_);
    auto it = entries_.find(n);
    if (it == entries_.end()) {
      auto e = std::make_unique<Entry>();
      e->in = fftw_alloc_real(static_cast<std::size_t>(n));
      e->out = fftw_alloc_real(static_cast<std::size_t>(n));
      e->fwd = fftw_plan_r2r_1d(n, e->in, e->out, FFTW_REDFT10, FFTW_ESTIMATE);
      e->inv = fftw_plan_r2r_1d(n, e->in, e->out, FFTW_REDFT01, FFTW_ESTIMATE);
      it = entries_.emplace(n, std::move(e)).first;
    }
    return *it->second;
  }

  std::mutex registry_mu_;
  std::map<int, std::unique_ptr<Entry>> entries_;
};

}  // namespace detail

// Orthonormal DCT-II: y_k = c_k * sum_j x_j cos(pi k (j + 1/2) / n) with
// c_0 = sqrt(1/n), c_k = sqrt(2/n). FFTW's REDFT10 computes the same sums
// with a factor of 2, so the output is rescaled here.
inline Vector dct2_orthonormal(const Vector& x) {
  const int n = static_cast<int>(x.size());
  Vector y(n);
  detail::DctPlanCache::instance().execute(true, x.data(), y.data(), n);
  y *= 1.0 / std::sqrt(2.0 * n);
  y[0] *= std::numbers::sqrt2 / 2.0;  // 1/sqrt(2): DC term uses c_0, not c_k
  return y;
}

// Orthonormal DCT-III, the transpose (and inverse) of dct2_orthonormal.
inline Vector dct3_orthonormal(const Vector& v) {
  const int n = static_cast<int>(v.size());
  Vector w = v * (1.0 / std::sqrt(2.0 * n));
  w[0] = v[0] / std::sqrt(static_cast<double>(n));
  Vector y(n);
  detail::DctPlanCache::instance().execute(false, w.data(), y.data(), n);
  return y;
}

}  // namespace pdasc

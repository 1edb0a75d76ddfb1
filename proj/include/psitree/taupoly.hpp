#pragma once

// Polynomials in tau = log Z with coefficients in a generic scalar field.
// These are the mode functions u_k(tau) of a psi-series. Trailing zero
// coefficients are trimmed so degree() is meaningful.

#include <vector>

#include "psitree/field.hpp"

namespace psitree {

template <class F>
class TauPoly {
 public:
  TauPoly() = default;
  explicit TauPoly(std::vector<F> coeffs) : c_(std::move(coeffs)) { trim(); }
  static TauPoly constant(F v) { return TauPoly(std::vector<F>{std::move(v)}); }

  bool is_zero() const { return c_.empty(); }
  // Degree of the zero polynomial is reported as -1.
  long degree() const { return static_cast<long>(c_.size()) - 1; }
  const std::vector<F>& coeffs() const { return c_; }
  F coeff(std::size_t k, const typename FieldTraits<F>::Ctx& ctx) const {
    return k < c_.size() ? c_[k] : FieldTraits<F>::from_rational(ctx, Rational(0));
  }

  friend TauPoly operator+(const TauPoly& a, const TauPoly& b) {
    std::vector<F> c = a.c_.size() >= b.c_.size() ? a.c_ : b.c_;
    const std::vector<F>& small = a.c_.size() >= b.c_.size() ? b.c_ : a.c_;
    for (std::size_t i = 0; i < small.size(); ++i) c[i] = c[i] + small[i];
    return TauPoly(std::move(c));
  }
  friend TauPoly operator-(const TauPoly& a, const TauPoly& b) {
    return a + (-b);
  }
  TauPoly operator-() const {
    std::vector<F> c = c_;
    for (auto& x : c) x = -x;
    TauPoly r;
    r.c_ = std::move(c);
    return r;
  }
  friend TauPoly operator*(const TauPoly& a, const TauPoly& b) {
    if (a.is_zero() || b.is_zero()) return {};
    std::vector<F> c(a.c_.size() + b.c_.size() - 1,
                     a.c_[0] - a.c_[0]);  // zeros of the right field
    for (std::size_t i = 0; i < a.c_.size(); ++i)
      for (std::size_t j = 0; j < b.c_.size(); ++j)
        c[i + j] = c[i + j] + a.c_[i] * b.c_[j];
    return TauPoly(std::move(c));
  }
  TauPoly scaled(const F& f) const {
    std::vector<F> c = c_;
    for (auto& x : c) x = x * f;
    return TauPoly(std::move(c));
  }
  // d/dtau.
  TauPoly derivative() const {
    if (c_.size() <= 1) return {};
    std::vector<F> c(c_.size() - 1, c_[0]);
    for (std::size_t k = 1; k < c_.size(); ++k) {
      F kk = c_[k];
      for (std::size_t i = 1; i < k; ++i) kk = kk + c_[k];  // k * c_[k]
      c[k - 1] = kk;
    }
    return TauPoly(std::move(c));
  }
  F evaluate(const F& tau) const {
    if (c_.empty()) return tau - tau;  // zero of the field
    F acc = c_.back();
    for (std::size_t i = c_.size() - 1; i-- > 0;) acc = acc * tau + c_[i];
    return acc;
  }

 private:
  void trim() {
    while (!c_.empty() && FieldTraits<F>::is_zero(c_.back())) c_.pop_back();
  }
  std::vector<F> c_;
};

}  // namespace psitree

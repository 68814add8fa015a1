#pragma once

/// Discrete probability mass functions over non-negative integer support.
/// The same type carries car counts (index = number of cars) and release
/// amounts (index = grid cell, with the gallons-per-cell step held by
/// AmountDist). Masses are plain doubles; every constructor-level check is
/// a cheap scan, heavy validation lives in check_total().

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "railrisk/error.hpp"

namespace railrisk {

class Pmf {
 public:
  Pmf() = default;

  explicit Pmf(std::vector<double> mass) : mass_(std::move(mass)) {
    for (double m : mass_) {
      if (!(m >= 0.0)) throw ValidationError("pmf mass must be >= 0");
    }
  }

  /// Point mass at k.
  static Pmf point(std::size_t k) {
    std::vector<double> m(k + 1, 0.0);
    m[k] = 1.0;
    return Pmf(std::move(m));
  }

  std::size_t size() const { return mass_.size(); }
  bool empty() const { return mass_.empty(); }

  /// Mass at k; zero outside the stored support.
  double operator()(std::size_t k) const {
    return k < mass_.size() ? mass_[k] : 0.0;
  }

  const std::vector<double>& masses() const { return mass_; }

  double total() const {
    double s = 0.0;
    for (double m : mass_) s += m;
    return s;
  }

  double mean() const {
    double s = 0.0;
    for (std::size_t k = 0; k < mass_.size(); ++k) s += double(k) * mass_[k];
    return s;
  }

  /// P(X > k).
  double survival(std::size_t k) const {
    double s = 0.0;
    for (std::size_t j = k + 1; j < mass_.size(); ++j) s += mass_[j];
    return s;
  }

  template <class F>
  double expect(F f) const {
    double s = 0.0;
    for (std::size_t k = 0; k < mass_.size(); ++k) s += mass_[k] * f(k);
    return s;
  }

  /// Declared-total check: full conditionals declare 1.0, sub-distributions
  /// declare their documented mass.
  void check_total(double expected, double tol = 1e-9) const {
    double t = total();
    if (std::abs(t - expected) > tol) {
      throw ValidationError("pmf total " + std::to_string(t) +
                            " differs from declared " + std::to_string(expected));
    }
  }

  /// Largest index with nonzero mass; 0 for the empty pmf.
  std::size_t max_support() const {
    for (std::size_t k = mass_.size(); k-- > 0;) {
      if (mass_[k] > 0.0) return k;
    }
    return 0;
  }

  void scale(double c) {
    for (double& m : mass_) m *= c;
  }

  void add_scaled(const Pmf& other, double c) {
    if (other.mass_.size() > mass_.size()) mass_.resize(other.mass_.size(), 0.0);
    for (std::size_t k = 0; k < other.mass_.size(); ++k) mass_[k] += c * other.mass_[k];
  }

 private:
  std::vector<double> mass_;
};

/// Distribution of X + Y for independent X, Y.
inline Pmf convolve(const Pmf& a, const Pmf& b) {
  if (a.empty() || b.empty()) return Pmf{};
  std::vector<double> out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a(i) == 0.0) continue;
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a(i) * b(j);
  }
  return Pmf(std::move(out));
}

/// Renormalizes `mass` (support offset by `first`) into a pmf over
/// {first, ..., first+len-1} embedded at those indices. Throws if all mass
/// vanished under truncation.
inline Pmf renormalize(const std::vector<double>& mass, std::size_t first,
                       const std::string& what) {
  double s = 0.0;
  for (double m : mass) s += m;
  if (s <= 0.0) throw ValidationError(what + ": no mass left after truncation");
  std::vector<double> out(first + mass.size(), 0.0);
  for (std::size_t k = 0; k < mass.size(); ++k) out[first + k] = mass[k] / s;
  return Pmf(std::move(out));
}

}  // namespace railrisk

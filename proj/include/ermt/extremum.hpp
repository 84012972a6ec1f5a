#pragma once

#include "ermt/pairing.hpp"
#include "ermt/profile.hpp"

#include <map>
#include <utility>

namespace ermt {

constexpr int kDefaultReduceCap = 5;

// Homogeneous polynomial of degree p in three "squared" variables (x, y, z):
//   Hermitian:     sum_l c(l,0) x^{p-2l} z^{2l}           x = sigma^2,   z = sigma_*^2
//   RealSymmetric: sum c(k,l) x^k y^l z^{p-k-l}           x = sigma~^2,  y = sigma^2
//   Rectangular:   sum c(k,l) x^k y^l z^{p-k-l}           x = sigma_1^2, y = sigma_2^2
struct MomentPolynomial {
  int p = 0;
  Kind taxonomy = Kind::RealSymmetric;
  std::map<std::pair<int, int>, BigInt> coeffs;

  BigInt mass() const;

  template <class T>
  T evaluate(const T& x, const T& y, const T& z) const {
    T total = 0;
    for (const auto& [kl, c] : coeffs) {
      const auto [k, l] = kl;
      T term = T(c);
      if (taxonomy == Kind::Hermitian) {
        term *= ipow(x, p - 2 * k) * ipow(z, 2 * k);
      } else {
        term *= ipow(x, k) * ipow(y, l) * ipow(z, p - k - l);
      }
      total += term;
    }
    return total;
  }

 private:
  template <class T>
  static T ipow(const T& base, int e) {
    T r = 1;
    for (int q = 0; q < e; ++q) r *= base;
    return r;
  }
};

// Number of crossing removals the Hermitian reduction performs on pi.
int genus_exponent(const Pairing& pi);

MomentPolynomial hermitian_polynomial(int p, int cap = kDefaultPairingCap);
MomentPolynomial kappa_table_symmetric(int p, int cap = kDefaultReduceCap);
MomentPolynomial kappa_table_rectangular(int p, int cap = kDefaultReduceCap);
MomentPolynomial moment_polynomial(Kind taxonomy, int p, int cap = kDefaultReduceCap);

// Contribution of a single pairing (the bound on C(pi) or D(pi)).
MomentPolynomial reduce_pairing_symmetric(const Pairing& pi);
MomentPolynomial reduce_pairing_rectangular(const Pairing& pi);

struct ExtremalBound {
  Kind taxonomy = Kind::RealSymmetric;
  int p = 0;
  Rational value;        // polynomial at the profile's parameters
  Rational iid_value;    // polynomial at the integer ceilings, times sigma_*^{2p}
  BigInt d1;             // ceiling of sigma^2/sigma_*^2 (or sigma_1^2/sigma_*^2)
  BigInt d2;             // ceiling of sigma_2^2/sigma_*^2 (rectangular only)
};

// Parameters are taken from the exact squares when present, else from the
// stored doubles (each converted exactly). Throws DegenerateProfile if
// sigma_* = 0.
ExtremalBound extremal_bound(const VarianceProfile& profile, int p, int cap = kDefaultReduceCap);
ExtremalBound extremal_bound(const VarianceProfile& profile, const MomentPolynomial& poly);

}  // namespace ermt

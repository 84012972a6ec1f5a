#pragma once

#include "ermt/pairing.hpp"
#include "ermt/profile.hpp"

#include <functional>
#include <vector>

namespace ermt {

// One pairing's term in the Wick expansion: the n x n matrix it contributes
// (H(pi), E(pi), or the Hermitian analogue), its normalized trace and the
// largest diagonal entry.
struct PairingContribution {
  Pairing pairing;
  std::size_t dim = 0;
  std::vector<Rational> matrix;  // row-major dim x dim
  Rational trace;                // (1/dim) * sum of the diagonal
  Rational max_diag;

  const Rational& at(std::size_t r, std::size_t s) const { return matrix[r * dim + s]; }
};

using ContributionSink = std::function<void(const PairingContribution&)>;

PairingContribution contribution_hermitian(const VarianceProfile& profile, const Pairing& pi);
PairingContribution contribution_symmetric(const VarianceProfile& profile, const Pairing& pi);
PairingContribution contribution_rect_real(const VarianceProfile& profile, const Pairing& pi);
// Only pairings matching odd with even positions contribute; others give 0.
PairingContribution contribution_rect_complex(const VarianceProfile& profile, const Pairing& pi);

// E[tr X^{2p}] (self-adjoint) or E[tr (XX*)^p] (rectangular), tr = Tr/n.
Rational moment_hermitian(const VarianceProfile& profile, int p, int cap = kDefaultPairingCap,
                          const ContributionSink& sink = {});
Rational moment_symmetric(const VarianceProfile& profile, int p, int cap = kDefaultPairingCap,
                          const ContributionSink& sink = {});
Rational moment_rect_real(const VarianceProfile& profile, int p, int cap = kDefaultPairingCap,
                          const ContributionSink& sink = {});
Rational moment_rect_complex(const VarianceProfile& profile, int p, int cap = kDefaultPairingCap);
Rational moment_rect_complex(std::size_t n, std::size_t m, int p, int cap = kDefaultPairingCap);

// Dispatches on profile.kind (rectangular uses the real model).
Rational wick_moment(const VarianceProfile& profile, int p, int cap = kDefaultPairingCap);

}  // namespace ermt

#pragma once

#include "ermt/numeric.hpp"

#include <vector>

namespace ermt {

constexpr int kWishartExactCap = 500;

// Normalized Wishart moments A_p = E Tr (ZZ*)^p / n^{p+1} (complex),
// B_p = E Tr (YY*)^p / n^{p+1} (real), A'_p for the (n-1) x (m-1) complex
// matrix with the same normalization, D_p = B_p - A'_p, chi_p = 4^{-p} C_p.
template <class T>
struct WishartSequences {
  long n = 0;
  long m = 0;
  int pmax = 0;
  T c;
  std::vector<T> A, Aprime, B, D, chi;
};

using WishartTable = WishartSequences<Rational>;
using WishartFloatTable = WishartSequences<HighFloat>;

// Exact tables, indices 0..pmax. B is produced by its own recursion and D by
// its own; both must satisfy B = D + A'. Throws DimensionError if m < n or
// n < 1, CapExceeded if pmax > kWishartExactCap.
WishartTable build_table(long n, long m, int pmax);
// Same recursions in 50-digit floating point, no cap.
WishartFloatTable build_float_table(long n, long m, int pmax);

// True when B_p == D_p + A'_p for every tabulated p.
bool b_equals_d_plus_aprime(const WishartTable& t);

// K_k = (A_{k+1}/A_k)(chi_k/chi_{k+1}) for k = 1..pmax-1 (index 0 unused).
std::vector<Rational> k_ratios(const WishartTable& t);

struct WishartProofParams {
  int p = 0;
  bool small_regime = false;  // p < (c-1) n
  Rational lambda_product;    // (c-1)^2 - p^2/n^2
  Rational mu_product;        // (c-1)^2 - 4p^2/n^2
  HighFloat lambda, lambda_bar, mu, mu_bar;
};
WishartProofParams proof_params(const WishartTable& t, int p);

struct BoundCheckReport {
  // Ratios exact / (bound without universal constant), indexed by p (0 unused).
  // Kept in 50-digit floats: at small n they drop far below the double range.
  std::vector<HighFloat> complex_ratio;
  std::vector<HighFloat> real_ratio;
  std::vector<HighFloat> d_ratio;  // D_p against the matching proposition
  HighFloat max_complex = 0, max_real = 0, max_d = 0;
  HighFloat min_complex = 0, min_real = 0;
  bool d_nonnegative = true;
  bool aprime_le_a = true;
  bool a_le_b = true;
  long k_checks = 0;
  long k_violations = 0;  // either K lemma failing beyond 1e-12 relative slack
  double worst_k_margin = 0;  // max over checks of K_k / bound - 1
};

// Ratios for p = 1..pmax; the K lemmas for p = 1..pmax-1 (K_p needs A_{p+1}).
BoundCheckReport verify_bounds(const WishartTable& t);

// Large-n limit of A_p at ratio c, from the exact table at n = 10^6 * den(c).
HighFloat mp_moment(const Rational& c, int p);
// sum_k N(p,k) c^k with Narayana numbers; the closed form used for checking.
Rational narayana_moment(const Rational& c, int p);

}  // namespace ermt

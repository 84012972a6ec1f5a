#include "ermt/wishart.hpp"

#include <algorithm>
#include <string>

namespace ermt {

namespace {

template <class T>
T frac(long a, long b) {
  return T(a) / T(b);
}

template <class T>
WishartSequences<T> recurse(long n, long m, int pmax) {
  if (n < 1 || m < 1) throw DimensionError("dimensions must be positive");
  if (m < n) throw DimensionError("Wishart tables need n <= m (got n=" + std::to_string(n) +
                                  ", m=" + std::to_string(m) + ")");
  if (pmax < 0) throw DimensionError("pmax must be nonnegative");
  WishartSequences<T> t;
  t.n = n;
  t.m = m;
  t.pmax = pmax;
  const T c = frac<T>(m, n);
  const T N = T(n);
  const T inv_n = frac<T>(1, n);
  t.c = c;
  const int len = pmax + 1;
  t.A.assign(len, T(0));
  t.Aprime.assign(len, T(0));
  t.B.assign(len, T(0));
  t.D.assign(len, T(0));
  t.chi.assign(len, T(0));

  t.chi[0] = 1;
  for (int p = 0; p + 1 < len; ++p) t.chi[p + 1] = t.chi[p] * frac<T>(2 * p + 1, 2 * p + 4);

  // A_p and A'_p.
  const T cm1_sq = (c - 1) * (c - 1);
  t.A[0] = 1;
  t.Aprime[0] = frac<T>(n - 1, n);
  if (len > 1) {
    t.A[1] = c;
    t.Aprime[1] = frac<T>(n - 1, n) * (c - inv_n);
  }
  for (int p = 1; p + 1 < len; ++p) {
    const T ratio = frac<T>(2 * p + 1, 2 * p + 4);
    const T second = (cm1_sq - T(p) * T(p) / (N * N)) * frac<T>(p - 1, p + 2);
    t.A[p + 1] = 2 * (c + 1) * ratio * t.A[p] - second * t.A[p - 1];
    t.Aprime[p + 1] = 2 * (c + 1 - 2 * inv_n) * ratio * t.Aprime[p] - second * t.Aprime[p - 1];
  }

  // B_p, p >= 2 recursion uses A'_{p+1}.
  t.B[0] = 1;
  if (len > 1) t.B[1] = c;
  if (len > 2) t.B[2] = (c + 1 + inv_n) * c;
  for (int p = 2; p + 1 < len; ++p) {
    const T coef = cm1_sq - T(4L * p * (p - 1) + 1) / (N * N);
    t.B[p + 1] = 2 * (c + 1 - inv_n) * t.B[p] - coef * t.B[p - 1] +
                 frac<T>(3, p - 1) * ((c + 1 - T(p + 1) * inv_n) * t.Aprime[p] - t.Aprime[p + 1]);
  }

  // D_p by its own recursion.
  t.D[0] = inv_n;
  if (len > 1) t.D[1] = inv_n * (c + 1 - inv_n);
  for (int p = 1; p + 1 < len; ++p) {
    const T coef = cm1_sq - T(4L * p * (p - 1) + 1) / (N * N);
    t.D[p + 1] = 2 * (c + 1 - inv_n) * t.D[p] - coef * t.D[p - 1] - inv_n * t.Aprime[p] +
                 T((3L * p - 1) * (p - 1)) / (N * N) * t.Aprime[p - 1];
  }
  return t;
}

HighFloat hf(const Rational& q) { return HighFloat(q); }

}  // namespace

WishartTable build_table(long n, long m, int pmax) {
  if (pmax > kWishartExactCap) {
    throw CapExceeded("pmax " + std::to_string(pmax) + " exceeds exact cap " +
                      std::to_string(kWishartExactCap) + "; use the float table");
  }
  return recurse<Rational>(n, m, pmax);
}

WishartFloatTable build_float_table(long n, long m, int pmax) {
  return recurse<HighFloat>(n, m, pmax);
}

bool b_equals_d_plus_aprime(const WishartTable& t) {
  for (int p = 0; p <= t.pmax; ++p) {
    if (t.B[p] != t.D[p] + t.Aprime[p]) return false;
  }
  return true;
}

std::vector<Rational> k_ratios(const WishartTable& t) {
  std::vector<Rational> K(std::max(t.pmax, 1), Rational(0));
  for (int k = 1; k + 1 <= t.pmax; ++k) {
    K[k] = (t.A[k + 1] / t.A[k]) * (t.chi[k] / t.chi[k + 1]);
  }
  return K;
}

WishartProofParams proof_params(const WishartTable& t, int p) {
  WishartProofParams out;
  out.p = p;
  const Rational pn = Rational(p) / Rational(t.n);
  const Rational cm1 = t.c - 1;
  out.small_regime = Rational(p) < cm1 * Rational(t.n);
  out.lambda_product = cm1 * cm1 - pn * pn;
  out.mu_product = cm1 * cm1 - 4 * pn * pn;
  const HighFloat c = hf(t.c);
  const HighFloat root_l = sqrt(hf(4 * t.c + pn * pn));
  const HighFloat root_m = 2 * sqrt(hf(t.c + pn * pn));
  out.lambda = c + 1 + root_l;
  out.lambda_bar = c + 1 - root_l;
  out.mu = c + 1 + root_m;
  out.mu_bar = c + 1 - root_m;
  return out;
}

BoundCheckReport verify_bounds(const WishartTable& t) {
  BoundCheckReport r;
  const int top = t.pmax;
  r.complex_ratio.assign(top + 1, HighFloat(0));
  r.real_ratio.assign(top + 1, HighFloat(0));
  r.d_ratio.assign(top + 1, HighFloat(0));
  for (int p = 0; p <= top; ++p) {
    r.d_nonnegative = r.d_nonnegative && t.D[p] >= 0;
    r.aprime_le_a = r.aprime_le_a && t.Aprime[p] <= t.A[p];
    r.a_le_b = r.a_le_b && t.A[p] <= t.B[p];
  }

  const HighFloat c = hf(t.c);
  const HighFloat n = HighFloat(t.n);
  const HighFloat sc1 = (sqrt(c) + 1) * (sqrt(c) + 1);
  const HighFloat c34 = pow(c, HighFloat(0.75));
  const HighFloat c32 = pow(c, HighFloat(1.5));
  bool first = true;
  for (int p = 1; p <= top; ++p) {
    const HighFloat P(p);
    const HighFloat q = P * P / (c32 * n * n);
    const HighFloat base = pow(sc1, p);
    const HighFloat bc = base * pow(1 + 2 * q, p) * c34 / pow(P, HighFloat(1.5));
    const HighFloat br = base * pow(1 + 8 * q, p) * (c34 / pow(P, HighFloat(1.5)) + 1 / n);
    const HighFloat rc = hf(t.A[p]) / bc;
    const HighFloat rr = hf(t.B[p]) / br;
    const bool d_small = 2 * Rational(p) < (t.c - 1) * Rational(t.n);
    const HighFloat bd = base * pow(1 + (d_small ? 1 : 8) * q, p) / n;
    const HighFloat rd = hf(t.D[p]) / bd;
    r.complex_ratio[p] = rc;
    r.real_ratio[p] = rr;
    r.d_ratio[p] = rd;
    if (first) {
      r.max_complex = r.min_complex = rc;
      r.max_real = r.min_real = rr;
      r.max_d = rd;
      first = false;
    }
    if (rc > r.max_complex) r.max_complex = rc;
    if (rc < r.min_complex) r.min_complex = rc;
    if (rr > r.max_real) r.max_real = rr;
    if (rr < r.min_real) r.min_real = rr;
    if (rd > r.max_d) r.max_d = rd;
  }

  // K lemmas, for each p in the small regime and all 1 <= k <= p.
  const auto K = k_ratios(t);
  std::vector<double> kd(K.size());
  for (std::size_t k = 1; k < K.size(); ++k) kd[k] = to_double(K[k]);
  const double cd = to_double(t.c);
  const double sqc = std::sqrt(cd);
  r.worst_k_margin = -1.0;
  for (int p = 1; p < top; ++p) {
    if (!(Rational(p) < (t.c - 1) * Rational(t.n))) break;
    const double pn = static_cast<double>(p) / static_cast<double>(t.n);
    const double lambda = cd + 1 + std::sqrt(4 * cd + pn * pn);
    for (int k = 1; k <= p; ++k) {
      const double b1 = (1 + 2 * sqc / (static_cast<double>(k) * k)) * lambda;
      const double b2 = (1 + 1.5 / k) * lambda;
      const double bound = std::min(b1, b2);
      r.k_checks += 2;
      if (kd[k] > b1 * (1 + 1e-12)) ++r.k_violations;
      if (kd[k] > b2 * (1 + 1e-12)) ++r.k_violations;
      r.worst_k_margin = std::max(r.worst_k_margin, kd[k] / bound - 1);
    }
  }
  return r;
}

HighFloat mp_moment(const Rational& c, int p) {
  if (c < 1) throw DimensionError("mp_moment needs c >= 1");
  const BigInt den = denominator(c);
  const BigInt n = den * 1000000;
  const BigInt m = numerator(c) * 1000000;
  const auto t = build_table(n.convert_to<long>(), m.convert_to<long>(), p);
  return HighFloat(t.A[p]);
}

Rational narayana_moment(const Rational& c, int p) {
  if (p == 0) return 1;
  auto binom = [](int a, int b) {
    BigInt r = 1;
    for (int q = 1; q <= b; ++q) r = r * (a - b + q) / q;
    return r;
  };
  Rational total = 0;
  Rational ck = 1;
  for (int k = 1; k <= p; ++k) {
    ck *= c;
    total += Rational(binom(p, k) * binom(p, k - 1), BigInt(p)) * ck;
  }
  return total;
}

}  // namespace ermt

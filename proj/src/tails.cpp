#include "ermt/tails.hpp"

#include <cmath>
#include <limits>

namespace ermt {

std::string to_string(Flavor f) {
  switch (f) {
    case Flavor::SmallDev: return "small";
    case Flavor::LargeDev: return "large";
    case Flavor::PropForm: return "prop";
  }
  return "?";
}

Flavor parse_flavor(const std::string& name) {
  if (name == "small") return Flavor::SmallDev;
  if (name == "large") return Flavor::LargeDev;
  if (name == "prop") return Flavor::PropForm;
  throw Error("unknown flavor '" + name + "' (small, large, prop)");
}

namespace {

constexpr double kE = 2.718281828459045;
constexpr double kInf = std::numeric_limits<double>::infinity();

// prob = min(1, exp(log_prob)).
void set_prob(TailBound& b, double log_prob) {
  if (log_prob >= 0) {
    b.prob = 1.0;
    b.capped = true;
  } else {
    b.prob = std::exp(log_prob);
    b.capped = false;
  }
}

void check_window(const TailBound& b) {
  const double x = b.t_or_eps;
  if (!(x >= b.window_lo && x <= b.window_hi)) {
    throw OutOfWindow((b.flavor == Flavor::PropForm ? "eps = " : "t = ") + format_double(x) +
                      " outside the validity window [" + format_double(b.window_lo) + ", " +
                      format_double(b.window_hi) + "]");
  }
}

void require_positive(double star, double lead) {
  if (!(star > 0)) throw DegenerateProfile("sigma_* = 0");
  if (!(lead > 0)) throw DegenerateProfile("leading parameter is 0");
}

}  // namespace

TailBound small_dev_bound(Kind model, const MatrixParams<double>& mp, std::size_t n, double t,
                          const TailConstants& k) {
  TailBound b;
  b.model = model;
  b.flavor = Flavor::SmallDev;
  b.t_or_eps = t;
  const double star = std::sqrt(mp.sigma_star_sq);
  const double N = static_cast<double>(n);
  if (model == Kind::Rectangular) {
    const double s1 = std::sqrt(mp.sigma1_sq), s2 = std::sqrt(mp.sigma2_sq);
    require_positive(star, s1);
    if (s1 > s2) throw TransposeRequired("sigma_1 > sigma_2: evaluate on the adjoint");
    b.window_hi = std::cbrt(s1) * s2 / std::pow(star, 4.0 / 3.0);
    check_window(b);
    b.threshold = s1 + s2 + std::pow(star, 4.0 / 3.0) / std::cbrt(s1) * t;
    set_prob(b, std::log(k.prefactor * N * mp.sigma_star_sq / mp.sigma1_sq) -
                    k.c_exp * std::pow(t, 1.5));
    b.constants = {{"c_exp", k.c_exp}, {"prefactor", k.prefactor}};
    return b;
  }
  const double s = std::sqrt(mp.sigma_sq);
  require_positive(star, s);
  b.window_hi = std::pow(s / star, 4.0 / 3.0);
  check_window(b);
  const double scale = std::pow(star, 4.0 / 3.0) / std::cbrt(s);
  const double ratio = N * mp.sigma_star_sq / mp.sigma_sq;
  if (model == Kind::Hermitian) {
    b.threshold = 2 * s + 4 * scale * t;
    set_prob(b, std::log(kE * ratio) - std::pow(t, 1.5));
    b.constants = {{"c_exp", 1.0}, {"prefactor", kE}, {"scale_multiplier", 4.0}};
  } else {
    b.threshold = 2 * s + scale * t;
    set_prob(b, std::log(k.prefactor * ratio) - k.c_exp * std::pow(t, 1.5));
    b.constants = {{"c_exp", k.c_exp}, {"prefactor", k.prefactor}};
  }
  return b;
}

TailBound large_dev_bound(Kind model, const MatrixParams<double>& mp, std::size_t n,
                          std::size_t m, double t) {
  TailBound b;
  b.model = model;
  b.flavor = Flavor::LargeDev;
  b.t_or_eps = t;
  b.window_hi = kInf;
  check_window(b);
  const double star = std::sqrt(mp.sigma_star_sq);
  const double N = static_cast<double>(n);
  double lead = 0;
  double exponent_div = 2.0;
  if (model == Kind::Rectangular) {
    if (n > m) throw DimensionError("rectangular large deviations need n <= m");
    lead = std::sqrt(mp.sigma1_sq) + std::sqrt(mp.sigma2_sq);
  } else {
    lead = 2 * std::sqrt(mp.sigma_sq);
    if (model == Kind::RealSymmetric) exponent_div = 4.0;
  }
  b.threshold = lead + star * (1 + t);
  set_prob(b, std::log(2 * N) - t * t / exponent_div);
  b.constants = {{"exponent_divisor", exponent_div}};
  return b;
}

TailBound prop_bound(Kind model, const MatrixParams<double>& mp, std::size_t n, double eps,
                     const TailConstants& k) {
  TailBound b;
  b.model = model;
  b.flavor = Flavor::PropForm;
  b.t_or_eps = eps;
  b.window_hi = 1.0;
  check_window(b);
  const double N = static_cast<double>(n);
  const double e15 = std::pow(eps, 1.5);
  const double star2 = mp.sigma_star_sq;
  if (model == Kind::Rectangular) {
    require_positive(star2, mp.sigma1_sq);
    if (mp.sigma1_sq > mp.sigma2_sq) {
      throw TransposeRequired("sigma_1 > sigma_2: evaluate on the adjoint");
    }
    b.threshold = (std::sqrt(mp.sigma1_sq + star2) + std::sqrt(mp.sigma2_sq + star2)) * (1 + eps);
    const double rate = std::pow(mp.sigma1_sq, 0.25) * std::pow(mp.sigma2_sq, 0.75) / star2;
    set_prob(b, std::log(k.prefactor * N * star2 / mp.sigma1_sq) - rate * e15 / 8.0);
    b.constants = {{"prefactor", k.prefactor}, {"exponent_factor", 1.0 / 8.0}};
    return b;
  }
  require_positive(star2, mp.sigma_sq);
  b.threshold = 2 * std::sqrt(mp.sigma_sq + star2) * (1 + eps);
  const double rate = mp.sigma_sq / star2;
  if (model == Kind::Hermitian) {
    set_prob(b, std::log(kE * N * star2 / mp.sigma_sq) - rate * e15);
    b.constants = {{"prefactor", kE}, {"exponent_factor", 1.0}};
  } else {
    set_prob(b, std::log(k.prefactor * N * star2 / mp.sigma_sq) - rate * e15 / 4.0);
    b.constants = {{"prefactor", k.prefactor}, {"exponent_factor", 0.25}};
  }
  return b;
}

TailBound evaluate_tail(const VarianceProfile& profile, Flavor flavor, double t,
                        const TailConstants& constants) {
  const VarianceProfile* prof = &profile;
  VarianceProfile flipped;
  MatrixParams<double> mp = compute_params(profile);
  if (profile.kind == Kind::Rectangular && mp.sigma1_sq > mp.sigma2_sq &&
      flavor != Flavor::LargeDev) {
    flipped = transpose(profile);
    prof = &flipped;
    mp = compute_params(flipped);
  }
  switch (flavor) {
    case Flavor::SmallDev: return small_dev_bound(prof->kind, mp, prof->n, t, constants);
    case Flavor::LargeDev: return large_dev_bound(prof->kind, mp, prof->n, prof->m, t);
    case Flavor::PropForm: return prop_bound(prof->kind, mp, prof->n, t, constants);
  }
  throw Error("unreachable");
}

double mgf_bound(Kind model, double d1, double d2, double t) {
  if (!(t >= 0)) throw OutOfWindow("mgf bound needs t >= 0");
  switch (model) {
    case Kind::Hermitian: return std::exp(2 * std::sqrt(d1) * t + t * t / 2);
    case Kind::RealSymmetric: return std::exp(2 * std::sqrt(d1) * t + t * t);
    case Kind::Rectangular: return std::exp((std::sqrt(d1) + std::sqrt(d2)) * t + t * t / 2);
  }
  return 0;
}

}  // namespace ermt

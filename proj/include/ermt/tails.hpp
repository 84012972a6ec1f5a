#pragma once

#include "ermt/profile.hpp"

#include <map>
#include <string>

namespace ermt {

enum class Flavor { SmallDev, LargeDev, PropForm };
std::string to_string(Flavor f);
Flavor parse_flavor(const std::string& name);

// Values for the unnamed universal constants of the symmetric and
// rectangular bounds. The Hermitian bounds are fully explicit and ignore
// these.
struct TailConstants {
  double c_exp = 1.0 / 64.0;            // exponent constant C in e^{-C t^{3/2}}
  double prefactor = 2.718281828459045 * 40.0;  // stands in for 1/C
};

struct TailBound {
  Kind model = Kind::Hermitian;
  Flavor flavor = Flavor::SmallDev;
  double t_or_eps = 0;
  double threshold = 0;
  double prob = 0;
  bool capped = false;  // raw expression was >= 1
  double window_lo = 0;
  double window_hi = 0;  // +inf when unbounded
  std::map<std::string, double> constants;
};

// n is the row count (the dimension for self-adjoint models); m only matters
// for rectangular models.
TailBound small_dev_bound(Kind model, const MatrixParams<double>& params, std::size_t n, double t,
                          const TailConstants& constants = {});
TailBound large_dev_bound(Kind model, const MatrixParams<double>& params, std::size_t n,
                          std::size_t m, double t);
TailBound prop_bound(Kind model, const MatrixParams<double>& params, std::size_t n, double eps,
                     const TailConstants& constants = {});

// Evaluates on the profile, transposing a rectangular profile first when
// sigma_1 > sigma_2.
TailBound evaluate_tail(const VarianceProfile& profile, Flavor flavor, double t,
                        const TailConstants& constants = {});

// Right-hand sides of the exponential moment estimates for the iid models.
// d2 is used only for the rectangular (Wishart) case.
double mgf_bound(Kind model, double d1, double d2, double t);

}  // namespace ermt

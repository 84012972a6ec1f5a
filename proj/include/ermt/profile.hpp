#pragma once

#include "ermt/numeric.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace ermt {

enum class Kind { Rectangular, Hermitian, RealSymmetric };

std::string to_string(Kind kind);
Kind parse_kind(const std::string& name);

inline bool is_self_adjoint(Kind k) { return k != Kind::Rectangular; }

// Coefficient matrix (b_ij), dense row-major. The exact squares b_ij^2 are
// carried alongside when they are known (generators, JSON string entries);
// the Wick oracle refuses profiles without them.
struct VarianceProfile {
  Kind kind = Kind::Rectangular;
  std::size_t n = 0;
  std::size_t m = 0;
  std::vector<double> b;
  std::optional<std::vector<Rational>> b2_exact;

  double at(std::size_t i, std::size_t j) const { return b[i * m + j]; }
  double sq(std::size_t i, std::size_t j) const {
    const double v = at(i, j);
    return v * v;
  }
  bool has_exact() const { return b2_exact.has_value(); }
  // Throws InvalidProfile when no exact squares are attached.
  const Rational& sq_exact(std::size_t i, std::size_t j) const;
};

// Checks every invariant; throws InvalidProfile.
void validate(const VarianceProfile& profile);

// Build and validate. `b2` (optional) gives exact squares; b is then derived
// from it unless supplied.
VarianceProfile make_profile(Kind kind, std::size_t n, std::size_t m, std::vector<double> b);
VarianceProfile make_exact_profile(Kind kind, std::size_t n, std::size_t m,
                                   std::vector<Rational> b2);

VarianceProfile iid(Kind kind, std::size_t n, std::size_t m);
VarianceProfile band(std::size_t n, std::size_t k, Kind kind = Kind::RealSymmetric);
VarianceProfile block_diagonal(std::size_t n, std::size_t m, std::size_t d1, std::size_t d2,
                               Kind kind = Kind::Rectangular);
VarianceProfile spiked(std::size_t n, double delta, std::size_t m = 0);

VarianceProfile transpose(const VarianceProfile& profile);

template <class T>
struct MatrixParams {
  Kind kind = Kind::Rectangular;
  // rectangular
  T sigma1_sq{};
  T sigma2_sq{};
  // self-adjoint
  T sigma_sq{};
  T sigma_tilde_sq{};
  // both
  T sigma_star_sq{};
};

MatrixParams<double> compute_params(const VarianceProfile& profile);
MatrixParams<Rational> compute_params_exact(const VarianceProfile& profile);

// JSON profile files: {"kind": ..., "n": .., "m": .., "b": [row-major]}.
// Entries given as strings ("1/2", "0.25") are parsed exactly.
VarianceProfile profile_from_json(const std::string& text);
VarianceProfile load_profile(const std::string& path);
std::string profile_to_json(const VarianceProfile& profile);

}  // namespace ermt

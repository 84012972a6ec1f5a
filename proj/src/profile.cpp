#include "ermt/profile.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace ermt {

std::string to_string(Kind kind) {
  switch (kind) {
    case Kind::Rectangular: return "rectangular";
    case Kind::Hermitian: return "hermitian";
    case Kind::RealSymmetric: return "symmetric";
  }
  return "?";
}

Kind parse_kind(const std::string& name) {
  if (name == "rectangular" || name == "rect") return Kind::Rectangular;
  if (name == "hermitian" || name == "herm") return Kind::Hermitian;
  if (name == "symmetric" || name == "sym") return Kind::RealSymmetric;
  throw InvalidProfile("unknown model kind '" + name + "'");
}

const Rational& VarianceProfile::sq_exact(std::size_t i, std::size_t j) const {
  if (!b2_exact) throw InvalidProfile("profile carries no exact coefficients");
  return (*b2_exact)[i * m + j];
}

void validate(const VarianceProfile& p) {
  if (p.n == 0 || p.m == 0) throw InvalidProfile("dimensions must be positive");
  if (p.b.size() != p.n * p.m) {
    throw InvalidProfile("coefficient count " + std::to_string(p.b.size()) + " != n*m = " +
                         std::to_string(p.n * p.m));
  }
  if (p.b2_exact && p.b2_exact->size() != p.b.size()) {
    throw InvalidProfile("exact coefficient count mismatch");
  }
  if (is_self_adjoint(p.kind) && p.n != p.m) {
    throw InvalidProfile(to_string(p.kind) + " profile must be square");
  }
  bool any_positive = false;
  for (std::size_t k = 0; k < p.b.size(); ++k) {
    const double v = p.b[k];
    if (!std::isfinite(v)) throw InvalidProfile("non-finite coefficient at index " + std::to_string(k));
    if (v < 0) throw InvalidProfile("negative coefficient at index " + std::to_string(k));
    if (p.b2_exact && (*p.b2_exact)[k] < 0) {
      throw InvalidProfile("negative exact coefficient at index " + std::to_string(k));
    }
    any_positive = any_positive || v > 0;
  }
  if (!any_positive) throw InvalidProfile("all coefficients are zero");
  if (is_self_adjoint(p.kind)) {
    for (std::size_t i = 0; i < p.n; ++i) {
      for (std::size_t j = i + 1; j < p.n; ++j) {
        if (p.at(i, j) != p.at(j, i) ||
            (p.b2_exact && p.sq_exact(i, j) != p.sq_exact(j, i))) {
          throw InvalidProfile("coefficients not symmetric at (" + std::to_string(i + 1) + "," +
                               std::to_string(j + 1) + ")");
        }
      }
    }
  }
}

VarianceProfile make_profile(Kind kind, std::size_t n, std::size_t m, std::vector<double> b) {
  VarianceProfile p{kind, n, m, std::move(b), std::nullopt};
  validate(p);
  return p;
}

VarianceProfile make_exact_profile(Kind kind, std::size_t n, std::size_t m,
                                   std::vector<Rational> b2) {
  VarianceProfile p{kind, n, m, {}, std::nullopt};
  p.b.reserve(b2.size());
  for (const auto& q : b2) {
    if (q < 0) throw InvalidProfile("negative squared coefficient");
    p.b.push_back(std::sqrt(to_double(q)));
  }
  p.b2_exact = std::move(b2);
  validate(p);
  return p;
}

VarianceProfile iid(Kind kind, std::size_t n, std::size_t m) {
  return make_exact_profile(kind, n, m, std::vector<Rational>(n * m, Rational(1)));
}

VarianceProfile band(std::size_t n, std::size_t k, Kind kind) {
  std::vector<Rational> b2(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t gap = i > j ? i - j : j - i;
      b2[i * n + j] = gap <= k ? 1 : 0;
    }
  }
  return make_exact_profile(kind, n, n, std::move(b2));
}

VarianceProfile block_diagonal(std::size_t n, std::size_t m, std::size_t d1, std::size_t d2,
                               Kind kind) {
  if (d1 == 0 || d2 == 0 || n % d1 != 0) {
    throw DimensionError("block_diagonal: n must be a positive multiple of d1");
  }
  const std::size_t blocks = n / d1;
  if (m / d2 < blocks) throw DimensionError("block_diagonal: need m/d2 >= n/d1");
  if (is_self_adjoint(kind) && (n != m || d1 != d2)) {
    throw DimensionError("block_diagonal: self-adjoint blocks must be square");
  }
  std::vector<Rational> b2(n * m);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t block = i / d1;
    for (std::size_t j = block * d2; j < (block + 1) * d2; ++j) b2[i * m + j] = 1;
  }
  return make_exact_profile(kind, n, m, std::move(b2));
}

VarianceProfile spiked(std::size_t n, double delta, std::size_t m) {
  if (m == 0) m = n;
  if (n == 0) throw DimensionError("spiked: n must be positive");
  if (!std::isfinite(delta)) throw InvalidProfile("spiked: delta must be finite");
  const Rational d(delta);
  const Rational base = Rational(1) / Rational(static_cast<long>(n));
  std::vector<Rational> b2(n * m, base);
  for (std::size_t j = 0; j < m; ++j) b2[j] = base * (1 + d * d);
  return make_exact_profile(Kind::Rectangular, n, m, std::move(b2));
}

VarianceProfile transpose(const VarianceProfile& p) {
  VarianceProfile t{p.kind, p.m, p.n, std::vector<double>(p.b.size()), std::nullopt};
  std::vector<Rational> e;
  if (p.b2_exact) e.resize(p.b.size());
  for (std::size_t i = 0; i < p.n; ++i) {
    for (std::size_t j = 0; j < p.m; ++j) {
      t.b[j * p.n + i] = p.at(i, j);
      if (p.b2_exact) e[j * p.n + i] = p.sq_exact(i, j);
    }
  }
  if (p.b2_exact) t.b2_exact = std::move(e);
  return t;
}

namespace {

class ExactAcc {
 public:
  void add(const Rational& x) { sum_ += x; }
  Rational value() const { return sum_; }

 private:
  Rational sum_ = 0;
};

template <class T, class Acc, class Sq>
MatrixParams<T> params_impl(const VarianceProfile& p, Sq sq) {
  MatrixParams<T> out;
  out.kind = p.kind;
  T star{};
  for (std::size_t i = 0; i < p.n; ++i) {
    for (std::size_t j = 0; j < p.m; ++j) star = std::max<T>(star, sq(i, j));
  }
  out.sigma_star_sq = star;

  T row_max{};
  T row_tilde_max{};
  for (std::size_t i = 0; i < p.n; ++i) {
    Acc acc;
    for (std::size_t j = 0; j < p.m; ++j) acc.add(sq(i, j));
    const T row = acc.value();
    row_max = std::max<T>(row_max, row);
    if (is_self_adjoint(p.kind)) {
      acc.add(sq(i, i));
      row_tilde_max = std::max<T>(row_tilde_max, acc.value());
    }
  }
  if (is_self_adjoint(p.kind)) {
    out.sigma_sq = row_max;
    out.sigma_tilde_sq = row_tilde_max;
    return out;
  }
  T col_max{};
  for (std::size_t j = 0; j < p.m; ++j) {
    Acc acc;
    for (std::size_t i = 0; i < p.n; ++i) acc.add(sq(i, j));
    col_max = std::max<T>(col_max, acc.value());
  }
  out.sigma1_sq = col_max;
  out.sigma2_sq = row_max;
  return out;
}

}  // namespace

MatrixParams<double> compute_params(const VarianceProfile& profile) {
  validate(profile);
  return params_impl<double, CompensatedSum>(
      profile, [&](std::size_t i, std::size_t j) { return profile.sq(i, j); });
}

MatrixParams<Rational> compute_params_exact(const VarianceProfile& profile) {
  validate(profile);
  return params_impl<Rational, ExactAcc>(
      profile, [&](std::size_t i, std::size_t j) { return profile.sq_exact(i, j); });
}

VarianceProfile profile_from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidProfile(std::string("malformed profile JSON: ") + e.what());
  }
  if (!doc.is_object()) throw InvalidProfile("profile JSON must be an object");
  for (const char* key : {"kind", "n"}) {
    if (!doc.contains(key)) throw InvalidProfile(std::string("profile JSON missing '") + key + "'");
  }
  if (!doc.contains("b") && !doc.contains("b2")) throw InvalidProfile("profile JSON needs 'b' or 'b2'");
  if (!doc["kind"].is_string()) throw InvalidProfile("'kind' must be a string");
  const Kind kind = parse_kind(doc["kind"].get<std::string>());
  auto read_dim = [&](const char* key) -> std::size_t {
    const auto& v = doc[key];
    if (!v.is_number_integer() || v.get<long long>() <= 0) {
      throw InvalidProfile(std::string("'") + key + "' must be a positive integer");
    }
    return static_cast<std::size_t>(v.get<long long>());
  };
  const std::size_t n = read_dim("n");
  const std::size_t m = doc.contains("m") ? read_dim("m") : n;

  // "b2": exact squares as numeric strings; takes precedence over "b".
  if (doc.contains("b2")) {
    const auto& sq = doc["b2"];
    if (!sq.is_array() || sq.size() != n * m) {
      throw InvalidProfile("'b2' must be an array of " + std::to_string(n * m) + " entries");
    }
    std::vector<Rational> b2;
    b2.reserve(sq.size());
    for (const auto& v : sq) {
      if (!v.is_string()) throw InvalidProfile("'b2' entries must be numeric strings");
      b2.push_back(parse_rational(v.get<std::string>()));
      if (b2.back() < 0) throw InvalidProfile("negative square '" + v.get<std::string>() + "'");
    }
    return make_exact_profile(kind, n, m, std::move(b2));
  }

  const auto& arr = doc["b"];
  if (!arr.is_array()) throw InvalidProfile("'b' must be an array");
  if (arr.size() != n * m) {
    throw InvalidProfile("'b' has " + std::to_string(arr.size()) + " entries, expected " +
                         std::to_string(n * m));
  }

  std::vector<double> b;
  std::vector<Rational> b2;
  bool exact = true;
  b.reserve(arr.size());
  for (const auto& v : arr) {
    if (v.is_string()) {
      const Rational q = parse_rational(v.get<std::string>());
      if (q < 0) throw InvalidProfile("negative coefficient '" + v.get<std::string>() + "'");
      b.push_back(to_double(q));
      b2.push_back(q * q);
    } else if (v.is_number()) {
      const double x = v.get<double>();
      b.push_back(x);
      exact = false;
    } else {
      throw InvalidProfile("coefficients must be numbers or numeric strings");
    }
  }
  VarianceProfile p{kind, n, m, std::move(b), std::nullopt};
  if (exact) p.b2_exact = std::move(b2);
  validate(p);
  return p;
}

VarianceProfile load_profile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidProfile("cannot open profile '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return profile_from_json(ss.str());
}

std::string profile_to_json(const VarianceProfile& p) {
  nlohmann::json doc;
  doc["kind"] = to_string(p.kind);
  doc["n"] = p.n;
  doc["m"] = p.m;
  doc["b"] = p.b;
  if (p.has_exact()) {
    std::vector<std::string> sq;
    for (const auto& q : *p.b2_exact) sq.push_back(to_fraction_string(q));
    doc["b2"] = sq;
  }
  return doc.dump();
}

}  // namespace ermt

#include "ermt/extremum.hpp"
#include "ermt/wick.hpp"

#include <catch_amalgamated.hpp>

#include <random>

using namespace ermt;

namespace {

// Genus of the gluing, from the cycle count of gamma * pi with gamma the long
// cycle (1 2 ... 2p): #cycles = p + 1 - 2g.
int surface_genus(const Pairing& pi) {
  const int n = pi.size();
  std::vector<bool> seen(n + 1, false);
  int cycles = 0;
  for (int s = 1; s <= n; ++s) {
    if (seen[s]) continue;
    ++cycles;
    for (int q = s; !seen[q]; q = pi.partner(q) % n + 1) seen[q] = true;
  }
  return (pi.p() + 1 - cycles) / 2;
}

Rational pw(const Rational& x, int e) {
  Rational r = 1;
  for (int q = 0; q < e; ++q) r *= x;
  return r;
}

VarianceProfile random_profile(Kind kind, std::size_t n, std::size_t m, std::mt19937_64& rng) {
  std::vector<Rational> b2(n * m);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      if (is_self_adjoint(kind) && j < i) {
        b2[i * m + j] = b2[j * m + i];
        continue;
      }
      b2[i * m + j] = Rational(static_cast<long>(rng() % 7), 6);
    }
  b2[0] = 1;
  return make_exact_profile(kind, n, m, std::move(b2));
}

}  // namespace

TEST_CASE("genus exponent", "[extremum]") {
  CHECK(genus_exponent(Pairing::from_blocks({{1, 2}, {3, 4}})) == 0);
  CHECK(genus_exponent(Pairing::from_blocks({{1, 3}, {2, 4}})) == 1);
  for (int p = 1; p <= 6; ++p) {
    for_each_pairing(p, [&](const Pairing& pi) {
      if (is_noncrossing(pi)) CHECK(genus_exponent(pi) == 0);
      CHECK(genus_exponent(pi) == surface_genus(pi));
    });
  }
}

TEST_CASE("hermitian polynomial", "[extremum]") {
  for (int p = 1; p <= 6; ++p) {
    auto poly = hermitian_polynomial(p);
    CHECK(poly.mass() == double_factorial_odd(p));
    CHECK(poly.coeffs.at({0, 0}) == catalan_number(p));
  }
  for (int p = 1; p <= 5; ++p) {
    auto poly = hermitian_polynomial(p);
    for (long d = 1; d <= 3; ++d)
      CHECK(poly.evaluate(Rational(d), Rational(0), Rational(1)) ==
            moment_hermitian(iid(Kind::Hermitian, d, d), p));
  }
}

TEST_CASE("symmetric table", "[extremum]") {
  auto k1 = kappa_table_symmetric(1);
  CHECK(k1.coeffs == std::map<std::pair<int, int>, BigInt>{{{1, 0}, 1}});

  auto single = reduce_pairing_symmetric(Pairing::from_blocks({{1, 3}, {2, 4}}));
  CHECK(single.coeffs == std::map<std::pair<int, int>, BigInt>{{{0, 0}, 3}, {{0, 1}, 1}});

  for (int p = 1; p <= 4; ++p) {
    auto poly = kappa_table_symmetric(p);
    CHECK(poly.mass() >= double_factorial_odd(p));
    for (const auto& [kl, c] : poly.coeffs) {
      CHECK(kl.first + kl.second <= p);
      CHECK(c > 0);
    }
    for (long d = 1; d <= 3; ++d)
      CHECK(poly.evaluate(Rational(d + 1), Rational(d), Rational(1)) ==
            moment_symmetric(iid(Kind::RealSymmetric, d, d), p));
  }
  CHECK_THROWS_AS(kappa_table_symmetric(6), CapExceeded);
  CHECK(kappa_table_symmetric(3).coeffs == kappa_table_symmetric(3).coeffs);
}

TEST_CASE("rectangular table", "[extremum]") {
  auto k1 = kappa_table_rectangular(1);
  CHECK(k1.coeffs == std::map<std::pair<int, int>, BigInt>{{{0, 1}, 1}});
  // {1,3},{2,4} is type 3; d = 4 is an adjoint letter, so sigma_2^2 sigma_*^2.
  auto single = reduce_pairing_rectangular(Pairing::from_blocks({{1, 3}, {2, 4}}));
  CHECK(single.coeffs == std::map<std::pair<int, int>, BigInt>{{{0, 1}, 1}});
  for (int p = 1; p <= 4; ++p) {
    auto poly = kappa_table_rectangular(p);
    for (const auto& [kl, c] : poly.coeffs) CHECK(kl.first + kl.second <= p);
    for (long d1 = 1; d1 <= 3; ++d1)
      for (long d2 = 1; d2 <= 3; ++d2)
        CHECK(poly.evaluate(Rational(d1), Rational(d2), Rational(1)) ==
              moment_rect_real(iid(Kind::Rectangular, d1, d2), p));
  }
}

TEST_CASE("per-pairing domination", "[extremum][property]") {
  // For each pairing, the reduced polynomial bounds C(pi) (resp. D(pi)).
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 5; ++trial) {
    auto s = random_profile(Kind::RealSymmetric, 3, 3, rng);
    auto mp = compute_params_exact(s);
    moment_symmetric(s, 3, kDefaultPairingCap, [&](const PairingContribution& c) {
      auto poly = reduce_pairing_symmetric(c.pairing);
      CHECK(c.max_diag <= poly.evaluate(mp.sigma_tilde_sq, mp.sigma_sq, mp.sigma_star_sq));
    });
    auto r = random_profile(Kind::Rectangular, 2, 3, rng);
    auto mr = compute_params_exact(r);
    moment_rect_real(r, 3, kDefaultPairingCap, [&](const PairingContribution& c) {
      auto poly = reduce_pairing_rectangular(c.pairing);
      CHECK(c.max_diag <= poly.evaluate(mr.sigma1_sq, mr.sigma2_sq, mr.sigma_star_sq));
    });
  }
}

TEST_CASE("extremal bound", "[extremum]") {
  for (long d = 1; d <= 3; ++d) {
    auto goe = iid(Kind::RealSymmetric, d, d);
    auto b = extremal_bound(goe, 3);
    CHECK(b.value == moment_symmetric(goe, 3));
    CHECK(b.iid_value == b.value);
    CHECK(b.d1 == d);
  }
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    auto r = random_profile(Kind::Rectangular, 1 + rng() % 3, 1 + rng() % 3, rng);
    auto mp = compute_params_exact(r);
    auto b = extremal_bound(r, 1);
    CHECK(b.value == mp.sigma2_sq);
    CHECK(moment_rect_real(r, 1) <= b.value);
    CHECK(b.value <= b.iid_value);
  }
  // sigma_* scaling: multiplying b^2 by 4 scales the bound by 4^p.
  auto base = random_profile(Kind::RealSymmetric, 3, 3, rng);
  std::vector<Rational> scaled = *base.b2_exact;
  for (auto& q : scaled) q *= 4;
  auto big = make_exact_profile(Kind::RealSymmetric, 3, 3, scaled);
  CHECK(extremal_bound(big, 3).value == 64 * extremal_bound(base, 3).value);
  CHECK(extremal_bound(big, 3).iid_value == 64 * extremal_bound(base, 3).iid_value);

  auto h = iid(Kind::Hermitian, 2, 2);
  CHECK(extremal_bound(h, 4).value == moment_hermitian(h, 4));
}

TEST_CASE("inequality sweep", "[extremum][property]") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 1 + rng() % 3, m = 1 + rng() % 3;
    const int p = 1 + static_cast<int>(rng() % 3);
    for (Kind kind : {Kind::Hermitian, Kind::RealSymmetric, Kind::Rectangular}) {
      auto prof = random_profile(kind, n, is_self_adjoint(kind) ? n : m, rng);
      auto b = extremal_bound(prof, p);
      const Rational exact = wick_moment(prof, p);
      CHECK(exact <= b.value);
      CHECK(b.value <= b.iid_value);
    }
  }
}

#include "ermt/profile.hpp"

#include <catch_amalgamated.hpp>

#include <algorithm>
#include <numeric>
#include <random>

using namespace ermt;

TEST_CASE("params of iid profiles", "[profile]") {
  auto r = compute_params(iid(Kind::Rectangular, 3, 5));
  CHECK(r.sigma1_sq == 3.0);
  CHECK(r.sigma2_sq == 5.0);
  CHECK(r.sigma_star_sq == 1.0);

  auto s = compute_params_exact(iid(Kind::RealSymmetric, 4, 4));
  CHECK(s.sigma_sq == 4);
  CHECK(s.sigma_tilde_sq == 5);
  CHECK(s.sigma_star_sq == 1);
}

TEST_CASE("band profile", "[profile]") {
  for (std::size_t k : {0u, 1u, 2u, 3u}) {
    auto p = band(12, k, Kind::Rectangular);
    auto mp = compute_params_exact(p);
    CHECK(mp.sigma1_sq == 2 * k + 1);
    CHECK(mp.sigma2_sq == 2 * k + 1);
    CHECK(mp.sigma_star_sq == 1);
  }
  auto id = band(5, 0);
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 5; ++j) CHECK(id.at(i, j) == (i == j ? 1.0 : 0.0));
}

TEST_CASE("block diagonal", "[profile]") {
  auto p = block_diagonal(4, 4, 2, 2);
  const double expect[16] = {1, 1, 0, 0, 1, 1, 0, 0, 0, 0, 1, 1, 0, 0, 1, 1};
  for (int k = 0; k < 16; ++k) CHECK(p.b[k] == expect[k]);
  auto q = block_diagonal(4, 9, 2, 3);
  auto mq = compute_params_exact(q);
  CHECK(mq.sigma1_sq == 2);
  CHECK(mq.sigma2_sq == 3);
  CHECK_THROWS_AS(block_diagonal(5, 6, 2, 3), DimensionError);
  CHECK_THROWS_AS(block_diagonal(4, 5, 2, 3), DimensionError);
}

TEST_CASE("spiked covariance", "[profile]") {
  auto p = spiked(4, 1.0);
  for (std::size_t j = 0; j < 4; ++j) CHECK(p.sq_exact(0, j) == Rational(2, 4));
  for (std::size_t i = 1; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) CHECK(p.sq_exact(i, j) == Rational(1, 4));
  auto mp = compute_params_exact(p);
  CHECK(mp.sigma2_sq == 2);
  CHECK(mp.sigma1_sq == Rational(5, 4));
}

TEST_CASE("validation", "[profile]") {
  CHECK_THROWS_AS(make_profile(Kind::RealSymmetric, 2, 2, {1, 2, 1, 1}), InvalidProfile);
  CHECK_THROWS_AS(make_profile(Kind::Rectangular, 1, 2, {1, -1}), InvalidProfile);
  CHECK_THROWS_AS(make_profile(Kind::Rectangular, 1, 2, {0, 0}), InvalidProfile);
  CHECK_THROWS_AS(make_profile(Kind::Rectangular, 1, 2, {0, std::nan("")}), InvalidProfile);
  CHECK_THROWS_AS(make_profile(Kind::Hermitian, 1, 2, {1, 1}), InvalidProfile);
  CHECK_THROWS_AS(make_profile(Kind::Rectangular, 2, 2, {1, 1, 1}), InvalidProfile);
}

TEST_CASE("json round trip and exact strings", "[profile]") {
  auto p = profile_from_json(R"({"kind":"symmetric","n":2,"m":2,"b":["1/2","0.5","0.5","3"]})");
  REQUIRE(p.has_exact());
  CHECK(p.sq_exact(0, 0) == Rational(1, 4));
  CHECK(p.sq_exact(1, 1) == 9);
  auto mp = compute_params_exact(p);
  CHECK(mp.sigma_sq == Rational(37, 4));
  CHECK(mp.sigma_tilde_sq == Rational(73, 4));

  auto f = profile_from_json(R"({"kind":"rectangular","n":1,"m":2,"b":[0.5,1]})");
  CHECK_FALSE(f.has_exact());
  auto g = profile_from_json(profile_to_json(f));
  CHECK(g.b == f.b);

  // Exact squares survive a round trip even when b itself is irrational.
  auto e = make_exact_profile(Kind::Rectangular, 1, 2, {Rational(1, 3), Rational(2)});
  auto e2 = profile_from_json(profile_to_json(e));
  REQUIRE(e2.has_exact());
  CHECK(*e2.b2_exact == *e.b2_exact);
  auto s = profile_from_json(R"({"kind":"sym","n":1,"b2":["2/3"]})");
  CHECK(s.sq_exact(0, 0) == Rational(2, 3));
  CHECK_THROWS_AS(profile_from_json(R"({"kind":"sym","n":1,"b2":[0.5]})"), InvalidProfile);
  CHECK_THROWS_AS(profile_from_json(R"({"kind":"sym","n":1,"b2":["1","2"]})"), InvalidProfile);
  CHECK_THROWS_AS(profile_from_json(R"({"kind":"sym","n":1})"), InvalidProfile);

  CHECK_THROWS_AS(profile_from_json(R"({"kind":"rectangular","n":1,"m":2,"b":[1,-1]})"),
                  InvalidProfile);
  CHECK_THROWS_AS(profile_from_json(R"({"kind":"rect","n":1,"m":2,"b":[1]})"), InvalidProfile);
  CHECK_THROWS_AS(profile_from_json(R"({"kind":"blob","n":1,"b":[1]})"), InvalidProfile);
  CHECK_THROWS_AS(profile_from_json("{not json"), InvalidProfile);
}

TEST_CASE("parameter invariants on random profiles", "[profile][property]") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + rng() % 6, m = 1 + rng() % 6;
    std::vector<double> b(n * m);
    for (auto& x : b) x = u(rng);
    auto p = make_profile(Kind::Rectangular, n, m, b);
    auto mp = compute_params(p);
    CHECK(mp.sigma_star_sq <= mp.sigma1_sq);
    CHECK(mp.sigma_star_sq <= mp.sigma2_sq);

    // Permuting rows and columns.
    std::vector<std::size_t> rp(n), cp(m);
    std::iota(rp.begin(), rp.end(), 0);
    std::iota(cp.begin(), cp.end(), 0);
    std::shuffle(rp.begin(), rp.end(), rng);
    std::shuffle(cp.begin(), cp.end(), rng);
    std::vector<double> bp(n * m);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < m; ++j) bp[i * m + j] = b[rp[i] * m + cp[j]];
    auto mq = compute_params(make_profile(Kind::Rectangular, n, m, bp));
    CHECK(mq.sigma1_sq == mp.sigma1_sq);
    CHECK(mq.sigma2_sq == mp.sigma2_sq);
    CHECK(mq.sigma_star_sq == mp.sigma_star_sq);

    // Scaling by 2 is exact in binary.
    for (auto& x : b) x *= 2;
    auto ms = compute_params(make_profile(Kind::Rectangular, n, m, b));
    CHECK(ms.sigma1_sq == 4 * mp.sigma1_sq);
    CHECK(ms.sigma2_sq == 4 * mp.sigma2_sq);

    auto mt = compute_params(transpose(p));
    CHECK(mt.sigma1_sq == mp.sigma2_sq);
    CHECK(mt.sigma2_sq == mp.sigma1_sq);
  }
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + rng() % 6;
    std::vector<double> b(n * n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) b[i * n + j] = b[j * n + i] = u(rng);
    auto mp = compute_params(make_profile(Kind::RealSymmetric, n, n, b));
    CHECK(mp.sigma_sq <= mp.sigma_tilde_sq);
    CHECK(mp.sigma_tilde_sq <= mp.sigma_sq + mp.sigma_star_sq);
    CHECK(mp.sigma_star_sq <= mp.sigma_tilde_sq);
  }
}

TEST_CASE("compensated sums agree with exact sums", "[profile]") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> num(0, 1000);
  const std::size_t n = 40;
  std::vector<Rational> b2(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) b2[i * n + j] = b2[j * n + i] = Rational(num(rng), 1024) * Rational(num(rng), 1024);
  auto p = make_exact_profile(Kind::RealSymmetric, n, n, b2);
  // Exact squares of doubles are not what sq() returns, so compare against the
  // squares of the stored doubles.
  std::vector<Rational> from_doubles(n * n);
  for (std::size_t k = 0; k < n * n; ++k) from_doubles[k] = Rational(p.b[k]) * Rational(p.b[k]);
  VarianceProfile q = p;
  q.b2_exact = from_doubles;
  auto approx = compute_params(q);
  auto exact = compute_params_exact(q);
  CHECK(approx.sigma_sq == Catch::Approx(to_double(exact.sigma_sq)).epsilon(4e-16 * n));
  CHECK(approx.sigma_tilde_sq == Catch::Approx(to_double(exact.sigma_tilde_sq)).epsilon(4e-16 * n));
}

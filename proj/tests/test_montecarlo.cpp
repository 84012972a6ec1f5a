#include "ermt/montecarlo.hpp"
#include "ermt/tails.hpp"
#include "ermt/wick.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>

using namespace ermt;

namespace {

SimulationConfig config_for(VarianceProfile p, std::size_t samples, std::uint64_t seed) {
  SimulationConfig c;
  c.profile = std::move(p);
  c.samples = samples;
  c.master_seed = seed;
  c.threads = 1;
  return c;
}

}  // namespace

TEST_CASE("counter generator matches SplitMix64", "[rng]") {
  // Reference outputs of SplitMix64 seeded with 0.
  CounterRng r(0);
  CHECK(r.next() == 0xE220A8397B1DCDAFULL);
  CHECK(r.next() == 0x6E789E6AA1B965F4ULL);
  CHECK(r.next() == 0x06C45D188009454FULL);
  CHECK(sample_key(1, 2) != sample_key(2, 1));
  CHECK(sample_key(7, 0) == mix64(mix64(7) ^ mix64(0xD1B54A32D192ED03ULL)));

  CounterRng u(sample_key(3, 4));
  double lo = 1, hi = 0;
  for (int i = 0; i < 100000; ++i) {
    const double x = u.uniform();
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  CHECK(lo > 0);
  CHECK(hi < 1);
}

TEST_CASE("spectral norm on fixed matrices", "[norm]") {
  CounterRng rng(11);
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(2, 2);
  d(0, 0) = 3;
  d(1, 1) = 1;
  CHECK(spectral_norm(d, 1e-10, 10000, rng) == Catch::Approx(3).epsilon(1e-9));
  d(0, 0) = -3;
  CHECK(spectral_norm(d, 1e-10, 10000, rng) == Catch::Approx(3).epsilon(1e-9));

  Eigen::MatrixXd e = Eigen::MatrixXd::Zero(3, 4);
  e(0, 1) = 1;
  CHECK(spectral_norm(e, 1e-10, 10000, rng) == Catch::Approx(1).epsilon(1e-12));
  CHECK(spectral_norm(Eigen::MatrixXd(Eigen::MatrixXd::Zero(5, 5)), 1e-10, 10000, rng) == 0.0);

  Eigen::MatrixXcd h(2, 2);
  h << std::complex<double>(0, 0), std::complex<double>(0, 2), std::complex<double>(0, -2),
      std::complex<double>(0, 0);
  CHECK(spectral_norm(h, 1e-10, 10000, rng) == Catch::Approx(2).epsilon(1e-9));

  Eigen::MatrixXd close = Eigen::MatrixXd::Zero(50, 50);
  for (int i = 0; i < 50; ++i) close(i, i) = 1.0 - 0.001 * i;
  CHECK(spectral_norm(close, 1e-12, 10000, rng) == Catch::Approx(1).epsilon(1e-5));
  CHECK_THROWS_AS(spectral_norm(close, 1e-15, 3, rng), NoConvergence);
}

TEST_CASE("spectral norm agrees with an SVD", "[norm]") {
  for (Kind k : {Kind::Rectangular, Kind::RealSymmetric, Kind::Hermitian}) {
    auto c = config_for(iid(k, 12, k == Kind::Rectangular ? 17 : 12), 1, 5);
    for (std::uint64_t i = 0; i < 20; ++i) {
      CounterRng rest(0);
      const Realization r = sample_matrix(c, i, &rest);
      double expect = 0, got = 0;
      if (r.is_complex()) {
        expect = Eigen::JacobiSVD<Eigen::MatrixXcd>(r.complex).singularValues()(0);
        got = spectral_norm(r.complex, 1e-12, 10000, rest);
      } else {
        expect = Eigen::JacobiSVD<Eigen::MatrixXd>(r.real).singularValues()(0);
        got = spectral_norm(r.real, 1e-12, 10000, rest);
      }
      CHECK(got == Catch::Approx(expect).epsilon(1e-8));
      CHECK(got >= r.max_abs_entry() * (1 - 1e-10));
    }
  }
}

TEST_CASE("sample structure", "[sample]") {
  // Validation rejects an all-zero profile, but sampling it is well defined.
  VarianceProfile zp;
  zp.kind = Kind::Rectangular;
  zp.n = 3;
  zp.m = 4;
  zp.b.assign(12, 0.0);
  auto zero = config_for(zp, 1, 1);
  CounterRng rest(0);
  const Realization z = sample_matrix(zero, 0, &rest);
  CHECK(z.real.isZero(0));
  CHECK(spectral_norm(z.real, 1e-10, 10000, rest) == 0.0);

  auto herm = config_for(iid(Kind::Hermitian, 6, 6), 1, 2);
  const Realization h = sample_matrix(herm, 9);
  CHECK(h.complex == h.complex.adjoint());
  CHECK(h.complex.diagonal().imag().isZero(0));

  auto sym = config_for(iid(Kind::RealSymmetric, 5, 5), 1, 2);
  const Realization s = sample_matrix(sym, 4);
  CHECK(s.real == s.real.transpose());

  // Same (seed, index) gives the same matrix; a different index does not.
  CHECK(sample_matrix(sym, 4).real == s.real);
  CHECK(sample_matrix(sym, 5).real != s.real);

  sym.entry_dist = EntryDist::Rademacher;
  const Realization rd = sample_matrix(sym, 0);
  for (Eigen::Index i = 0; i < 5; ++i) {
    CHECK(std::abs(rd.real(i, i)) == Catch::Approx(std::sqrt(2.0)));
    for (Eigen::Index j = i + 1; j < 5; ++j) CHECK(std::abs(rd.real(i, j)) == 1.0);
  }
}

TEST_CASE("diagonal variance of the symmetric model", "[sample]") {
  auto c = config_for(iid(Kind::RealSymmetric, 2, 2), 100000, 77);
  std::vector<double> diag, off;
  for (std::uint64_t i = 0; i < c.samples; ++i) {
    const Realization r = sample_matrix(c, i);
    diag.push_back(r.real(0, 0) * r.real(0, 0));
    off.push_back(r.real(0, 1) * r.real(0, 1));
  }
  auto stats = [](const std::vector<double>& v) {
    double s = 0, q = 0;
    for (double x : v) s += x;
    const double m = s / v.size();
    for (double x : v) q += (x - m) * (x - m);
    return std::pair<double, double>{m, std::sqrt(q / (v.size() - 1) / v.size())};
  };
  auto [dm, dse] = stats(diag);
  auto [om, ose] = stats(off);
  CHECK(std::abs(dm - 2.0) <= 3 * dse);
  CHECK(std::abs(om - 1.0) <= 3 * ose);

  auto h = config_for(iid(Kind::Hermitian, 2, 2), 100000, 78);
  std::vector<double> re2, mod2;
  for (std::uint64_t i = 0; i < h.samples; ++i) {
    const Realization r = sample_matrix(h, i);
    re2.push_back(std::norm(r.complex(0, 1).real()));
    mod2.push_back(std::norm(r.complex(0, 1)));
  }
  auto [rm, rse] = stats(re2);
  auto [mm, mse] = stats(mod2);
  CHECK(std::abs(rm - 0.5) <= 3 * rse);
  CHECK(std::abs(mm - 1.0) <= 3 * mse);
}

TEST_CASE("result does not depend on the worker count", "[estimate]") {
  auto c = config_for(iid(Kind::Hermitian, 8, 8), 300, 1234);
  Targets t{{1, 2}, {0.5}};
  const auto a = estimate(c, t);
  c.threads = 3;
  const auto b = estimate(c, t);
  c.threads = 7;
  const auto d = estimate(c, t);
  CHECK(a.norms == b.norms);
  CHECK(a.norms == d.norms);
  CHECK(a.empirical_moment(2).mean == b.empirical_moment(2).mean);
  CHECK(a.mgf(0.5).mean == d.mgf(0.5).mean);
  CHECK(a.no_convergence.empty());
  CHECK(a.sanity_violations == 0);
}

TEST_CASE("empirical moments match the Wick oracle", "[estimate]") {
  auto c = config_for(iid(Kind::RealSymmetric, 3, 3), 1000000, 2024);
  c.threads = 0;
  const auto r = estimate(c, Targets{{1, 2}, {}});
  const double m1 = to_double(moment_symmetric(c.profile, 1));
  const double m2 = to_double(moment_symmetric(c.profile, 2));
  CHECK(std::abs(r.empirical_moment(1).mean - m1) <= 5 * r.empirical_moment(1).std_error);
  CHECK(std::abs(r.empirical_moment(2).mean - m2) <= 5 * r.empirical_moment(2).std_error);

  auto rc = config_for(make_exact_profile(Kind::Rectangular, 2, 3,
                                          {Rational(1), Rational(1, 2), Rational(2), Rational(0),
                                           Rational(3), Rational(1, 4)}),
                       200000, 99);
  rc.threads = 0;
  const auto rr = estimate(rc, Targets{{2, 3}, {}});
  for (int p : {2, 3}) {
    const double exact = to_double(moment_rect_real(rc.profile, p));
    CHECK(std::abs(rr.empirical_moment(p).mean - exact) <= 5 * rr.empirical_moment(p).std_error);
  }
}

TEST_CASE("Rademacher moments do not exceed Gaussian moments", "[estimate]") {
  auto g = config_for(iid(Kind::RealSymmetric, 4, 4), 100000, 5);
  g.threads = 0;
  auto rd = g;
  rd.entry_dist = EntryDist::Rademacher;
  const auto eg = estimate(g, Targets{{2}, {}}).empirical_moment(2);
  const auto er = estimate(rd, Targets{{2}, {}}).empirical_moment(2);
  CHECK(er.mean <= eg.mean + 3 * std::hypot(eg.std_error, er.std_error));
}

TEST_CASE("tail and quantile bookkeeping", "[estimate]") {
  auto c = config_for(iid(Kind::Rectangular, 10, 15), 500, 8);
  const auto r = estimate(c);
  REQUIRE(r.norms.size() == 500);
  CHECK(std::is_sorted(r.norms.begin(), r.norms.end()));
  CHECK(r.tail(0).freq == 1.0);
  CHECK(r.tail(r.norms.back()).exceed == 0);
  double last = 1;
  for (double x = 0; x < 10; x += 0.25) {
    const auto t = r.tail(x);
    CHECK(t.freq <= last);
    last = t.freq;
  }
  CHECK(r.quantile(0) == r.norms.front());
  CHECK(r.quantile(1) == r.norms.back());
  CHECK(wilson_half_width(0, 100) > 0);
  CHECK(wilson_half_width(50, 100) == Catch::Approx(1.0 / (1 + 0.01) * std::sqrt(0.0025 + 0.000025)));
  // Edge location of the iid model.
  const double edge = std::sqrt(10.0) + std::sqrt(15.0);
  CHECK(r.norm_mean().mean == Catch::Approx(edge).epsilon(0.1));
}

TEST_CASE("exponential moments stay below the bounds", "[estimate][mgf]") {
  for (Kind k : {Kind::Hermitian, Kind::RealSymmetric}) {
    auto c = config_for(iid(k, 3, 3), 20000, 31);
    const auto r = estimate(c, Targets{{}, {0.0, 0.5, 1.0}});
    CHECK(r.mgf(0.0).mean == Catch::Approx(1.0));
    for (double t : {0.5, 1.0}) {
      const auto e = r.mgf(t);
      CHECK(e.mean <= mgf_bound(k, 3, 0, t) * (1 + 5 * e.std_error / e.mean));
    }
  }
}

TEST_CASE("configuration validation", "[estimate]") {
  auto c = config_for(iid(Kind::Hermitian, 2, 2), 0, 1);
  CHECK_THROWS_AS(estimate(c), InvalidProfile);
  c.samples = 1;
  c.norm_tol = 0;
  CHECK_THROWS_AS(estimate(c), InvalidProfile);
  CHECK(parse_entry_dist("rademacher") == EntryDist::Rademacher);
  CHECK_THROWS_AS(parse_entry_dist("cauchy"), InvalidProfile);
}

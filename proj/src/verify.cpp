#include "ermt/verify.hpp"

#include "ermt/extremum.hpp"
#include "ermt/montecarlo.hpp"
#include "ermt/numeric.hpp"
#include "ermt/pairing.hpp"
#include "ermt/profile.hpp"
#include "ermt/tails.hpp"
#include "ermt/wick.hpp"
#include "ermt/wishart.hpp"

#include <boost/math/constants/constants.hpp>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <sstream>
#include <stdexcept>

namespace ermt::verify {

namespace {

constexpr double kEnvelope = 40.0;
constexpr int kGridPmax = 200;
constexpr int kGridNmax = 50;
constexpr std::size_t kMaxListedFailures = 50;

std::string str(const Rational& q) { return to_decimal_string(q, 20) + " (" + to_fraction_string(q) + ")"; }
std::string str(double x) { return format_double(x); }
std::string str(bool b) { return b ? "true" : "false"; }
std::string str(const HighFloat& x) { return x.str(17, std::ios_base::scientific); }
template <class I>
std::string num(I v) {
  return std::to_string(v);
}

std::string at(std::initializer_list<std::pair<const char*, std::string>> kv) {
  std::string s = " at";
  for (const auto& [k, v] : kv) s += std::string(" ") + k + "=" + v;
  return s;
}

Rational ipow(const Rational& x, int e) {
  Rational r = 1;
  for (int i = 0; i < e; ++i) r *= x;
  return r;
}

// E Tr (XX*)^p / n for the iid n x m Wishart, read from a table built with
// n <= m (transposing when needed).
Rational wishart_trace(long n, long m, int p, bool real) {
  if (n <= m) {
    const auto t = build_table(n, m, p);
    return ipow(Rational(n), p) * (real ? t.B[p] : t.A[p]);
  }
  const auto t = build_table(m, n, p);
  return ipow(Rational(m), p + 1) * (real ? t.B[p] : t.A[p]) / Rational(n);
}

struct GridPoint {
  long n, m;
  Rational c;
  BoundCheckReport report;
};

const std::vector<Rational>& grid_ratios() {
  static const std::vector<Rational> cs = {Rational(1), Rational(3, 2), Rational(2), Rational(4),
                                           Rational(10)};
  return cs;
}

const std::vector<GridPoint>& wishart_grid() {
  static std::once_flag once;
  static std::vector<GridPoint> grid;
  std::call_once(once, [] {
    for (const Rational& c : grid_ratios()) {
      for (long n = 1; n <= kGridNmax; ++n) {
        const Rational mq = c * n;
        if (denominator(mq) != 1) continue;
        const long m = numerator(mq).convert_to<long>();
        grid.push_back({n, m, c, verify_bounds(build_table(n, m, kGridPmax))});
      }
    }
  });
  return grid;
}

// Rational b^2 entries k/6 with k in 0..6, rescaled so that sigma_* = 1.
VarianceProfile random_rational_profile(Kind kind, std::size_t n, std::size_t m, CounterRng& rng) {
  std::vector<Rational> b2(n * m);
  Rational top = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (is_self_adjoint(kind) && j < i) {
        b2[i * m + j] = b2[j * m + i];
        continue;
      }
      b2[i * m + j] = Rational(static_cast<long>(rng.next() % 7), 6);
      if (b2[i * m + j] > top) top = b2[i * m + j];
    }
  }
  if (top == 0) {
    b2[0] = 1;
    top = 1;
  }
  for (auto& v : b2) v /= top;
  return make_exact_profile(kind, n, m, std::move(b2));
}

Result genus_identity() {
  Result r;
  r.header = {"d", "p", "pairing_sum", "moment_hermitian", "equal"};
  for (int d = 1; d <= 3; ++d) {
    const auto prof = iid(Kind::Hermitian, d, d);
    for (int p = 1; p <= 5; ++p) {
      Rational sum = 0;
      for_each_pairing(p, [&](const Pairing& pi) {
        const int e = p - 2 * genus_exponent(pi);
        sum += e >= 0 ? ipow(Rational(d), e) : Rational(1) / ipow(Rational(d), -e);
      });
      const Rational exact = moment_hermitian(prof, p);
      const bool ok = sum == exact;
      r.rows.push_back({num(d), num(p), str(sum), str(exact), str(ok)});
      if (!ok) r.fail("genus sum != Wick moment" + at({{"d", num(d)}, {"p", num(p)}}));
    }
  }
  return r;
}

Result symmetric_equality() {
  Result r;
  r.header = {"d", "p", "table_at_iid", "moment_symmetric", "equal"};
  for (int p = 1; p <= 4; ++p) {
    const auto poly = kappa_table_symmetric(p);
    for (int d = 1; d <= 3; ++d) {
      const Rational v = poly.evaluate(Rational(d + 1), Rational(d), Rational(1));
      const Rational exact = moment_symmetric(iid(Kind::RealSymmetric, d, d), p);
      const bool ok = v == exact;
      r.rows.push_back({num(d), num(p), str(v), str(exact), str(ok)});
      if (!ok) r.fail("symmetric table != Wick moment" + at({{"d", num(d)}, {"p", num(p)}}));
    }
  }
  return r;
}

Result rectangular_equality() {
  Result r;
  r.header = {"d1", "d2", "p", "table_at_iid", "moment_rect_real", "wishart", "equal"};
  for (int p = 1; p <= 4; ++p) {
    const auto poly = kappa_table_rectangular(p);
    for (int d1 = 1; d1 <= 3; ++d1) {
      for (int d2 = 1; d2 <= 3; ++d2) {
        const Rational v = poly.evaluate(Rational(d1), Rational(d2), Rational(1));
        const Rational exact = moment_rect_real(iid(Kind::Rectangular, d1, d2), p);
        const Rational w = wishart_trace(d1, d2, p, true);
        const bool ok = v == exact && exact == w;
        r.rows.push_back({num(d1), num(d2), num(p), str(v), str(exact), str(w), str(ok)});
        if (!ok) {
          r.fail("rectangular table, Wick and Wishart disagree" +
                 at({{"d1", num(d1)}, {"d2", num(d2)}, {"p", num(p)}}));
        }
      }
    }
  }
  return r;
}

Result inequality_sweep(const Options& o) {
  Result r;
  r.header = {"taxonomy", "trial", "n", "m", "p", "wick", "extremal_bound", "bound_at_ceilings", "ok"};
  std::map<std::pair<Kind, int>, MomentPolynomial> polys;
  for (Kind k : {Kind::Hermitian, Kind::RealSymmetric, Kind::Rectangular})
    for (int p = 1; p <= 4; ++p) polys.emplace(std::pair{k, p}, moment_polynomial(k, p));
  for (Kind k : {Kind::Hermitian, Kind::RealSymmetric, Kind::Rectangular}) {
    CounterRng rng(sample_key(o.seed, 400 + static_cast<int>(k)));
    for (int trial = 0; trial < 100; ++trial) {
      const std::size_t n = 1 + rng.next() % 4;
      const std::size_t m = is_self_adjoint(k) ? n : 1 + rng.next() % 4;
      const auto prof = random_rational_profile(k, n, m, rng);
      for (int p = 1; p <= 4; ++p) {
        const Rational exact = wick_moment(prof, p);
        const auto b = extremal_bound(prof, polys.at({k, p}));
        const bool ok = exact <= b.value && b.value <= b.iid_value;
        r.rows.push_back({to_string(k), num(trial), num(n), num(m), num(p), str(exact), str(b.value),
                          str(b.iid_value), str(ok)});
        if (!ok) {
          r.fail("Wick moment exceeds extremal bound" +
                 at({{"taxonomy", to_string(k)}, {"trial", num(trial)}, {"p", num(p)}}));
        }
      }
    }
  }
  r.tolerances["allowed_violations"] = 0;
  return r;
}

Result wishart_vs_wick() {
  Result r;
  r.header = {"kind", "n", "m", "c", "p", "wishart", "wick", "d_nonnegative", "aprime_le_a", "ok"};
  for (long n = 1; n <= 3; ++n) {
    for (long m = 1; m <= 3; ++m) {
      for (int p = 1; p <= 4; ++p) {
        const Rational a = wishart_trace(n, m, p, false);
        const Rational wa = moment_rect_complex(n, m, p);
        const Rational b = wishart_trace(n, m, p, true);
        const Rational wb = moment_rect_real(iid(Kind::Rectangular, n, m), p);
        const std::string c = to_fraction_string(Rational(m, n));
        r.rows.push_back({"complex", num(n), num(m), c, num(p), str(a), str(wa), "", "", str(a == wa)});
        r.rows.push_back({"real", num(n), num(m), c, num(p), str(b), str(wb), "", "", str(b == wb)});
        const auto pt = at({{"n", num(n)}, {"m", num(m)}, {"p", num(p)}});
        if (a != wa) r.fail("n^p A_p != complex Wick moment" + pt);
        if (b != wb) r.fail("n^p B_p != real Wick moment" + pt);
      }
    }
  }
  for (const auto& g : wishart_grid()) {
    const bool ok = g.report.d_nonnegative && g.report.aprime_le_a;
    r.rows.push_back({"grid", num(g.n), num(g.m), to_fraction_string(g.c), num(kGridPmax), "", "",
                      str(g.report.d_nonnegative), str(g.report.aprime_le_a), str(ok)});
    const auto pt = at({{"n", num(g.n)}, {"m", num(g.m)}});
    if (!g.report.d_nonnegative) r.fail("D_p < 0" + pt);
    if (!g.report.aprime_le_a) r.fail("A'_p > A_p" + pt);
  }
  return r;
}

Result wishart_envelope() {
  Result r;
  r.header = {"n", "m", "c", "min_complex", "max_complex", "min_real", "max_real", "ok"};
  r.tolerances["envelope"] = kEnvelope;
  r.tolerances["tightness_floor"] = 1.0 / kEnvelope;
  for (const auto& g : wishart_grid()) {
    const auto& rep = g.report;
    const bool ok = rep.min_complex > 0 && rep.max_complex <= kEnvelope && rep.min_real > 0 &&
                    rep.max_real <= kEnvelope;
    r.rows.push_back({num(g.n), num(g.m), to_fraction_string(g.c), str(rep.min_complex),
                      str(rep.max_complex), str(rep.min_real), str(rep.max_real), str(ok)});
    if (!ok) r.fail("ratio outside (0, 40]" + at({{"n", num(g.n)}, {"m", num(g.m)}}));
  }
  // Tightness at c = 1, n = 50.
  for (const auto& g : wishart_grid()) {
    if (g.n != 50 || g.m != 50) continue;
    HighFloat worst_c = g.report.complex_ratio[20], worst_r = g.report.real_ratio[20];
    for (int p = 20; p <= kGridPmax; ++p) {
      if (g.report.complex_ratio[p] < worst_c) worst_c = g.report.complex_ratio[p];
      if (g.report.real_ratio[p] < worst_r) worst_r = g.report.real_ratio[p];
    }
    r.rows.push_back({"tightness n=50 c=1 p=20..200", "50", "1", str(worst_c), "", str(worst_r), "",
                      str(worst_c >= 1 / kEnvelope && worst_r >= 1 / kEnvelope)});
    auto summarize = [&](const char* which, const std::vector<HighFloat>& ratio) {
      int bad = 0, first = 0, worst = 20;
      for (int p = 20; p <= kGridPmax; ++p) {
        if (ratio[p] < ratio[worst]) worst = p;
        if (ratio[p] < 1 / kEnvelope) {
          if (!bad) first = p;
          ++bad;
        }
      }
      if (bad) {
        r.fail(std::string(which) + " ratio below 1/40 at n=50 c=1 for " + num(bad) + " of " +
               num(kGridPmax - 19) + " p in [20, 200]; first p=" + num(first) + " (ratio " +
               str(ratio[first]) + "), smallest " + str(ratio[worst]) + " at p=" + num(worst));
      }
    };
    summarize("complex", g.report.complex_ratio);
    summarize("real", g.report.real_ratio);
  }
  return r;
}

Result k_lemmas() {
  Result r;
  r.header = {"n", "m", "c", "k_checks", "k_violations", "worst_margin", "ok"};
  r.tolerances["relative_slack"] = 1e-12;
  for (const auto& g : wishart_grid()) {
    const bool ok = g.report.k_violations == 0;
    r.rows.push_back({num(g.n), num(g.m), to_fraction_string(g.c), num(g.report.k_checks),
                      num(g.report.k_violations), str(g.report.worst_k_margin), str(ok)});
    if (!ok) {
      r.fail(num(g.report.k_violations) + " K-lemma violations" +
             at({{"n", num(g.n)}, {"m", num(g.m)}}));
    }
  }
  return r;
}

Result tail_soundness(const Options& o) {
  Result r;
  r.header = {"model", "flavor", "t", "threshold", "exceed", "samples", "freq", "wilson_half_width",
              "bound_prob", "capped", "ok"};
  r.tolerances["wilson_z"] = 1;
  r.tolerances["half_widths"] = 3;
  struct Case {
    Kind kind;
    Flavor flavor;
    std::vector<double> ts;
  };
  const std::vector<Case> cases = {{Kind::Rectangular, Flavor::SmallDev, {1, 2, 3}},
                                   {Kind::RealSymmetric, Flavor::LargeDev, {2, 4}}};
  for (const auto& cs : cases) {
    SimulationConfig cfg;
    cfg.profile = iid(cs.kind, 200, 200);
    cfg.samples = 2000;
    cfg.master_seed = mix64(o.seed ^ (800 + static_cast<int>(cs.kind)));
    cfg.threads = o.threads;
    const auto res = estimate(cfg);
    if (!res.no_convergence.empty()) {
      r.fail(num(res.no_convergence.size()) + " NoConvergence samples" +
             at({{"model", to_string(cs.kind)}}));
    }
    if (res.sanity_violations) {
      r.fail(num(res.sanity_violations) + " samples with norm below the largest entry" +
             at({{"model", to_string(cs.kind)}}));
    }
    for (double t : cs.ts) {
      const auto b = evaluate_tail(cfg.profile, cs.flavor, t);
      const auto e = res.tail(b.threshold);
      const bool ok = e.freq <= b.prob + 3 * e.half_width;
      r.rows.push_back({to_string(cs.kind), to_string(cs.flavor), str(t), str(b.threshold),
                        num(e.exceed), num(e.total), str(e.freq), str(e.half_width), str(b.prob),
                        str(b.capped), str(ok)});
      if (!ok) {
        r.fail("empirical tail above bound" +
               at({{"model", to_string(cs.kind)}, {"t", str(t)}}));
      }
    }
  }
  return r;
}

Result mgf_check(const Options& o) {
  Result r;
  r.header = {"model", "d1", "d2", "t", "mean", "std_error", "bound", "ok"};
  r.tolerances["relative_se"] = 5;
  struct Case {
    Kind kind;
    std::size_t d1, d2;
  };
  const std::vector<Case> cases = {{Kind::Hermitian, 2, 2},     {Kind::Hermitian, 5, 5},
                                   {Kind::RealSymmetric, 2, 2}, {Kind::RealSymmetric, 5, 5},
                                   {Kind::Rectangular, 2, 4}};
  for (const auto& cs : cases) {
    SimulationConfig cfg;
    cfg.profile = iid(cs.kind, cs.d1, cs.d2);
    cfg.samples = 100000;
    cfg.master_seed = mix64(o.seed ^ (900 + 10 * static_cast<int>(cs.kind) + cs.d1));
    cfg.threads = o.threads;
    const auto res = estimate(cfg, Targets{{}, {0.5, 1.0}});
    if (!res.no_convergence.empty()) r.fail("NoConvergence samples" + at({{"model", to_string(cs.kind)}}));
    for (double t : {0.5, 1.0}) {
      const auto e = res.mgf(t);
      const double bound = mgf_bound(cs.kind, static_cast<double>(cs.d1),
                                     static_cast<double>(cs.d2), t);
      const bool ok = e.mean <= bound * (1 + 5 * e.std_error / e.mean);
      const std::string d2 = cs.kind == Kind::Rectangular ? num(cs.d2) : "";
      r.rows.push_back({to_string(cs.kind), num(cs.d1), d2, str(t), str(e.mean), str(e.std_error),
                        str(bound), str(ok)});
      if (!ok) {
        r.fail("empirical exponential moment above bound" +
               at({{"model", to_string(cs.kind)}, {"d", num(cs.d1)}, {"t", str(t)}}));
      }
    }
  }
  return r;
}

Result combinatorial_counts() {
  Result r;
  r.header = {"quantity", "p", "value", "expected", "ok"};
  for (int p = 1; p <= 8; ++p) {
    long all = 0, nc = 0;
    for_each_pairing(p, [&](const Pairing& pi) {
      ++all;
      if (is_noncrossing(pi)) ++nc;
    });
    const bool ok_all = BigInt(all) == double_factorial_odd(p);
    const bool ok_nc = BigInt(nc) == catalan_number(p);
    r.rows.push_back({"pairings", num(p), num(all), double_factorial_odd(p).str(), str(ok_all)});
    r.rows.push_back({"noncrossing", num(p), num(nc), catalan_number(p).str(), str(ok_nc)});
    if (!ok_all) r.fail("pairing count != (2p-1)!!" + at({{"p", num(p)}}));
    if (!ok_nc) r.fail("noncrossing count != Catalan" + at({{"p", num(p)}}));
  }
  // chi_p p^{3/2} sqrt(pi) over [1000, 10000]: a 50-digit recurrence seeded
  // from the exact value, re-anchored against exact values on the way.
  const HighFloat sqrt_pi = boost::multiprecision::sqrt(boost::math::constants::pi<HighFloat>());
  HighFloat chi = to_high(catalan_chi(1000));
  double lo = INFINITY, hi = -INFINITY;
  for (int p = 1000; p <= 10000; ++p) {
    if (p % 2500 == 0) {
      const HighFloat exact = to_high(catalan_chi(p));
      if (abs(chi - exact) > exact * HighFloat("1e-40")) r.fail("chi recurrence drift" + at({{"p", num(p)}}));
      chi = exact;
    }
    const double v = (chi * boost::multiprecision::pow(HighFloat(p), HighFloat(1.5)) * sqrt_pi)
                         .convert_to<double>();
    lo = std::min(lo, v);
    hi = std::max(hi, v);
    const bool ok = v > 0.9 && v < 1.1;
    if (p % 500 == 0) r.rows.push_back({"chi_scaled", num(p), str(v), "(0.9, 1.1)", str(ok)});
    if (!ok) r.fail("chi_p p^{3/2} sqrt(pi) outside (0.9, 1.1)" + at({{"p", num(p)}}));
    chi *= HighFloat(2 * p + 1) / HighFloat(2 * (p + 2));
  }
  r.rows.push_back({"chi_scaled_min", "1000..10000", str(lo), "(0.9, 1.1)", str(lo > 0.9)});
  r.rows.push_back({"chi_scaled_max", "1000..10000", str(hi), "(0.9, 1.1)", str(hi < 1.1)});
  return r;
}

const char* title_of(int id) {
  switch (id) {
    case 1: return "genus expansion identity";
    case 2: return "symmetric extremum equality";
    case 3: return "rectangular extremum equality and Wishart agreement";
    case 4: return "extremum inequality sweep";
    case 5: return "Wishart recursions vs Wick oracle";
    case 6: return "Wishart moment-bound envelope";
    case 7: return "K-ratio lemmas";
    case 8: return "Monte Carlo tail soundness";
    case 9: return "exponential moment bounds";
    case 10: return "combinatorial counts";
  }
  return "";
}

}  // namespace

void Result::fail(std::string what) {
  pass = false;
  if (failures.size() < kMaxListedFailures) {
    failures.push_back(std::move(what));
  } else if (failures.size() == kMaxListedFailures) {
    failures.push_back("(further failures omitted)");
  }
}

std::vector<int> suite(const std::string& name) {
  if (name == "exact") return {1, 2, 3, 4, 5, 7, 10};
  if (name == "bounds") return {6};
  if (name == "mc") return {8, 9};
  if (name == "all") return {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  std::vector<int> ids;
  std::stringstream ss(name);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    int id = 0;
    try {
      id = std::stoi(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size() || id < 1 || id > 10) throw std::invalid_argument("unknown suite '" + name + "'");
    ids.push_back(id);
  }
  if (ids.empty()) throw std::invalid_argument("unknown suite '" + name + "'");
  return ids;
}

Result run(int id, const Options& options) {
  Result r;
  switch (id) {
    case 1: r = genus_identity(); break;
    case 2: r = symmetric_equality(); break;
    case 3: r = rectangular_equality(); break;
    case 4: r = inequality_sweep(options); break;
    case 5: r = wishart_vs_wick(); break;
    case 6: r = wishart_envelope(); break;
    case 7: r = k_lemmas(); break;
    case 8: r = tail_soundness(options); break;
    case 9: r = mgf_check(options); break;
    case 10: r = combinatorial_counts(); break;
    default: throw std::invalid_argument("no criterion " + std::to_string(id));
  }
  r.id = id;
  r.title = title_of(id);
  return r;
}

std::string to_csv(const Result& result) {
  std::string out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      const bool quote = cells[i].find_first_of(",\" ") != std::string::npos;
      if (!quote) {
        out += cells[i];
        continue;
      }
      out += '"';
      for (char ch : cells[i]) {
        if (ch == '"') out += '"';
        out += ch;
      }
      out += '"';
    }
    out += '\n';
  };
  line(result.header);
  for (const auto& row : result.rows) line(row);
  return out;
}

}  // namespace ermt::verify

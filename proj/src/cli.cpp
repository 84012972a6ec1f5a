#include "ermt/cli.hpp"

#include "ermt/extremum.hpp"
#include "ermt/montecarlo.hpp"
#include "ermt/numeric.hpp"
#include "ermt/profile.hpp"
#include "ermt/tails.hpp"
#include "ermt/verify.hpp"
#include "ermt/wick.hpp"
#include "ermt/wishart.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace ermt::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

std::string to_csv(const Table& t) {
  std::string out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += csv_cell(cells[i]);
    }
    out += '\n';
  };
  line(t.header);
  for (const auto& r : t.rows) line(r);
  return out;
}

void write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << content;
  if (!out) throw Error("failed writing '" + path.string() + "'");
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

struct Manifest {
  std::string subcommand;
  json config = json::object();
  std::optional<std::uint64_t> seed;
  std::map<std::string, double> constants;
  std::vector<std::string> outputs;  // names relative to the manifest
  json extra = json::object();
  std::optional<double> wall_time;

  std::string dump() const {
    json j;
    j["subcommand"] = subcommand;
    j["config"] = config;
    j["config_hash"] = hex64(fnv1a64(config.dump()));
    j["seed"] = seed ? json(*seed) : json(nullptr);
    j["library_version"] = ERMT_VERSION;
    j["constants"] = constants;
    j["outputs"] = outputs;
    for (const auto& [k, v] : extra.items()) j[k] = v;
    if (wall_time) j["wall_time_seconds"] = *wall_time;
    return j.dump(2) + "\n";
  }
};

struct Common {
  std::string out;
  bool wall_time = false;
};

// Writes the table to `out` (plus `out`.manifest.json), or to stdout.
void emit(const Table& t, const Common& common, Manifest m,
          std::chrono::steady_clock::time_point start) {
  const std::string csv = to_csv(t);
  if (common.out.empty()) {
    std::cout << csv;
    return;
  }
  const fs::path p(common.out);
  write_file(p, csv);
  m.outputs.insert(m.outputs.begin(), p.filename().string());
  if (common.wall_time) {
    m.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
  write_file(fs::path(common.out + ".manifest.json"), m.dump());
}

std::string dec(const Rational& q) { return to_decimal_string(q, 20); }
std::string frac(const Rational& q) { return to_fraction_string(q); }
std::string fmt(double x) { return format_double(x); }

std::vector<std::string> rational_cells(const Rational& q) { return {dec(q), frac(q)}; }

void append(std::vector<std::string>& row, const std::vector<std::string>& more) {
  row.insert(row.end(), more.begin(), more.end());
}

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  for (double v : parse_grid(s)) {
    if (v != std::floor(v)) throw CLI::ValidationError("expected integers, got '" + s + "'");
    out.push_back(static_cast<int>(v));
  }
  return out;
}

// --- subcommands ---------------------------------------------------------

struct ParamsOpts {
  Common common;
  std::string profile;
};

int do_params(const ParamsOpts& o) {
  const auto start = std::chrono::steady_clock::now();
  const VarianceProfile prof = load_profile(o.profile);
  Table t{{"parameter", "value", "fraction"}, {}};
  auto add = [&](const std::string& name, double v, const std::optional<Rational>& q) {
    t.rows.push_back({name, q ? dec(*q) : fmt(v), q ? frac(*q) : ""});
  };
  const auto mp = compute_params(prof);
  std::optional<MatrixParams<Rational>> ex;
  if (prof.has_exact()) ex = compute_params_exact(prof);
  auto pick = [&](auto field) -> std::optional<Rational> {
    if (!ex) return std::nullopt;
    return (*ex).*field;
  };
  t.rows.push_back({"kind", to_string(prof.kind), ""});
  t.rows.push_back({"n", std::to_string(prof.n), ""});
  t.rows.push_back({"m", std::to_string(prof.m), ""});
  if (is_self_adjoint(prof.kind)) {
    // Row and column sums coincide, so sigma_1 = sigma_2 = sigma.
    add("sigma1_sq", mp.sigma_sq, pick(&MatrixParams<Rational>::sigma_sq));
    add("sigma2_sq", mp.sigma_sq, pick(&MatrixParams<Rational>::sigma_sq));
    add("sigma_sq", mp.sigma_sq, pick(&MatrixParams<Rational>::sigma_sq));
    add("sigma_tilde_sq", mp.sigma_tilde_sq, pick(&MatrixParams<Rational>::sigma_tilde_sq));
  } else {
    add("sigma1_sq", mp.sigma1_sq, pick(&MatrixParams<Rational>::sigma1_sq));
    add("sigma2_sq", mp.sigma2_sq, pick(&MatrixParams<Rational>::sigma2_sq));
  }
  add("sigma_star_sq", mp.sigma_star_sq, pick(&MatrixParams<Rational>::sigma_star_sq));
  Manifest m;
  m.subcommand = "params";
  m.config = {{"profile", fs::path(o.profile).filename().string()},
              {"profile_hash", hex64(fnv1a64(profile_to_json(prof)))}};
  emit(t, o.common, m, start);
  return kOk;
}

struct BoundOpts {
  Common common;
  std::string profile;
  std::string model;
  std::string flavor = "small";
  std::string t = "0";
  double c_exp = TailConstants{}.c_exp;
  double prefactor = TailConstants{}.prefactor;
};

int do_bound(const BoundOpts& o) {
  const auto start = std::chrono::steady_clock::now();
  const VarianceProfile prof = load_profile(o.profile);
  if (!o.model.empty() && parse_kind(o.model) != prof.kind) {
    throw InvalidProfile("--model " + o.model + " does not match the profile kind " +
                         to_string(prof.kind));
  }
  const Flavor flavor = parse_flavor(o.flavor);
  TailConstants k;
  k.c_exp = o.c_exp;
  k.prefactor = o.prefactor;
  Table t{{flavor == Flavor::PropForm ? "eps" : "t", "threshold", "prob", "capped"}, {}};
  std::map<std::string, double> constants;
  for (double x : parse_grid(o.t)) {
    TailBound b;
    try {
      b = evaluate_tail(prof, flavor, x, k);
    } catch (const OutOfWindow& e) {
      throw OutOfWindow(std::string(e.what()) + " (grid point " + fmt(x) + ")");
    }
    constants = b.constants;
    t.rows.push_back({fmt(x), fmt(b.threshold), fmt(b.prob), b.capped ? "true" : "false"});
  }
  Manifest m;
  m.subcommand = "bound";
  m.config = {{"profile_hash", hex64(fnv1a64(profile_to_json(prof)))},
              {"model", to_string(prof.kind)},
              {"flavor", to_string(flavor)},
              {"t", o.t},
              {"c_exp", k.c_exp},
              {"prefactor", k.prefactor}};
  m.constants = constants;
  emit(t, o.common, m, start);
  return kOk;
}

struct MomentsOpts {
  Common common;
  std::string profile;
  int p = 4;
  int cap = kDefaultReduceCap;
};

int do_moments(const MomentsOpts& o) {
  const auto start = std::chrono::steady_clock::now();
  const VarianceProfile prof = load_profile(o.profile);
  if (o.p < 1) throw InvalidProfile("--p must be >= 1");
  if (o.p > o.cap) throw CapExceeded("p=" + std::to_string(o.p) + " exceeds --cap " + std::to_string(o.cap));
  Table t{{"p", "wick", "wick_fraction", "extremal_bound", "extremal_bound_fraction", "bound_at_ceilings",
           "bound_at_ceilings_fraction", "d1", "d2"},
          {}};
  for (int p = 1; p <= o.p; ++p) {
    const Rational w = wick_moment(prof, p);
    const auto b = extremal_bound(prof, p, o.cap);
    std::vector<std::string> row{std::to_string(p)};
    append(row, rational_cells(w));
    append(row, rational_cells(b.value));
    append(row, rational_cells(b.iid_value));
    row.push_back(b.d1.str());
    row.push_back(prof.kind == Kind::Rectangular ? b.d2.str() : "");
    t.rows.push_back(std::move(row));
  }
  Manifest m;
  m.subcommand = "moments";
  m.config = {{"profile_hash", hex64(fnv1a64(profile_to_json(prof)))}, {"p", o.p}, {"cap", o.cap}};
  emit(t, o.common, m, start);
  return kOk;
}

struct KappaOpts {
  Common common;
  std::string taxonomy = "sym";
  int p = 3;
  int cap = kDefaultReduceCap;
};

int do_kappa(const KappaOpts& o) {
  const auto start = std::chrono::steady_clock::now();
  const Kind kind = parse_kind(o.taxonomy);
  if (o.p < 1) throw InvalidProfile("--p must be >= 1");
  const int cap = kind == Kind::Hermitian ? std::max(o.cap, kDefaultPairingCap) : o.cap;
  const MomentPolynomial poly = moment_polynomial(kind, o.p, cap);
  Table t{{"k", "l", "coefficient"}, {}};
  for (const auto& [kl, c] : poly.coeffs) {
    t.rows.push_back({std::to_string(kl.first), std::to_string(kl.second), c.str()});
  }
  Manifest m;
  m.subcommand = "kappa";
  m.config = {{"taxonomy", to_string(kind)}, {"p", o.p}, {"cap", o.cap}};
  m.extra["mass"] = poly.mass().str();
  emit(t, o.common, m, start);
  return kOk;
}

struct WishartOpts {
  Common common;
  long n = 1;
  long m = 1;
  int pmax = 10;
  bool high_float = false;
};

int do_wishart(const WishartOpts& o) {
  const auto start = std::chrono::steady_clock::now();
  Table t;
  if (!o.high_float) {
    const auto tab = build_table(o.n, o.m, o.pmax);
    t.header = {"p", "A", "A_fraction", "Aprime", "Aprime_fraction", "B", "B_fraction", "D", "D_fraction",
                "chi", "chi_fraction"};
    for (int p = 0; p <= o.pmax; ++p) {
      std::vector<std::string> row{std::to_string(p)};
      for (const auto* seq : {&tab.A, &tab.Aprime, &tab.B, &tab.D, &tab.chi}) append(row, rational_cells((*seq)[p]));
      t.rows.push_back(std::move(row));
    }
  } else {
    const auto tab = build_float_table(o.n, o.m, o.pmax);
    t.header = {"p", "A", "Aprime", "B", "D", "chi"};
    for (int p = 0; p <= o.pmax; ++p) {
      std::vector<std::string> row{std::to_string(p)};
      for (const auto* seq : {&tab.A, &tab.Aprime, &tab.B, &tab.D, &tab.chi}) {
        row.push_back((*seq)[p].str(30, std::ios_base::scientific));
      }
      t.rows.push_back(std::move(row));
    }
  }
  Manifest m;
  m.subcommand = "wishart";
  m.config = {{"n", o.n}, {"m", o.m}, {"pmax", o.pmax}, {"float", o.high_float}};
  emit(t, o.common, m, start);
  return kOk;
}

struct SimulateOpts {
  Common common;
  std::string profile;
  std::size_t samples = 1000;
  std::uint64_t seed = 0;
  std::string dist = "gaussian";
  double tol = 1e-10;
  int maxiter = 10000;
  unsigned threads = 0;
  bool summary = false;
  std::string moments;
  std::string mgf;
};

Table summary_table(const SimulationResult& r, const VarianceProfile& prof,
                    const std::vector<int>& orders, const std::vector<double>& levels) {
  Table t{{"section", "key", "value", "std_error_or_half_width", "bound"}, {}};
  const auto nm = r.norm_mean();
  t.rows.push_back({"norm", "mean", fmt(nm.mean), fmt(nm.std_error), ""});
  t.rows.push_back({"norm", "samples", std::to_string(r.norms.size()), "", ""});
  t.rows.push_back({"norm", "no_convergence", std::to_string(r.no_convergence.size()), "", ""});
  for (double q : {0.0, 0.01, 0.05, 0.25, 0.5, 0.75, 0.95, 0.99, 1.0}) {
    t.rows.push_back({"quantile", fmt(q), fmt(r.quantile(q)), "", ""});
  }
  for (double x = 0; x <= 3.0 + 1e-12; x += 0.5) {
    TailBound b;
    try {
      b = evaluate_tail(prof, Flavor::SmallDev, x);
    } catch (const OutOfWindow&) {
      break;
    }
    const auto e = r.tail(b.threshold);
    t.rows.push_back({"tail", "t=" + fmt(x) + " x=" + fmt(b.threshold), fmt(e.freq), fmt(e.half_width),
                      fmt(b.prob)});
  }
  for (int p : orders) {
    const auto e = r.empirical_moment(p);
    t.rows.push_back({"moment", std::to_string(p), fmt(e.mean), fmt(e.std_error), ""});
  }
  for (double lv : levels) {
    const auto e = r.mgf(lv);
    t.rows.push_back({"mgf", fmt(lv), fmt(e.mean), fmt(e.std_error), ""});
  }
  return t;
}

int do_simulate(const SimulateOpts& o) {
  const auto start = std::chrono::steady_clock::now();
  SimulationConfig cfg;
  cfg.profile = load_profile(o.profile);
  cfg.entry_dist = parse_entry_dist(o.dist);
  cfg.samples = o.samples;
  cfg.master_seed = o.seed;
  cfg.norm_tol = o.tol;
  cfg.norm_maxiter = o.maxiter;
  cfg.threads = o.threads;
  Targets targets;
  if (!o.moments.empty()) targets.moment_orders = parse_int_list(o.moments);
  if (!o.mgf.empty()) targets.mgf_levels = parse_grid(o.mgf);
  const SimulationResult r = estimate(cfg, targets);

  Table samples{{"index", "norm", "converged"}, {}};
  for (std::size_t i = 0; i < r.sample_norms.size(); ++i) {
    const bool ok = !std::isnan(r.sample_norms[i]);
    samples.rows.push_back({std::to_string(i), ok ? fmt(r.sample_norms[i]) : "nan", ok ? "true" : "false"});
  }
  Manifest m;
  m.subcommand = "simulate";
  m.config = {{"profile_hash", hex64(fnv1a64(profile_to_json(cfg.profile)))},
              {"entry_dist", to_string(cfg.entry_dist)},
              {"samples", cfg.samples},
              {"norm_tol", cfg.norm_tol},
              {"norm_maxiter", cfg.norm_maxiter},
              {"moments", o.moments},
              {"mgf", o.mgf}};
  m.seed = o.seed;
  m.extra["no_convergence"] = r.no_convergence;
  m.extra["sanity_violations"] = r.sanity_violations;
  if (o.summary) {
    const Table s = summary_table(r, cfg.profile, targets.moment_orders, targets.mgf_levels);
    if (o.common.out.empty()) {
      std::cout << to_csv(samples) << "\n" << to_csv(s);
      return kOk;
    }
    const fs::path sp(o.common.out + ".summary.csv");
    write_file(sp, to_csv(s));
    m.outputs.push_back(sp.filename().string());
  }
  emit(samples, o.common, m, start);
  if (!r.no_convergence.empty()) {
    std::cerr << r.no_convergence.size() << " sample(s) did not converge and were excluded\n";
  }
  return kOk;
}

struct VerifyOpts {
  Common common;
  std::string suite = "exact";
  std::uint64_t seed = verify::Options{}.seed;
  unsigned threads = 0;
};

int do_verify(const VerifyOpts& o) {
  const auto start = std::chrono::steady_clock::now();
  std::vector<int> ids;
  try {
    ids = verify::suite(o.suite);
  } catch (const std::invalid_argument& e) {
    throw CLI::ValidationError("--suite", e.what());
  }
  verify::Options vo;
  vo.seed = o.seed;
  vo.threads = o.threads;
  bool all_pass = true;
  Manifest m;
  m.subcommand = "verify";
  m.config = {{"suite", o.suite}};
  m.seed = o.seed;
  m.constants = {{"c_exp", TailConstants{}.c_exp},
                 {"prefactor", TailConstants{}.prefactor},
                 {"wishart_envelope", 40.0}};
  json results = json::object();
  for (int id : ids) {
    const verify::Result r = verify::run(id, vo);
    all_pass = all_pass && r.pass;
    std::printf("%s criterion %2d: %s\n", r.pass ? "PASS" : "FAIL", id, r.title.c_str());
    for (const auto& f : r.failures) std::printf("    %s\n", f.c_str());
    std::fflush(stdout);
    char name[32];
    std::snprintf(name, sizeof name, "criterion_%02d.csv", id);
    if (!o.common.out.empty()) {
      write_file(fs::path(o.common.out) / name, verify::to_csv(r));
      m.outputs.push_back(name);
    }
    results[std::to_string(id)] = {{"title", r.title}, {"pass", r.pass}, {"tolerances", r.tolerances}};
  }
  m.extra["results"] = results;
  if (!o.common.out.empty()) {
    if (o.common.wall_time) {
      m.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
    write_file(fs::path(o.common.out) / "manifest.json", m.dump());
  }
  return all_pass ? kOk : kValidation;
}

void add_common(CLI::App* sub, Common& c, const char* out_help) {
  sub->add_option("--out", c.out, out_help);
  sub->add_flag("--wall-time", c.wall_time, "record wall time in the manifest");
}

}  // namespace

std::vector<double> parse_grid(const std::string& spec) {
  auto number = [&](const std::string& s) {
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != s.size() || !std::isfinite(v)) {
      throw CLI::ValidationError("bad number '" + s + "' in '" + spec + "'");
    }
    return v;
  };
  std::vector<double> out;
  if (spec.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(item);
    if (parts.size() != 3) throw CLI::ValidationError("range must be lo:hi:step, got '" + spec + "'");
    const double lo = number(parts[0]), hi = number(parts[1]), step = number(parts[2]);
    if (!(step > 0) || hi < lo) throw CLI::ValidationError("empty or invalid range '" + spec + "'");
    for (long i = 0;; ++i) {
      const double v = lo + static_cast<double>(i) * step;
      if (v > hi + 1e-9 * step) break;
      out.push_back(v);
    }
    return out;
  }
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(number(item));
  if (out.empty()) throw CLI::ValidationError("empty list");
  return out;
}

int run(int argc, const char* const* argv) {
  std::vector<std::string> args(argv, argv + argc);
  return run(args);
}

int run(const std::vector<std::string>& args) {
  CLI::App app{"Extremal random-matrix toolkit: exact moments, extremal bounds, Wishart tables, tail bounds and Monte Carlo checks"};
  app.require_subcommand(1);
  app.set_version_flag("--version", ERMT_VERSION);

  ParamsOpts params;
  auto* sp = app.add_subcommand("params", "matrix parameters of a variance profile");
  sp->add_option("--profile", params.profile, "profile JSON")->required();
  add_common(sp, params.common, "CSV output file");

  BoundOpts bound;
  auto* sb = app.add_subcommand("bound", "tail-bound curve");
  sb->add_option("--profile", bound.profile, "profile JSON")->required();
  sb->add_option("--model", bound.model, "rect | herm | sym (must match the profile)");
  sb->add_option("--flavor", bound.flavor, "small | large | prop");
  sb->add_option("--t", bound.t, "grid: lo:hi:step, a,b,c or a single value");
  sb->add_option("--c-exp", bound.c_exp, "exponent constant of the symmetric/rectangular bounds");
  sb->add_option("--prefactor", bound.prefactor, "prefactor constant of the symmetric/rectangular bounds");
  add_common(sb, bound.common, "CSV output file");

  MomentsOpts moments;
  auto* sm = app.add_subcommand("moments", "exact Wick moments against the extremal bound");
  sm->add_option("--profile", moments.profile, "profile JSON with exact (string) entries")->required();
  sm->add_option("--p", moments.p, "largest moment order");
  sm->add_option("--cap", moments.cap, "largest order the reduction may run");
  add_common(sm, moments.common, "CSV output file");

  KappaOpts kappa;
  auto* sk = app.add_subcommand("kappa", "extremal coefficient table");
  sk->add_option("--taxonomy", kappa.taxonomy, "sym | rect | herm");
  sk->add_option("--p", kappa.p, "moment order")->required();
  sk->add_option("--cap", kappa.cap, "largest order the reduction may run");
  add_common(sk, kappa.common, "CSV output file");

  WishartOpts wishart;
  auto* sw = app.add_subcommand("wishart", "exact Wishart moment table");
  sw->add_option("--n", wishart.n, "rows")->required();
  sw->add_option("--m", wishart.m, "columns (m >= n)")->required();
  sw->add_option("--pmax", wishart.pmax, "largest order");
  sw->add_flag("--float", wishart.high_float, "50-digit floating point, no order cap");
  add_common(sw, wishart.common, "CSV output file");

  SimulateOpts sim;
  auto* ss = app.add_subcommand("simulate", "Monte Carlo spectral norms");
  ss->add_option("--profile", sim.profile, "profile JSON")->required();
  ss->add_option("--samples", sim.samples, "number of samples");
  ss->add_option("--seed", sim.seed, "master seed");
  ss->add_option("--dist", sim.dist, "gaussian | rademacher");
  ss->add_option("--tol", sim.tol, "relative tolerance of the power iteration");
  ss->add_option("--maxiter", sim.maxiter, "power iteration limit");
  ss->add_option("--threads", sim.threads, "worker threads (default: EXTREMALRMT_THREADS or all cores)");
  ss->add_flag("--summary", sim.summary, "also emit quantiles, tail table and requested moments");
  ss->add_option("--moments", sim.moments, "moment orders p, e.g. 1,2");
  ss->add_option("--mgf", sim.mgf, "exponential moment levels t, e.g. 0.5,1");
  add_common(ss, sim.common, "per-sample CSV output file");

  VerifyOpts ver;
  auto* sv = app.add_subcommand("verify", "run acceptance checks");
  sv->add_option("--suite", ver.suite, "exact | bounds | mc | all | comma list of criteria");
  sv->add_option("--seed", ver.seed, "master seed");
  sv->add_option("--threads", ver.threads, "worker threads (default: EXTREMALRMT_THREADS or all cores)");
  add_common(sv, ver.common, "output directory for CSVs and manifest");

  std::vector<std::string> rest(args.begin() + (args.empty() ? 0 : 1), args.end());
  std::reverse(rest.begin(), rest.end());
  try {
    app.parse(rest);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*sp) return do_params(params);
    if (*sb) return do_bound(bound);
    if (*sm) return do_moments(moments);
    if (*sk) return do_kappa(kappa);
    if (*sw) return do_wishart(wishart);
    if (*ss) return do_simulate(sim);
    if (*sv) return do_verify(ver);
  } catch (const CLI::ParseError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kValidation;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidation;
  }
  return kUsage;
}

}  // namespace ermt::cli

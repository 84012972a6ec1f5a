#include "ermt/montecarlo.hpp"

#include "ermt/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

namespace ermt {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
constexpr double kTwoPi = 6.283185307179586476925286766559;

using cd = std::complex<double>;

template <class Vec>
void fill_normal(Vec& v, CounterRng& rng) {
  using S = typename Vec::Scalar;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if constexpr (std::is_same_v<S, cd>) {
      const double re = rng.normal();
      v[i] = cd(re, rng.normal());
    } else {
      v[i] = rng.normal();
    }
  }
}

// Top eigenpair of a 2x2 self-adjoint block.
template <class S>
Eigen::Matrix<S, 2, 1> top_ritz(const Eigen::Matrix<S, 2, 2>& h) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix<S, 2, 2>> es(h);
  return es.eigenvectors().col(1);
}

template <class Mat>
double top_eigenvalue_psd(const Mat& g, double tol, int maxiter, CounterRng& rng) {
  using S = typename Mat::Scalar;
  using Vec = Eigen::Matrix<S, Eigen::Dynamic, 1>;
  const Eigen::Index n = g.rows();
  Vec v(n);
  fill_normal(v, rng);
  if (n == 0 || g.cwiseAbs().maxCoeff() == 0) return 0.0;
  v.normalize();
  Vec prev = v;
  double rho_old = 0;
  for (int it = 1; it <= maxiter; ++it) {
    Vec w = g * v;
    const double rho = std::real(v.dot(w));
    const double wn = w.norm();
    if (wn == 0) return 0.0;
    if (it > 1 && std::abs(rho - rho_old) <= tol * std::abs(rho)) return std::max(rho, 0.0);
    rho_old = rho;
    prev = v;
    v = w / wn;
    if (it % 200 == 0) {
      Vec q2 = prev - v * v.dot(prev);
      const double q2n = q2.norm();
      if (q2n > 1e-8) {
        q2 /= q2n;
        const Vec gv = g * v, gq = g * q2;
        Eigen::Matrix<S, 2, 2> h;
        h(0, 0) = v.dot(gv);
        h(0, 1) = v.dot(gq);
        h(1, 0) = q2.dot(gv);
        h(1, 1) = q2.dot(gq);
        const auto c = top_ritz<S>(h);
        v = c(0) * v + c(1) * q2;
        v.normalize();
      }
    }
  }
  throw NoConvergence("power iteration did not converge in " + std::to_string(maxiter) +
                      " iterations");
}

template <class Mat>
double norm_of(const Mat& x, double tol, int maxiter, CounterRng& rng) {
  const Mat g = x * x.adjoint();
  return std::sqrt(top_eigenvalue_psd(g, tol, maxiter, rng));
}

double entry(EntryDist d, CounterRng& rng) {
  return d == EntryDist::Gaussian ? rng.normal() : rng.rademacher();
}

struct SampleOut {
  double norm = std::numeric_limits<double>::quiet_NaN();
  bool converged = false;
  bool sane = true;
  std::vector<double> moments;
  std::vector<double> mgfs;
};

template <class Mat>
void sample_stats(const Mat& x, Kind kind, const SimulationConfig& config,
                  const Targets& targets, CounterRng& rng, SampleOut& out) {
  const Mat g = x * x.adjoint();
  try {
    out.norm = std::sqrt(top_eigenvalue_psd(g, config.norm_tol, config.norm_maxiter, rng));
    out.converged = true;
  } catch (const NoConvergence&) {
    return;
  }
  const double maxabs = x.size() ? x.cwiseAbs().maxCoeff() : 0.0;
  out.sane = out.norm >= maxabs * (1 - 1e-8);
  const double n = static_cast<double>(x.rows());
  if (!targets.moment_orders.empty()) {
    const int top = *std::max_element(targets.moment_orders.begin(), targets.moment_orders.end());
    std::vector<double> tr(top + 1, 0.0);
    Mat power = g;
    for (int p = 1; p <= top; ++p) {
      if (p > 1) power = power * g;
      tr[p] = std::real(power.trace()) / n;
    }
    for (int p : targets.moment_orders) out.moments.push_back(p >= 1 ? tr[p] : 1.0);
  }
  if (!targets.mgf_levels.empty()) {
    Eigen::VectorXd spec;
    if (is_self_adjoint(kind)) {
      Eigen::SelfAdjointEigenSolver<Mat> es(x, Eigen::EigenvaluesOnly);
      spec = es.eigenvalues();
    } else {
      Eigen::SelfAdjointEigenSolver<Mat> es(g, Eigen::EigenvaluesOnly);
      spec = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    }
    for (double t : targets.mgf_levels) {
      CompensatedSum s;
      for (Eigen::Index i = 0; i < spec.size(); ++i) s.add(std::exp(t * spec[i]));
      out.mgfs.push_back(s.value() / n);
    }
  }
}

MeanEstimate mean_of(const std::vector<double>& v) {
  MeanEstimate e;
  e.count = v.size();
  if (v.empty()) return e;
  CompensatedSum s;
  for (double x : v) s.add(x);
  e.mean = s.value() / static_cast<double>(v.size());
  if (v.size() > 1) {
    CompensatedSum q;
    for (double x : v) q.add((x - e.mean) * (x - e.mean));
    const double var = q.value() / static_cast<double>(v.size() - 1);
    e.std_error = std::sqrt(var / static_cast<double>(v.size()));
  }
  return e;
}

}  // namespace

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t sample_key(std::uint64_t master_seed, std::uint64_t index) {
  return mix64(mix64(master_seed) ^ mix64(index + 0xD1B54A32D192ED03ULL));
}

std::uint64_t CounterRng::next() {
  ++counter_;
  return mix64(key_ + counter_ * kGolden);
}

double CounterRng::uniform() {
  return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
}

double CounterRng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = uniform(), u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  spare_ = r * std::sin(kTwoPi * u2);
  has_spare_ = true;
  return r * std::cos(kTwoPi * u2);
}

double CounterRng::rademacher() { return (next() >> 63) ? 1.0 : -1.0; }

std::string to_string(EntryDist d) { return d == EntryDist::Gaussian ? "gaussian" : "rademacher"; }

EntryDist parse_entry_dist(const std::string& name) {
  if (name == "gaussian" || name == "normal") return EntryDist::Gaussian;
  if (name == "rademacher") return EntryDist::Rademacher;
  throw InvalidProfile("unknown entry distribution '" + name + "'");
}

void validate(const SimulationConfig& config) {
  validate(config.profile);
  if (config.samples < 1) throw InvalidProfile("samples must be >= 1");
  if (!(config.norm_tol > 0)) throw InvalidProfile("norm_tol must be > 0");
  if (config.norm_maxiter < 1) throw InvalidProfile("norm_maxiter must be >= 1");
}

unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("EXTREMALRMT_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

double Realization::max_abs_entry() const {
  if (is_complex()) return complex.size() ? complex.cwiseAbs().maxCoeff() : 0.0;
  return real.size() ? real.cwiseAbs().maxCoeff() : 0.0;
}

Realization sample_matrix(const SimulationConfig& config, std::uint64_t index, CounterRng* rest) {
  const VarianceProfile& p = config.profile;
  CounterRng rng(sample_key(config.master_seed, index));
  Realization r;
  r.kind = p.kind;
  const auto n = static_cast<Eigen::Index>(p.n);
  const auto m = static_cast<Eigen::Index>(p.m);
  switch (p.kind) {
    case Kind::Rectangular:
      r.real.resize(n, m);
      for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < m; ++j) r.real(i, j) = p.at(i, j) * entry(config.entry_dist, rng);
      break;
    case Kind::RealSymmetric:
      r.real.resize(n, n);
      for (Eigen::Index i = 0; i < n; ++i) {
        r.real(i, i) = std::sqrt(2.0) * p.at(i, i) * entry(config.entry_dist, rng);
        for (Eigen::Index j = i + 1; j < n; ++j) {
          const double v = p.at(i, j) * entry(config.entry_dist, rng);
          r.real(i, j) = v;
          r.real(j, i) = v;
        }
      }
      break;
    case Kind::Hermitian: {
      r.complex.resize(n, n);
      const double h = std::sqrt(0.5);
      for (Eigen::Index i = 0; i < n; ++i) {
        r.complex(i, i) = p.at(i, i) * entry(config.entry_dist, rng);
        for (Eigen::Index j = i + 1; j < n; ++j) {
          const double re = entry(config.entry_dist, rng);
          const double im = entry(config.entry_dist, rng);
          const cd v = p.at(i, j) * h * cd(re, im);
          r.complex(i, j) = v;
          r.complex(j, i) = std::conj(v);
        }
      }
      break;
    }
  }
  if (rest) *rest = rng;
  return r;
}

double spectral_norm(const Eigen::MatrixXd& x, double tol, int maxiter, CounterRng& rng) {
  return norm_of(x, tol, maxiter, rng);
}

double spectral_norm(const Eigen::MatrixXcd& x, double tol, int maxiter, CounterRng& rng) {
  return norm_of(x, tol, maxiter, rng);
}

double wilson_half_width(std::size_t k, std::size_t n, double z) {
  if (n == 0) return 0.0;
  const double nn = static_cast<double>(n);
  const double ph = static_cast<double>(k) / nn;
  return z / (1 + z * z / nn) * std::sqrt(ph * (1 - ph) / nn + z * z / (4 * nn * nn));
}

MeanEstimate SimulationResult::empirical_moment(int p) const {
  auto it = moments.find(p);
  if (it == moments.end()) throw InvalidProfile("moment order " + std::to_string(p) + " not simulated");
  return it->second;
}

MeanEstimate SimulationResult::mgf(double t) const {
  auto it = mgfs.find(t);
  if (it == mgfs.end()) throw InvalidProfile("mgf level not simulated");
  return it->second;
}

TailEstimate SimulationResult::tail(double x) const {
  TailEstimate e;
  e.x = x;
  e.total = norms.size();
  e.exceed = static_cast<std::size_t>(norms.end() - std::upper_bound(norms.begin(), norms.end(), x));
  e.freq = e.total ? static_cast<double>(e.exceed) / static_cast<double>(e.total) : 0.0;
  e.half_width = wilson_half_width(e.exceed, e.total);
  return e;
}

MeanEstimate SimulationResult::norm_mean() const { return mean_of(norms); }

double SimulationResult::quantile(double q) const {
  if (norms.empty()) return std::numeric_limits<double>::quiet_NaN();
  q = std::clamp(q, 0.0, 1.0);
  const double pos = q * static_cast<double>(norms.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, norms.size() - 1);
  return norms[lo] + (pos - static_cast<double>(lo)) * (norms[hi] - norms[lo]);
}

SimulationResult estimate(const SimulationConfig& config, const Targets& targets) {
  validate(config);
  const std::size_t total = config.samples;
  std::vector<SampleOut> outs(total);
  const unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(resolve_threads(config.threads), total));

  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&](unsigned w) {
    try {
      for (std::size_t i = w; i < total; i += workers) {
        CounterRng rng(0);
        const Realization r = sample_matrix(config, i, &rng);
        if (r.is_complex()) {
          sample_stats(r.complex, r.kind, config, targets, rng, outs[i]);
        } else {
          sample_stats(r.real, r.kind, config, targets, rng, outs[i]);
        }
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  };
  if (workers <= 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  SimulationResult res;
  res.sample_norms.reserve(total);
  std::vector<std::vector<double>> mom(targets.moment_orders.size());
  std::vector<std::vector<double>> mg(targets.mgf_levels.size());
  for (std::size_t i = 0; i < total; ++i) {
    const SampleOut& o = outs[i];
    res.sample_norms.push_back(o.norm);
    if (!o.converged) {
      res.no_convergence.push_back(i);
      continue;
    }
    if (!o.sane) ++res.sanity_violations;
    res.norms.push_back(o.norm);
    for (std::size_t k = 0; k < mom.size(); ++k) mom[k].push_back(o.moments[k]);
    for (std::size_t k = 0; k < mg.size(); ++k) mg[k].push_back(o.mgfs[k]);
  }
  std::sort(res.norms.begin(), res.norms.end());
  for (std::size_t k = 0; k < mom.size(); ++k) res.moments[targets.moment_orders[k]] = mean_of(mom[k]);
  for (std::size_t k = 0; k < mg.size(); ++k) res.mgfs[targets.mgf_levels[k]] = mean_of(mg[k]);
  return res;
}

}  // namespace ermt

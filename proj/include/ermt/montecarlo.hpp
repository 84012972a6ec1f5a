#pragma once

#include "ermt/profile.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace ermt {

// Counter-based generator. Draw number c (c = 0, 1, ...) of the stream with
// key k is mix64(k + (c + 1) * 0x9E3779B97F4A7C15), where mix64 is the
// SplitMix64 finalizer. A sample's key is
//   sample_key(seed, i) = mix64(mix64(seed) ^ mix64(i + 0xD1B54A32D192ED03)).
std::uint64_t mix64(std::uint64_t z);
std::uint64_t sample_key(std::uint64_t master_seed, std::uint64_t index);

class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key) : key_(key) {}
  std::uint64_t next();
  // ((x >> 11) + 0.5) * 2^-53, never 0 or 1.
  double uniform();
  // Box-Muller; the second value of each pair is kept for the next call.
  double normal();
  double rademacher();
  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double spare_ = 0;
  bool has_spare_ = false;
};

enum class EntryDist { Gaussian, Rademacher };
std::string to_string(EntryDist d);
EntryDist parse_entry_dist(const std::string& name);

struct SimulationConfig {
  VarianceProfile profile;
  EntryDist entry_dist = EntryDist::Gaussian;
  std::size_t samples = 1000;
  std::uint64_t master_seed = 0;
  double norm_tol = 1e-10;
  int norm_maxiter = 10000;
  unsigned threads = 0;  // 0: EXTREMALRMT_THREADS, else hardware concurrency
};

void validate(const SimulationConfig& config);

// Worker count actually used for a request (0 means "pick").
unsigned resolve_threads(unsigned requested);

// One draw of the model. Real kinds fill `real`, the Hermitian kind fills
// `complex`.
struct Realization {
  Kind kind = Kind::Rectangular;
  Eigen::MatrixXd real;
  Eigen::MatrixXcd complex;
  bool is_complex() const { return kind == Kind::Hermitian; }
  double max_abs_entry() const;
};

// Also returns the generator positioned after the entries, so callers can
// keep drawing from the same per-sample stream.
Realization sample_matrix(const SimulationConfig& config, std::uint64_t index,
                          CounterRng* rest = nullptr);

// Largest singular value by power iteration on X X^*. Every 200 iterations
// the iterate is replaced by the top Ritz vector of span{previous, current}.
// The start vector is drawn from rng. Throws NoConvergence.
double spectral_norm(const Eigen::MatrixXd& x, double tol, int maxiter, CounterRng& rng);
double spectral_norm(const Eigen::MatrixXcd& x, double tol, int maxiter, CounterRng& rng);

struct Targets {
  std::vector<int> moment_orders;  // p: mean of (1/n) tr (X X^*)^p
  std::vector<double> mgf_levels;  // t: mean of (1/n) tr e^{tX}, or e^{t (XX^*)^{1/2}}
};

struct MeanEstimate {
  double mean = 0;
  double std_error = 0;
  std::size_t count = 0;
};

struct TailEstimate {
  double x = 0;
  std::size_t exceed = 0;
  std::size_t total = 0;
  double freq = 0;
  double half_width = 0;  // Wilson, z = 1
};

double wilson_half_width(std::size_t k, std::size_t n, double z = 1.0);

struct SimulationResult {
  std::vector<double> sample_norms;  // by index; NaN where discarded
  std::vector<double> norms;         // sorted, discarded samples removed
  std::vector<std::uint64_t> no_convergence;
  std::size_t sanity_violations = 0;  // samples with norm < max |X_ij|
  std::map<int, MeanEstimate> moments;
  std::map<double, MeanEstimate> mgfs;

  MeanEstimate empirical_moment(int p) const;
  MeanEstimate mgf(double t) const;
  TailEstimate tail(double x) const;
  MeanEstimate norm_mean() const;
  double quantile(double q) const;
};

// Parallel over sample indices; the result does not depend on the worker
// count.
SimulationResult estimate(const SimulationConfig& config, const Targets& targets = {});

}  // namespace ermt

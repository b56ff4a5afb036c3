#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "fsq/core_dft.hpp"
#include "fsq/set_query.hpp"
#include "fsq/verification.hpp"

namespace fsq {

enum class SignalModel { Zero, PlantedSparse, SparsePlusGaussian, AdversarialNearBucket };
enum class QueryModel { ExactSupport, Superset, Disjoint };

std::string to_string(SignalModel m);
std::string to_string(QueryModel m);
std::optional<SignalModel> parse_signal_model(const std::string& s);
std::optional<QueryModel> parse_query_model(const std::string& s);

/// Derives an independent 64-bit stream seed (SplitMix64 finalizer).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

struct SignalSpec {
  SignalModel model = SignalModel::PlantedSparse;
  std::size_t tones = 1;
  /// Per-component standard deviation of the spectrum-domain complex noise.
  double noise_sigma = 0.0;
  /// Bucket count the adversarial model stresses: its first two tones sit
  /// closer than n / (2B) (at least 1 apart).
  std::uint64_t stress_buckets = 2;
};

struct GeneratedSignal {
  std::vector<cplx> time;      // inverse unitary DFT of `spectrum`
  std::vector<cplx> spectrum;  // exact construction
  std::vector<Index> planted;  // sorted tone positions
};

/// Unit-magnitude, random-phase tones at distinct frequencies, plus noise.
GeneratedSignal generate_signal(const SignalSpec& spec, std::uint64_t n, std::mt19937_64& rng);

/// Query set of size k relative to the planted support.
/// ExactSupport: S = planted (k tones). Superset: planted (max(1, k/2) tones)
/// plus random extra frequencies. Disjoint: k frequencies outside the support.
std::vector<Index> choose_query(QueryModel model, std::span<const Index> planted, std::uint64_t n, std::size_t k,
                                std::mt19937_64& rng);

/// Number of tones each query model plants for a query of size k.
std::size_t planted_tones(QueryModel model, std::size_t k);

struct ExperimentConfig {
  std::uint64_t n = 4096;
  std::size_t k = 8;
  double eps = 0.5;
  double delta = 1e-3;
  ScheduleConstants constants = kPracticalConstants;
  std::size_t trials = 100;
  std::uint64_t seed = 1;
  SignalModel signal_model = SignalModel::SparsePlusGaussian;
  double noise_sigma = 0.01;
  QueryModel query_model = QueryModel::Superset;
  unsigned threads = 1;  // 0: one per hardware thread
  bool record_timing = true;
  std::string output_path;  // empty: caller decides

  /// Throws InvalidArgument on any out-of-range field.
  void validate() const;
};

struct TrialRecord {
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  double error_lhs = 0.0;          // ||(x' - xhat)_S||_2^2
  double error_rhs_theorem = 0.0;  // eps ||xhat_notS||^2 + delta ||xhat||_1^2
  double error_rhs_proof = 0.0;    // eps (||xhat_notS||^2 + delta^2 n ||xhat||_1^2)
  /// max over i in S of |x'_i - xhat_i| / |xhat_i|; entries below 1e-9
  /// of ||xhat||_inf are measured against ||xhat||_inf instead.
  double max_relative_error = 0.0;
  std::size_t samples = 0;
  std::size_t unresolved = 0;
  std::size_t rounds = 0;
  bool clamped = false;            // some round used B = n
  std::int64_t wall_time_ns = 0;
  bool success_theorem = false;
  bool success_proof = false;
};

struct ExperimentSummary {
  std::size_t trials = 0;
  double success_rate_theorem = 0.0;
  double success_rate_proof = 0.0;
  double samples_mean = 0.0;
  std::size_t samples_min = 0;
  std::size_t samples_max = 0;
  double samples_fraction = 0.0;   // mean samples / n
  double fitted_constant = 0.0;    // mean samples / (k / eps * ln(n / delta))
  std::int64_t time_p50_ns = 0;
  std::int64_t time_p90_ns = 0;
  std::int64_t time_max_ns = 0;
  std::vector<ScheduleRow> schedule;
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<TrialRecord> records;  // ordered by trial index
  ExperimentSummary summary;
};

/// A trial threw; carries the trial's seed so it can be replayed.
class TrialFailure : public std::runtime_error {
 public:
  TrialFailure(std::size_t trial, std::uint64_t seed, const std::string& what);
  std::size_t trial() const noexcept { return trial_; }
  std::uint64_t seed() const noexcept { return seed_; }

 private:
  std::size_t trial_;
  std::uint64_t seed_;
};

/// Runs one trial exactly as run_experiment would for trial index `trial`.
TrialRecord run_trial(const ExperimentConfig& config, std::size_t trial, FilterCache* filters = nullptr);

/// Runs config.trials independent trials on a worker pool. Each trial draws
/// its own stream from (seed, trial), so results do not depend on threads.
ExperimentResult run_experiment(const ExperimentConfig& config);

/// One JSON object per line for every trial, then a summary line.
std::string to_jsonl(const ExperimentResult& result);
std::string summary_csv_header();
std::string summary_csv_row(const ExperimentResult& result);

struct ClaimResult {
  std::string name;
  bool passed = false;
  double measured = 0.0;
  double bound = 0.0;
  double std_err = 0.0;
  std::string detail;
};

struct VerificationConfig {
  std::uint64_t n = 1024;
  double delta = 1e-2;
  std::size_t event_trials = 10000;
  std::uint64_t seed = 1;
  /// Size for the collision and offset rates, where the discreteness of the
  /// offset grid (1 / (n/B)) is far below Monte Carlo resolution.
  std::uint64_t hash_event_n = std::uint64_t{1} << 20;
  /// Size for the noise and isolation rates (full enumeration needed).
  std::uint64_t noise_event_n = std::uint64_t{1} << 14;
};

struct VerificationReport {
  std::vector<ClaimResult> claims;
  bool all_passed() const;
};

/// Residual with structure for the noise and isolation rates: unit tones on a
/// random query set of size `query_size` (t is its first element), scattered
/// spikes, spikes next to t, and a sparse complex Gaussian floor. k = |S|.
EventSetup make_event_setup(std::uint64_t n, std::size_t query_size, std::uint64_t buckets, double alpha,
                            std::mt19937_64& rng);

/// Collision, offset, noise and isolation rates over the grid
/// B in {32, 64, 128}, |S| in {4, 8, 16}, alpha in {1/8, 1/16}.
std::vector<ClaimResult> event_bound_claims(const VerificationConfig& config);

VerificationReport run_verification_suite(const VerificationConfig& config);
std::string to_json(const VerificationReport& report);

/// Build a filter and describe it as JSON.
std::string filter_info_json(std::uint64_t n, std::uint64_t buckets, double delta, double alpha);

}  // namespace fsq

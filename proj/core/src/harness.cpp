#include "fsq/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>
#include <unordered_set>

#include "fsq/filter.hpp"
#include "fsq/hash_to_bins.hpp"
#include "fsq/permutation.hpp"
#include "json.hpp"

namespace fsq {

using nlohmann::json;

std::string to_string(SignalModel m) {
  switch (m) {
    case SignalModel::Zero: return "zero";
    case SignalModel::PlantedSparse: return "planted-sparse";
    case SignalModel::SparsePlusGaussian: return "sparse-plus-gaussian";
    case SignalModel::AdversarialNearBucket: return "adversarial-near-bucket";
  }
  return "unknown";
}

std::string to_string(QueryModel m) {
  switch (m) {
    case QueryModel::ExactSupport: return "exact-support";
    case QueryModel::Superset: return "superset";
    case QueryModel::Disjoint: return "disjoint";
  }
  return "unknown";
}

std::optional<SignalModel> parse_signal_model(const std::string& s) {
  for (auto m : {SignalModel::Zero, SignalModel::PlantedSparse, SignalModel::SparsePlusGaussian,
                 SignalModel::AdversarialNearBucket}) {
    if (to_string(m) == s) return m;
  }
  return std::nullopt;
}

std::optional<QueryModel> parse_query_model(const std::string& s) {
  for (auto m : {QueryModel::ExactSupport, QueryModel::Superset, QueryModel::Disjoint}) {
    if (to_string(m) == s) return m;
  }
  return std::nullopt;
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  std::uint64_t z = master + (stream + 1) * 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

namespace {

Index uniform_index(std::mt19937_64& rng, std::uint64_t n) {
  return std::uniform_int_distribution<Index>(0, n - 1)(rng);
}

// Distinct uniform indices avoiding `taken`; `taken` is updated.
std::vector<Index> draw_distinct(std::mt19937_64& rng, std::uint64_t n, std::size_t count,
                                 std::unordered_set<Index>& taken) {
  if (taken.size() + count > n) throw InvalidArgument("not enough free frequencies");
  std::vector<Index> out;
  out.reserve(count);
  while (out.size() < count) {
    const Index i = uniform_index(rng, n);
    if (taken.insert(i).second) out.push_back(i);
  }
  return out;
}

cplx random_phase(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::acos(-1.0));
  return std::polar(1.0, angle(rng));
}

}  // namespace

GeneratedSignal generate_signal(const SignalSpec& spec, std::uint64_t n, std::mt19937_64& rng) {
  if (!is_power_of_two(n)) throw InvalidArgument("generate_signal: n must be a power of two");
  if (spec.tones > n) throw InvalidArgument("generate_signal: k exceeds n");
  if (spec.noise_sigma < 0.0) throw InvalidArgument("generate_signal: noise sigma must be >= 0");

  GeneratedSignal out;
  out.spectrum.assign(n, cplx{});
  const std::size_t tones = spec.model == SignalModel::Zero ? 0 : spec.tones;

  std::unordered_set<Index> taken;
  if (spec.model == SignalModel::AdversarialNearBucket && tones >= 2 && n >= 4) {
    if (spec.stress_buckets == 0) throw InvalidArgument("generate_signal: stress bucket count must be positive");
    const double half = static_cast<double>(n) / (2.0 * static_cast<double>(spec.stress_buckets));
    const auto gap = static_cast<std::uint64_t>(std::max(1.0, std::ceil(half) - 1.0));
    const Index first = uniform_index(rng, n);
    const Index second = (first + gap) & (n - 1);
    taken.insert(first);
    taken.insert(second);
    out.planted = {first, second};
    const auto rest = draw_distinct(rng, n, tones - 2, taken);
    out.planted.insert(out.planted.end(), rest.begin(), rest.end());
  } else {
    out.planted = draw_distinct(rng, n, tones, taken);
  }
  std::sort(out.planted.begin(), out.planted.end());
  for (const Index i : out.planted) out.spectrum[i] = random_phase(rng);

  if (spec.model == SignalModel::SparsePlusGaussian && spec.noise_sigma > 0.0) {
    std::normal_distribution<double> gauss(0.0, spec.noise_sigma);
    for (auto& v : out.spectrum) {
      const double re = gauss(rng);
      const double im = gauss(rng);
      v += cplx{re, im};
    }
  }
  out.time = ifft(out.spectrum);
  return out;
}

std::size_t planted_tones(QueryModel model, std::size_t k) {
  return model == QueryModel::Superset ? std::max<std::size_t>(1, k / 2) : k;
}

std::vector<Index> choose_query(QueryModel model, std::span<const Index> planted, std::uint64_t n, std::size_t k,
                                std::mt19937_64& rng) {
  if (k < 1 || k > n) throw InvalidArgument("choose_query: need 1 <= k <= n");
  std::unordered_set<Index> taken(planted.begin(), planted.end());
  std::vector<Index> query;
  if (model == QueryModel::Disjoint) {
    query = draw_distinct(rng, n, k, taken);
  } else {
    if (planted.size() > k) throw InvalidArgument("choose_query: more planted tones than queries");
    query.assign(planted.begin(), planted.end());
    const auto extra = draw_distinct(rng, n, k - planted.size(), taken);
    query.insert(query.end(), extra.begin(), extra.end());
  }
  std::sort(query.begin(), query.end());
  return query;
}

void ExperimentConfig::validate() const {
  if (!is_power_of_two(n) || n < 2) throw InvalidArgument("config: n must be a power of two >= 2");
  if (k < 1 || k > n) throw InvalidArgument("config: k must lie in [1, n]");
  if (trials < 1) throw InvalidArgument("config: trials must be >= 1");
  if (!(noise_sigma >= 0.0)) throw InvalidArgument("config: noise sigma must be >= 0");
  // Remaining numeric checks are the schedule's preconditions.
  (void)compute_schedule(k, eps, delta, n, constants);
}

TrialFailure::TrialFailure(std::size_t trial, std::uint64_t seed, const std::string& what)
    : std::runtime_error("trial " + std::to_string(trial) + " (seed " + std::to_string(seed) + "): " + what),
      trial_(trial),
      seed_(seed) {}

namespace {

TrialRecord evaluate_trial(const ExperimentConfig& config, const Schedule& schedule, std::size_t trial,
                           FilterCache* filters) {
  TrialRecord rec;
  rec.trial = trial;
  rec.seed = derive_seed(config.seed, trial);
  std::mt19937_64 rng(rec.seed);

  SignalSpec spec;
  spec.model = config.signal_model;
  spec.tones = planted_tones(config.query_model, config.k);
  spec.noise_sigma = config.noise_sigma;
  spec.stress_buckets = schedule.rows.front().buckets;
  auto generated = generate_signal(spec, config.n, rng);
  const auto query = choose_query(config.query_model, generated.planted, config.n, config.k, rng);

  // Ground truth from the time samples actually handed to the algorithm.
  const auto xhat = config.n <= 4096 ? dft_oracle(generated.time) : fft(generated.time);
  Signal x(std::move(generated.time));

  const auto report = fourier_set_query(x, query, schedule, rng, filters);

  double peak = 0.0;
  for (const auto& v : xhat) peak = std::max(peak, std::abs(v));
  std::vector<char> in_s(config.n, 0);
  double lhs = 0.0;
  double worst = 0.0;
  for (const Index i : query) {
    in_s[i] = 1;
    const double diff = std::abs(report.estimate.get(i) - xhat[i]);
    lhs += diff * diff;
    const double scale = std::abs(xhat[i]) >= 1e-9 * peak ? std::abs(xhat[i]) : peak;
    if (scale > 0.0) worst = std::max(worst, diff / scale);
  }
  double tail = 0.0;
  for (std::size_t i = 0; i < xhat.size(); ++i) {
    if (!in_s[i]) tail += std::norm(xhat[i]);
  }
  const double l1 = norm1(xhat);
  const double l1_sq = l1 * l1;

  rec.error_lhs = lhs;
  rec.error_rhs_theorem = config.eps * tail + config.delta * l1_sq;
  rec.error_rhs_proof = config.eps * (tail + config.delta * config.delta * static_cast<double>(config.n) * l1_sq);
  rec.max_relative_error = worst;
  rec.samples = report.samples_used;
  rec.unresolved = report.unresolved.size();
  rec.rounds = report.iterations.size();
  rec.clamped = std::any_of(report.iterations.begin(), report.iterations.end(),
                            [](const IterationRecord& it) { return it.row.clamped; });
  rec.wall_time_ns = config.record_timing ? report.wall_time.count() : 0;
  rec.success_theorem = rec.error_lhs <= rec.error_rhs_theorem;
  rec.success_proof = rec.error_lhs <= rec.error_rhs_proof;
  return rec;
}

std::int64_t percentile(std::vector<std::int64_t> values, double q) {
  if (values.empty()) return 0;
  std::sort(values.begin(), values.end());
  const auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(values.size())));
  return values[std::clamp<std::size_t>(rank, 1, values.size()) - 1];
}

ExperimentSummary summarize(const ExperimentConfig& config, const Schedule& schedule,
                            const std::vector<TrialRecord>& records) {
  ExperimentSummary s;
  s.trials = records.size();
  s.schedule = schedule.rows;
  if (records.empty()) return s;
  std::size_t ok_theorem = 0;
  std::size_t ok_proof = 0;
  double samples = 0.0;
  s.samples_min = records.front().samples;
  std::vector<std::int64_t> times;
  for (const auto& r : records) {
    ok_theorem += r.success_theorem ? 1 : 0;
    ok_proof += r.success_proof ? 1 : 0;
    samples += static_cast<double>(r.samples);
    s.samples_min = std::min(s.samples_min, r.samples);
    s.samples_max = std::max(s.samples_max, r.samples);
    times.push_back(r.wall_time_ns);
  }
  const double count = static_cast<double>(records.size());
  s.success_rate_theorem = static_cast<double>(ok_theorem) / count;
  s.success_rate_proof = static_cast<double>(ok_proof) / count;
  s.samples_mean = samples / count;
  s.samples_fraction = s.samples_mean / static_cast<double>(config.n);
  const double scale = static_cast<double>(config.k) / config.eps *
                       std::log(static_cast<double>(config.n) / config.delta);
  s.fitted_constant = s.samples_mean / scale;
  s.time_p50_ns = percentile(times, 0.5);
  s.time_p90_ns = percentile(times, 0.9);
  s.time_max_ns = percentile(times, 1.0);
  return s;
}

}  // namespace

TrialRecord run_trial(const ExperimentConfig& config, std::size_t trial, FilterCache* filters) {
  config.validate();
  const auto schedule = compute_schedule(config.k, config.eps, config.delta, config.n, config.constants);
  try {
    return evaluate_trial(config, schedule, trial, filters);
  } catch (const std::exception& e) {
    throw TrialFailure(trial, derive_seed(config.seed, trial), e.what());
  }
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  const auto schedule = compute_schedule(config.k, config.eps, config.delta, config.n, config.constants);

  ExperimentResult result;
  result.config = config;
  result.records.resize(config.trials);

  FilterCache filters;
  std::atomic<std::size_t> next{0};
  std::mutex failure_mutex;
  std::optional<TrialFailure> failure;

  auto worker = [&] {
    for (;;) {
      const std::size_t trial = next.fetch_add(1);
      if (trial >= config.trials) return;
      try {
        result.records[trial] = evaluate_trial(config, schedule, trial, &filters);
      } catch (const std::exception& e) {
        std::lock_guard lock(failure_mutex);
        if (!failure || failure->trial() > trial) failure.emplace(trial, derive_seed(config.seed, trial), e.what());
      }
    }
  };

  unsigned threads = config.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : config.threads;
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, config.trials));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
  }
  if (failure) throw *failure;

  result.summary = summarize(config, schedule, result.records);
  return result;
}

namespace {

json record_json(const TrialRecord& r, bool timing) {
  json j = {{"trial", r.trial},
            {"seed", r.seed},
            {"error_lhs", r.error_lhs},
            {"error_rhs_theorem", r.error_rhs_theorem},
            {"error_rhs_proof", r.error_rhs_proof},
            {"max_relative_error", r.max_relative_error},
            {"samples", r.samples},
            {"unresolved", r.unresolved},
            {"rounds", r.rounds},
            {"clamped", r.clamped},
            {"success_theorem", r.success_theorem},
            {"success_proof", r.success_proof}};
  if (timing) j["wall_time_ns"] = r.wall_time_ns;
  return j;
}

json schedule_json(const std::vector<ScheduleRow>& rows) {
  json out = json::array();
  for (const auto& row : rows) {
    out.push_back({{"iteration", row.iteration},
                   {"k", row.k},
                   {"eps", row.eps},
                   {"eps_capped", row.eps_capped},
                   {"alpha", row.alpha},
                   {"buckets_raw", row.buckets_raw},
                   {"buckets", row.buckets},
                   {"clamped", row.clamped}});
  }
  return out;
}

json config_json(const ExperimentConfig& c) {
  return {{"n", c.n},
          {"k", c.k},
          {"eps", c.eps},
          {"delta", c.delta},
          {"gamma", c.constants.gamma},
          {"C", c.constants.C},
          {"alpha_const", c.constants.alpha_const},
          {"trials", c.trials},
          {"seed", c.seed},
          {"signal_model", to_string(c.signal_model)},
          {"noise_sigma", c.noise_sigma},
          {"query_model", to_string(c.query_model)}};
}

json summary_json(const ExperimentResult& r) {
  const auto& s = r.summary;
  json j = {{"config", config_json(r.config)},
            {"trials", s.trials},
            {"success_rate_theorem", s.success_rate_theorem},
            {"success_rate_proof", s.success_rate_proof},
            {"samples_mean", s.samples_mean},
            {"samples_min", s.samples_min},
            {"samples_max", s.samples_max},
            {"samples_fraction", s.samples_fraction},
            {"fitted_constant", s.fitted_constant},
            {"schedule", schedule_json(s.schedule)}};
  if (r.config.record_timing) {
    j["time_p50_ns"] = s.time_p50_ns;
    j["time_p90_ns"] = s.time_p90_ns;
    j["time_max_ns"] = s.time_max_ns;
  }
  return j;
}

}  // namespace

std::string to_jsonl(const ExperimentResult& result) {
  std::string out;
  for (const auto& r : result.records) {
    out += record_json(r, result.config.record_timing).dump();
    out += '\n';
  }
  out += json{{"summary", summary_json(result)}}.dump();
  out += '\n';
  return out;
}

std::string summary_csv_header() {
  return "n,k,eps,delta,gamma,C,alpha_const,trials,seed,signal_model,query_model,success_rate_theorem,"
         "success_rate_proof,samples_mean,samples_min,samples_max,samples_fraction,fitted_constant,"
         "time_p50_ns,time_p90_ns,time_max_ns";
}

std::string summary_csv_row(const ExperimentResult& result) {
  const auto& c = result.config;
  const auto& s = result.summary;
  // json::dump gives shortest round-trip doubles, matching the JSON output.
  auto num = [](double v) { return json(v).dump(); };
  std::ostringstream os;
  os << c.n << ',' << c.k << ',' << num(c.eps) << ',' << num(c.delta) << ',' << num(c.constants.gamma) << ','
     << num(c.constants.C) << ',' << num(c.constants.alpha_const) << ',' << c.trials << ',' << c.seed << ','
     << to_string(c.signal_model) << ',' << to_string(c.query_model) << ',' << num(s.success_rate_theorem) << ','
     << num(s.success_rate_proof) << ',' << num(s.samples_mean) << ',' << s.samples_min << ',' << s.samples_max
     << ',' << num(s.samples_fraction) << ',' << num(s.fitted_constant) << ',' << s.time_p50_ns << ','
     << s.time_p90_ns << ',' << s.time_max_ns;
  return os.str();
}

// ---------------------------------------------------------------------------
// Claim suite.

bool VerificationReport::all_passed() const {
  return std::all_of(claims.begin(), claims.end(), [](const ClaimResult& c) { return c.passed; });
}

EventSetup make_event_setup(std::uint64_t n, std::size_t query_size, std::uint64_t buckets, double alpha,
                            std::mt19937_64& rng) {
  if (query_size < 1 || 8 * query_size + 300 > n) throw InvalidArgument("make_event_setup: n too small");
  EventSetup setup;
  setup.n = n;
  setup.buckets = buckets;
  setup.alpha = alpha;
  setup.k = query_size;
  setup.residual.assign(n, cplx{});

  std::unordered_set<Index> taken;
  setup.query = draw_distinct(rng, n, query_size, taken);
  setup.t = setup.query.front();
  for (const Index i : setup.query) setup.residual[i] = random_phase(rng);

  for (const Index i : draw_distinct(rng, n, 4 * query_size, taken)) setup.residual[i] = 0.5 * random_phase(rng);
  for (const std::int64_t d : {-2, -1, 1, 2}) {
    const Index i = static_cast<Index>(static_cast<std::int64_t>(setup.t) + d) & (n - 1);
    if (taken.insert(i).second) setup.residual[i] = 0.3 * random_phase(rng);
  }
  std::normal_distribution<double> gauss(0.0, 0.05);
  for (const Index i : draw_distinct(rng, n, 256, taken)) setup.residual[i] = {gauss(rng), gauss(rng)};
  return setup;
}

namespace {

ClaimResult event_claim(const std::string& name, const EventStats& stats) {
  ClaimResult c;
  c.name = name;
  c.passed = stats.consistent(3.0);
  c.measured = stats.rate;
  c.bound = stats.bound;
  c.std_err = stats.std_err;
  c.detail = std::to_string(stats.hits) + "/" + std::to_string(stats.trials) +
             (stats.lower_bound ? " (rate >= bound - 3 SE)" : " (rate <= bound + 3 SE)");
  return c;
}

std::string fmt_alpha(double alpha) { return "1/" + std::to_string(static_cast<int>(std::lround(1.0 / alpha))); }

}  // namespace

std::vector<ClaimResult> event_bound_claims(const VerificationConfig& config) {
  std::vector<ClaimResult> out;
  std::uint64_t stream = 1000;
  const std::uint64_t bucket_grid[] = {32, 64, 128};
  const std::size_t size_grid[] = {4, 8, 16};
  const double alpha_grid[] = {1.0 / 8.0, 1.0 / 16.0};

  for (const auto B : bucket_grid) {
    for (const auto s : size_grid) {
      std::mt19937_64 rng(derive_seed(config.seed, stream++));
      EventSetup setup;
      setup.n = config.hash_event_n;
      setup.buckets = B;
      std::unordered_set<Index> taken;
      setup.query = draw_distinct(rng, setup.n, s, taken);
      setup.t = setup.query.front();
      const auto stats = event_rate(Event::Collision, setup, config.event_trials, rng);
      out.push_back(event_claim("collision B=" + std::to_string(B) + " |S|=" + std::to_string(s), stats));
    }
    for (const auto alpha : alpha_grid) {
      std::mt19937_64 rng(derive_seed(config.seed, stream++));
      EventSetup setup;
      setup.n = config.hash_event_n;
      setup.buckets = B;
      setup.alpha = alpha;
      setup.t = uniform_index(rng, setup.n);
      setup.query = {setup.t};
      const auto stats = event_rate(Event::LargeOffset, setup, config.event_trials, rng);
      out.push_back(event_claim("large_offset B=" + std::to_string(B) + " alpha=" + fmt_alpha(alpha), stats));
    }
    for (const auto s : size_grid) {
      for (const auto alpha : alpha_grid) {
        std::mt19937_64 rng(derive_seed(config.seed, stream++));
        const auto setup = make_event_setup(config.noise_event_n, s, B, alpha, rng);
        const std::string tag = " B=" + std::to_string(B) + " |S|=" + std::to_string(s) + " alpha=" + fmt_alpha(alpha);
        out.push_back(event_claim("large_noise" + tag, event_rate(Event::LargeNoise, setup, config.event_trials, rng)));
        out.push_back(
            event_claim("well_isolated" + tag, event_rate(Event::WellIsolated, setup, config.event_trials, rng)));
      }
    }
  }
  return out;
}

namespace {

std::vector<cplx> random_vector(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<cplx> v(n);
  for (auto& e : v) e = {gauss(rng), gauss(rng)};
  return v;
}

ClaimResult claim(std::string name, bool passed, double measured, double bound, std::string detail = {}) {
  ClaimResult c;
  c.name = std::move(name);
  c.passed = passed;
  c.measured = measured;
  c.bound = bound;
  c.detail = std::move(detail);
  return c;
}

}  // namespace

VerificationReport run_verification_suite(const VerificationConfig& config) {
  VerificationReport report;
  auto& claims = report.claims;
  const std::uint64_t n = config.n;
  if (!is_power_of_two(n) || n < 64) {
    claims.push_back(claim("config", false, static_cast<double>(n), 64.0, "n must be a power of two >= 64"));
    return report;
  }
  std::uint64_t stream = 0;
  auto rng_for = [&] { return std::mt19937_64(derive_seed(config.seed, stream++)); };

  // Transform agreement.
  {
    auto rng = rng_for();
    double worst = 0.0;
    for (std::uint64_t m = 2; m <= std::min<std::uint64_t>(n, 1024); m *= 2) {
      const auto x = random_vector(rng, m);
      const auto a = fft(x);
      const auto b = dft_oracle(x);
      for (std::size_t i = 0; i < m; ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
    }
    claims.push_back(claim("fft_matches_oracle", worst <= 1e-9, worst, 1e-9));
  }

  // Omega sums.
  {
    double worst = 0.0;
    for (std::uint64_t i = 1; i < n; ++i) worst = std::max(worst, std::abs(check_omega_sum(n, i)));
    claims.push_back(claim("omega_sum_nonzero_residues", worst <= 1e-12, worst, 1e-12, "i in [1, n)"));
    const double dev = std::abs(check_omega_sum(n, 0) - cplx{1.0, 0.0});
    claims.push_back(claim("omega_sum_zero_residue", dev <= 1e-12, dev, 1e-12, "sum is 1 at i = 0"));
  }

  // Expectation identities.
  {
    auto rng = rng_for();
    const std::uint64_t m = std::min<std::uint64_t>(n, 256);
    const auto x = random_vector(rng, m);
    const std::uint64_t sigma = 2 * std::uniform_int_distribution<std::uint64_t>(0, m / 2 - 1)(rng) + 1;
    const auto e = check_complex_expectation(x, sigma);
    const double rel = std::abs(e.mean - e.target) / e.target;
    claims.push_back(claim("complex_expectation", rel <= 1e-10, rel, 1e-10, "relative, exact enumeration"));

    std::vector<double> reals(16);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (auto& v : reals) v = gauss(rng);
    const auto p = check_pairwise_expectation(reals, 100000, rng);
    auto c = claim("pairwise_expectation", std::abs(p.mean - p.target) <= 3.0 * p.std_err, p.mean, p.target,
                   "|mean - target| <= 3 SE");
    c.std_err = p.std_err;
    claims.push_back(c);
  }

  // Spectrum permutation identity.
  {
    auto rng = rng_for();
    double worst = 0.0;
    for (int rep = 0; rep < 10; ++rep) {
      Signal x(random_vector(rng, n));
      const auto p = sample_params(rng, n);
      std::vector<cplx> px(n);
      for (Index i = 0; i < n; ++i) px[i] = permute_time(x, p, i);
      const auto lhs = fft(px);
      const auto xhat = fft(x.raw());
      for (Index f = 0; f < n; ++f) {
        worst = std::max(worst, std::abs(lhs[permute_freq(p, f)] - xhat[f] * permutation_phase(p, f)));
      }
    }
    claims.push_back(claim("permutation_identity", worst <= 1e-9, worst, 1e-9, "10 random (x, sigma, a, b)"));
  }

  // Hashing: pi bijective, offsets bounded, bucket + offset reconstructs pi.
  {
    auto rng = rng_for();
    std::size_t violations = 0;
    for (int rep = 0; rep < 10; ++rep) {
      const auto p = sample_params(rng, n);
      for (const std::uint64_t B : {std::uint64_t{2}, std::uint64_t{32}, n}) {
        std::vector<char> hit(n, 0);
        const std::int64_t half = static_cast<std::int64_t>(n / (2 * B));
        for (Index i = 0; i < n; ++i) {
          const Index pi = permute_freq(p, i);
          if (hit[pi]++) ++violations;
          const std::int64_t o = offset(p, B, i);
          if (std::abs(o) > half) ++violations;
          const auto rebuilt = static_cast<Index>(static_cast<std::int64_t>(hash_bin(p, B, i) * (n / B)) + o) & (n - 1);
          if (rebuilt != pi) ++violations;
        }
      }
    }
    claims.push_back(claim("hashing_consistency", violations == 0, static_cast<double>(violations), 0.0,
                           "bijection, |o| <= n/(2B), h n/B + o = pi"));
  }

  // Filters.
  for (const std::uint64_t B : {std::uint64_t{32}, std::uint64_t{64}}) {
    for (const double alpha : {0.25, 0.125}) {
      const std::string name = "filter B=" + std::to_string(B) + " alpha=" + fmt_alpha(alpha);
      if (B >= n) continue;
      try {
        const auto fp = build_filter(n, B, config.delta, alpha);
        const auto check = check_filter(fp);
        std::ostringstream detail;
        detail << "support " << fp.support_size() << ", c_f " << fp.support_ratio() << ", flat "
               << check.flat_region_ok << ", stop " << check.stop_region_ok << ", range " << check.range_ok;
        claims.push_back(claim(name, check.passed(config.delta), check.max_leakage, config.delta, detail.str()));
      } catch (const std::exception& e) {
        claims.push_back(claim(name, false, 0.0, config.delta, e.what()));
      }
    }
  }

  // HashToBins against the explicit bucket sum.
  {
    auto rng = rng_for();
    const std::uint64_t B = 32;
    double worst_ratio = 0.0;
    try {
      const auto fp = build_filter(n, B, config.delta, 0.25);
      for (int rep = 0; rep < 20; ++rep) {
        std::vector<cplx> xhat(n, cplx{});
        std::unordered_set<Index> taken;
        for (const Index i : draw_distinct(rng, n, B / 8, taken)) xhat[i] = random_phase(rng);
        std::normal_distribution<double> gauss(0.0, 0.01);
        for (auto& v : xhat) v += cplx{gauss(rng), gauss(rng)};
        SparseSpectrum zhat(n);
        for (const Index i : draw_distinct(rng, n, 3, taken)) zhat.set(i, 0.5 * random_phase(rng));
        Signal x(ifft(xhat));
        const auto p = sample_params(rng, n);
        const auto bins = hash_to_bins(x, zhat, p, fp);

        std::vector<cplx> expected(B, cplx{});
        for (Index i = 0; i < n; ++i) {
          const cplx v = xhat[i] - zhat.get(i);
          expected[hash_bin(p, B, i)] += v * eval_ghat(fp, -offset(p, B, i)) * permutation_phase(p, i);
        }
        const double budget = config.delta * norm1(xhat);
        for (std::size_t j = 0; j < B; ++j) {
          worst_ratio = std::max(worst_ratio, std::abs(bins.bins.values[j] - expected[j]) / budget);
        }
      }
      claims.push_back(claim("hash_to_bins_contract", worst_ratio <= 1.0, worst_ratio, 1.0,
                             "max |uhat_j - explicit_j| / (delta ||xhat||_1), 20 instances"));
    } catch (const std::exception& e) {
      claims.push_back(claim("hash_to_bins_contract", false, 0.0, 1.0, e.what()));
    }
  }

  // Mean-square estimation error on a well-isolated coordinate.
  if (n <= 4096) {
    auto rng = rng_for();
    const std::uint64_t B = 32;
    try {
      const auto fp = build_filter(n, B, config.delta, 0.25);
      std::vector<cplx> xhat(n, cplx{});
      std::unordered_set<Index> taken;
      const auto query = draw_distinct(rng, n, 4, taken);
      for (const Index i : query) xhat[i] = random_phase(rng);
      std::normal_distribution<double> gauss(0.0, 0.02);
      for (auto& v : xhat) v += cplx{gauss(rng), gauss(rng)};
      SparseSpectrum zhat(n);
      zhat.set(query[1], xhat[query[1]] * 0.9);
      Signal x(ifft(xhat));
      const Index t = query.front();

      VarianceCheck best;
      for (int attempt = 0; attempt < 64; ++attempt) {
        best = check_isolated_variance(x, xhat, zhat, t, query, sample_params(rng, n), fp, 4);
        if (best.well_isolated) break;
      }
      claims.push_back(claim("isolated_mean_square_error", best.well_isolated && best.mean_sq_error <= best.bound,
                             best.mean_sq_error, best.bound, "mean over all a, well-isolated (sigma, b)"));
    } catch (const std::exception& e) {
      claims.push_back(claim("isolated_mean_square_error", false, 0.0, 0.0, e.what()));
    }
  }

  const auto events = event_bound_claims(config);
  claims.insert(claims.end(), events.begin(), events.end());
  return report;
}

std::string to_json(const VerificationReport& report) {
  json claims = json::array();
  for (const auto& c : report.claims) {
    claims.push_back({{"name", c.name},
                      {"passed", c.passed},
                      {"measured", c.measured},
                      {"bound", c.bound},
                      {"std_err", c.std_err},
                      {"detail", c.detail}});
  }
  return json{{"all_passed", report.all_passed()}, {"claims", claims}}.dump(2);
}

std::string filter_info_json(std::uint64_t n, std::uint64_t buckets, double delta, double alpha) {
  const auto fp = build_filter(n, buckets, delta, alpha);
  const auto check = check_filter(fp);
  const char* verification = fp.verification == FilterVerification::DirectSum ? "direct-sum"
                             : fp.verification == FilterVerification::Fft     ? "fft"
                                                                              : "spot";
  json j = {{"n", fp.n},
            {"buckets", fp.buckets},
            {"delta", fp.delta},
            {"alpha", fp.alpha},
            {"box_half_width", fp.box_half_width},
            {"smoothing", fp.smoothing},
            {"support", fp.support_size()},
            {"support_ratio", fp.support_ratio()},
            {"support_constant", kFilterSupportConstant},
            {"full_support", fp.full_support},
            {"flat_edge", fp.flat_edge()},
            {"stop_edge", fp.stop_edge()},
            {"build_leakage", fp.measured_leakage},
            {"build_verification", verification},
            {"check",
             {{"max_leakage", check.max_leakage},
              {"flat_region_ok", check.flat_region_ok},
              {"stop_region_ok", check.stop_region_ok},
              {"range_ok", check.range_ok},
              {"support_ok", check.support_ok},
              {"checked_frequencies", check.checked_frequencies},
              {"passed", check.passed(delta)}}}};
  return j.dump(2);
}

}  // namespace fsq

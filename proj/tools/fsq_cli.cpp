// fsq: run set-query experiments, the claim suite, and filter reports.
//
// Exit codes: 0 success, 1 acceptance failure, 2 invalid configuration.

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fsq/filter.hpp"
#include "fsq/harness.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitAcceptance = 1;
constexpr int kExitInvalid = 2;

// Proof-form success rate needed for a run to count as accepted.
constexpr double kRequiredSuccessRate = 0.9;

struct CommonFlags {
  std::size_t trials = 1;
  std::uint64_t seed = 1;
  double delta = 1e-3;
  double gamma = fsq::kPracticalConstants.gamma;
  double const_c = fsq::kPracticalConstants.C;
  double alpha_const = fsq::kPracticalConstants.alpha_const;
  std::string signal_model = "sparse-plus-gaussian";
  double noise_sigma = 0.01;
  std::string query_model = "superset";
  std::string out;
  std::string format = "jsonl";
  unsigned threads = 1;
  bool no_timing = false;
};

void add_common(CLI::App* app, CommonFlags& f) {
  app->add_option("--trials", f.trials, "Number of seeded trials")->check(CLI::PositiveNumber);
  app->add_option("--seed", f.seed, "Master seed");
  app->add_option("--delta", f.delta, "Additive error parameter delta");
  app->add_option("--gamma", f.gamma, "Schedule shrink factor gamma");
  app->add_option("--const-c", f.const_c, "Bucket constant C");
  app->add_option("--alpha-const", f.alpha_const, "alpha_i = 1 / (alpha_const i^3)");
  app->add_option("--signal-model", f.signal_model, "Synthetic signal model")
      ->check(CLI::IsMember({"zero", "planted-sparse", "sparse-plus-gaussian", "adversarial-near-bucket"}));
  app->add_option("--noise-sigma", f.noise_sigma, "Per-component std of spectrum noise (sparse-plus-gaussian)");
  app->add_option("--query-model", f.query_model, "Query set relative to the planted support")
      ->check(CLI::IsMember({"exact-support", "superset", "disjoint"}));
  app->add_option("--out", f.out, "Output file (default: stdout)");
  app->add_option("--format", f.format, "Output format")->check(CLI::IsMember({"jsonl", "csv"}));
  app->add_option("--threads", f.threads, "Worker threads (0: all cores)");
  app->add_flag("--no-timing", f.no_timing, "Omit wall-clock fields so output is byte-reproducible");
}

fsq::ExperimentConfig make_config(const CommonFlags& f, std::uint64_t n, std::size_t k, double eps) {
  fsq::ExperimentConfig c;
  c.n = n;
  c.k = k;
  c.eps = eps;
  c.delta = f.delta;
  c.constants = {f.gamma, f.const_c, f.alpha_const};
  c.trials = f.trials;
  c.seed = f.seed;
  c.signal_model = *fsq::parse_signal_model(f.signal_model);
  c.noise_sigma = f.noise_sigma;
  c.query_model = *fsq::parse_query_model(f.query_model);
  c.threads = f.threads;
  c.record_timing = !f.no_timing;
  c.output_path = f.out;
  return c;
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) throw fsq::InvalidArgument("cannot open output file " + path);
  os << text;
}

std::string render(const std::vector<fsq::ExperimentResult>& results, const std::string& format) {
  std::string text;
  if (format == "csv") {
    text = fsq::summary_csv_header() + "\n";
    for (const auto& r : results) text += fsq::summary_csv_row(r) + "\n";
  } else {
    for (const auto& r : results) text += fsq::to_jsonl(r);
  }
  return text;
}

bool accepted(const fsq::ExperimentResult& r) { return r.summary.success_rate_proof >= kRequiredSuccessRate; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sublinear Fourier set query: experiments and checks"};
  app.require_subcommand(1);

  CommonFlags query_flags;
  std::uint64_t query_n = 4096;
  std::size_t query_k = 8;
  double query_eps = 0.5;
  auto* query = app.add_subcommand("query", "Run one configuration");
  query->add_option("--n", query_n, "Signal length (power of two)");
  query->add_option("--k", query_k, "Query set size");
  query->add_option("--eps", query_eps, "Multiplicative error parameter");
  add_common(query, query_flags);

  CommonFlags bench_flags;
  bench_flags.trials = 20;
  std::vector<std::uint64_t> bench_n{1024, 4096};
  std::vector<std::size_t> bench_k{4, 8, 16};
  std::vector<double> bench_eps{0.25, 0.5};
  auto* bench = app.add_subcommand("bench", "Run a grid of configurations (comma-separated lists)");
  bench->add_option("--n", bench_n, "Signal lengths")->delimiter(',');
  bench->add_option("--k", bench_k, "Query set sizes")->delimiter(',');
  bench->add_option("--eps", bench_eps, "Error parameters")->delimiter(',');
  add_common(bench, bench_flags);

  fsq::VerificationConfig verify_config;
  std::string verify_out;
  auto* verify = app.add_subcommand("verify", "Run the claim suite");
  verify->add_option("--n", verify_config.n, "Signal length for transform, filter and identity checks");
  verify->add_option("--delta", verify_config.delta, "Filter leakage bound");
  verify->add_option("--trials", verify_config.event_trials, "Monte Carlo draws per event rate")
      ->check(CLI::Range(std::size_t{1000}, std::size_t{100000000}));
  verify->add_option("--seed", verify_config.seed, "Master seed");
  verify->add_option("--out", verify_out, "Output file (default: stdout)");

  std::uint64_t filter_n = 4096;
  std::uint64_t filter_b = 64;
  double filter_delta = 1e-3;
  double filter_alpha = 0.25;
  auto* filter_info = app.add_subcommand("filter-info", "Build a filter and report its properties");
  filter_info->add_option("--n", filter_n, "Signal length");
  filter_info->add_option("--buckets,-B", filter_b, "Bucket count");
  filter_info->add_option("--delta", filter_delta, "Leakage bound");
  filter_info->add_option("--alpha", filter_alpha, "Transition fraction");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInvalid;
  }

  try {
    if (query->parsed()) {
      const auto config = make_config(query_flags, query_n, query_k, query_eps);
      config.validate();
      const auto result = fsq::run_experiment(config);
      emit(render({result}, query_flags.format), query_flags.out);
      return accepted(result) ? kExitOk : kExitAcceptance;
    }
    if (bench->parsed()) {
      std::vector<fsq::ExperimentConfig> configs;
      for (const auto n : bench_n) {
        for (const auto k : bench_k) {
          for (const auto eps : bench_eps) {
            configs.push_back(make_config(bench_flags, n, k, eps));
            configs.back().validate();
          }
        }
      }
      std::vector<fsq::ExperimentResult> results;
      bool ok = true;
      for (const auto& c : configs) {
        results.push_back(fsq::run_experiment(c));
        ok = ok && accepted(results.back());
      }
      emit(render(results, bench_flags.format), bench_flags.out);
      return ok ? kExitOk : kExitAcceptance;
    }
    if (verify->parsed()) {
      const auto report = fsq::run_verification_suite(verify_config);
      emit(fsq::to_json(report) + "\n", verify_out);
      return report.all_passed() ? kExitOk : kExitAcceptance;
    }
    if (filter_info->parsed()) {
      std::cout << fsq::filter_info_json(filter_n, filter_b, filter_delta, filter_alpha) << "\n";
      return kExitOk;
    }
  } catch (const fsq::InvalidArgument& e) {
    std::cerr << "invalid configuration: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const fsq::FilterBuildError& e) {
    std::cerr << "filter build failed: " << e.what() << " (achieved leakage " << e.achieved_leakage() << ")\n";
    return kExitAcceptance;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitAcceptance;
  }
  return kExitOk;
}

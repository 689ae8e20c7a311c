#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "fdpenv/envelope.hpp"
#include "fdpenv/models.hpp"
#include "fdpenv/online.hpp"

// Replicated-experiment front end: config records (JSON-serializable),
// the parallel replication runner, coverage/consistency aggregation, and the
// CSV interfaces.

namespace fdpenv {

enum class Setting { kTopk, kPreordered, kOnline };
std::string_view setting_name(Setting s);
Setting setting_from_name(std::string_view name);

// An envelope method plus its adaptive/interpolated variants, e.g.
// "wellner+adapt+interp".
struct MethodSpec {
  Method method = Method::kSimes;
  bool adaptive = false;
  bool interpolated = false;

  std::string name() const;
  static MethodSpec parse(std::string_view token);
};

struct LordParams {
  double w0_frac = 0.5;        // W0 = w0_frac * alpha
  double gamma_exponent = 1.6;
  bool raw_gamma = false;      // skip the sum-to-one normalization
};

struct ExperimentConfig {
  Setting setting = Setting::kTopk;

  // model parameters (per setting; m comes from m_grid)
  GaussianLocationConfig gaussian;  // topk (gaussian.m is ignored)
  VctConfig vct;                    // preordered
  OnlineMixtureConfig mixture;      // online (mixture.length is ignored)

  std::vector<std::size_t> m_grid = {100};  // stream lengths in the online setting
  std::vector<double> alpha_grid = {0.2};
  double delta = 0.25;
  std::size_t replications = 1000;
  std::vector<MethodSpec> methods;
  std::uint64_t seed = 20230817;

  double s = 0.5;       // preordered thresholds
  double lambda = 0.5;
  LordParams lord;

  bool compute_coverage = true;
  std::size_t interp_max_m = 100000;  // skip interpolated variants above this m
  std::size_t threads = 0;            // 0 = hardware concurrency

  void validate() const;
  std::string to_json() const;
  static ExperimentConfig from_json(const std::string& text);
  static ExperimentConfig load(const std::string& path);
  void save(const std::string& path) const;
};

struct SummaryRow {
  std::size_t m = 0;
  double alpha = 0.0;
  std::string method;
  double q25 = 0.0, median = 0.0, q75 = 0.0;  // bound at the reference procedure
  double coverage_rate = 0.0;                 // uniform-in-k event frequency
  double mean_rejections = 0.0;
  double wall_time_ms = 0.0;
};

std::vector<SummaryRow> run_experiment(const ExperimentConfig& cfg);

struct ConsistencySeries {
  std::string method;
  double alpha = 0.0;
  std::vector<std::pair<std::size_t, double>> gaps;  // (m, median_bound - alpha)
  double loglog_slope = 0.0;
};

// Gap series and fitted log-log slope per (method, alpha); needs rows spanning
// at least 3 values of m.
std::vector<ConsistencySeries> consistency_curve(const std::vector<SummaryRow>& rows);

// CSV I/O. Schema of p-value files: header "index,pvalue[,label]", decimal
// values in [0,1]; doubles are emitted with 17 significant digits.
PValueBatch load_pvalues_csv(const std::string& path);
PValueBatch read_pvalues_csv(std::istream& in, const std::string& origin);
void emit_pvalues_csv(const PValueBatch& batch, std::ostream& out);
void emit_summary_csv(const std::vector<SummaryRow>& rows, Setting setting,
                      std::ostream& out, bool include_timing = false);
void emit_consistency_csv(const std::vector<ConsistencySeries>& series,
                          Setting setting, std::ostream& out);
std::string format_double(double v);  // shortest 17-significant-digit form

// Work queue over [0, n); fn must be safe to call concurrently on distinct
// indices. Exceptions abort the run and are rethrown on the calling thread.
void parallel_for(std::size_t n, std::size_t threads,
                  const std::function<void(std::size_t)>& fn);

// Per-step record of one online run; bounds are the envelope values after
// each step.
struct OnlineRun {
  std::vector<double> alphas;
  std::vector<std::uint8_t> rejected;
  std::vector<std::int64_t> rejections_prefix;
  std::vector<double> bound_freed, bound_kr, bound_kru;
  OnlineState final_state;
};

OnlineRun run_lord_stream(const std::vector<double>& pvalues, double alpha,
                          const LordParams& lord, double delta,
                          bool record_bounds);

}  // namespace fdpenv

// Command-line front end: replicated experiments, coverage estimation,
// consistency curves, LORD stream processing, and envelope evaluation on
// p-value CSV files. Errors are reported as a JSON object on stderr and a
// nonzero exit code.

#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fdpenv/harness.hpp"
#include "fdpenv/numerics.hpp"
#include "json.hpp"

namespace {

using namespace fdpenv;

std::unique_ptr<std::ofstream> open_out(const std::string& path,
                                        std::ostream*& out) {
  if (path.empty() || path == "-") {
    out = &std::cout;
    return nullptr;
  }
  auto file = std::make_unique<std::ofstream>(path);
  if (!*file) throw std::runtime_error("cannot write " + path);
  out = file.get();
  return file;
}

std::vector<MethodSpec> parse_methods(const std::vector<std::string>& tokens,
                                      Setting setting, bool all_variants) {
  std::vector<MethodSpec> specs;
  std::vector<std::string> base = tokens;
  if (base.empty()) {
    if (setting == Setting::kTopk)
      base = {"simes", "dkw", "kr", "wellner", "hybrid"};
    else
      base = {"freedman", "kr", "kru"};
  }
  for (const std::string& token : base) {
    const MethodSpec spec = MethodSpec::parse(token);
    specs.push_back(spec);
    if (all_variants && !spec.adaptive && !spec.interpolated) {
      if (setting == Setting::kTopk) {
        MethodSpec a = spec;
        a.adaptive = true;
        specs.push_back(a);
        MethodSpec ai = a;
        ai.interpolated = true;
        specs.push_back(ai);
      }
      MethodSpec i = spec;
      i.interpolated = true;
      specs.push_back(i);
    }
  }
  return specs;
}

struct CommonFlags {
  std::vector<std::size_t> m_grid;
  std::vector<double> alpha_grid;
  double delta = 0.25;
  std::size_t reps = 1000;
  std::vector<std::string> methods;
  std::uint64_t seed = 20230817;
  std::string out_path;
  std::string config_path;
  std::string save_config_path;
  std::string dump_data_path;
  bool full = false;
  bool timing = false;
  bool all_variants = false;
  std::size_t threads = 0;
  std::size_t interp_max_m = 100000;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--m", flags.m_grid, "grid of m (or stream lengths)");
  cmd->add_option("--alpha", flags.alpha_grid, "grid of target FDR levels");
  cmd->add_option("--delta", flags.delta, "envelope confidence parameter");
  cmd->add_option("--reps", flags.reps, "number of replications");
  cmd->add_option("--methods", flags.methods,
                  "method tokens, e.g. wellner+adapt+interp");
  cmd->add_option("--seed", flags.seed, "master seed");
  cmd->add_option("--out", flags.out_path, "output CSV path (default stdout)");
  cmd->add_option("--config", flags.config_path, "load experiment config JSON");
  cmd->add_option("--save-config", flags.save_config_path,
                  "write the effective config JSON");
  cmd->add_option("--dump-data", flags.dump_data_path,
                  "write replication 0 data as index,pvalue,label CSV");
  cmd->add_option("--threads", flags.threads, "worker threads (0 = auto)");
  cmd->add_option("--interp-max-m", flags.interp_max_m,
                  "largest m for interpolated variants");
  cmd->add_flag("--full", flags.full, "extend the default m grid to 1e6");
  cmd->add_flag("--timing", flags.timing,
                "append wall_time_ms to the CSV (breaks byte-determinism)");
  cmd->add_flag("--all-variants", flags.all_variants,
                "expand methods with adaptive/interpolated variants");
}

void apply_common(ExperimentConfig& cfg, const CommonFlags& flags,
                  const CLI::App* cmd) {
  if (cmd->count("--m")) cfg.m_grid = flags.m_grid;
  if (cmd->count("--alpha")) cfg.alpha_grid = flags.alpha_grid;
  if (cmd->count("--delta")) cfg.delta = flags.delta;
  if (cmd->count("--reps")) cfg.replications = flags.reps;
  if (cmd->count("--seed")) cfg.seed = flags.seed;
  if (cmd->count("--threads")) cfg.threads = flags.threads;
  if (cmd->count("--interp-max-m")) cfg.interp_max_m = flags.interp_max_m;
  if (cmd->count("--methods") || cfg.methods.empty() || flags.all_variants)
    cfg.methods = parse_methods(flags.methods, cfg.setting, flags.all_variants);
  if (flags.full)
    for (std::size_t extra : {std::size_t{1000000}})
      if (std::find(cfg.m_grid.begin(), cfg.m_grid.end(), extra) == cfg.m_grid.end())
        cfg.m_grid.push_back(extra);
}

void dump_first_replication(const ExperimentConfig& cfg, const std::string& path) {
  Rng rng = make_replication_rng(cfg.seed, 0);
  PValueBatch batch;
  switch (cfg.setting) {
    case Setting::kTopk: {
      GaussianLocationConfig g = cfg.gaussian;
      g.m = cfg.m_grid.front();
      batch = gen_gaussian_topk(g, rng);
      break;
    }
    case Setting::kPreordered: {
      const PreorderedData data =
          gen_vct(cfg.vct, cfg.m_grid.front(), cfg.s, cfg.lambda, rng);
      batch.values = data.pvalues;
      batch.labels = data.labels;
      break;
    }
    case Setting::kOnline: {
      OnlineMixtureConfig mc = cfg.mixture;
      mc.length = cfg.m_grid.front();
      const OnlineStream stream = gen_online_mixture(mc, rng);
      batch.values = stream.pvalues;
      batch.labels = stream.labels;
      break;
    }
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  emit_pvalues_csv(batch, out);
}

int run_setting_command(ExperimentConfig cfg, const CommonFlags& flags,
                        const CLI::App* cmd, bool consistency_output) {
  if (!flags.config_path.empty()) {
    const Setting expected = cfg.setting;
    cfg = ExperimentConfig::load(flags.config_path);
    if (cfg.setting != expected)
      throw std::runtime_error("config file setting does not match the subcommand");
  }
  apply_common(cfg, flags, cmd);
  cfg.validate();
  if (!flags.save_config_path.empty()) cfg.save(flags.save_config_path);
  if (!flags.dump_data_path.empty())
    dump_first_replication(cfg, flags.dump_data_path);

  const std::vector<SummaryRow> rows = run_experiment(cfg);
  std::ostream* out = nullptr;
  auto holder = open_out(flags.out_path, out);
  if (consistency_output) {
    emit_consistency_csv(consistency_curve(rows), cfg.setting, *out);
  } else {
    emit_summary_csv(rows, cfg.setting, *out, flags.timing);
  }
  return 0;
}

int run_stream_command(const std::string& stream_path, double alpha,
                       double delta, const LordParams& lord,
                       const std::string& out_path) {
  std::istream* in = &std::cin;
  std::ifstream file;
  if (stream_path != "-") {
    file.open(stream_path);
    if (!file) throw std::runtime_error("cannot open " + stream_path);
    in = &file;
  }
  std::vector<double> pvalues;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(*in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::size_t used = 0;
    double p = 0.0;
    try {
      p = std::stod(line, &used);
    } catch (...) {
      throw std::runtime_error("stream line " + std::to_string(lineno) +
                               ": malformed p-value");
    }
    if (used != line.size() || !(p >= 0.0) || !(p <= 1.0))
      throw std::runtime_error("stream line " + std::to_string(lineno) +
                               ": p-value outside [0,1]");
    pvalues.push_back(p);
  }
  const OnlineRun run = run_lord_stream(pvalues, alpha, lord, delta, true);
  std::ostream* out = nullptr;
  auto holder = open_out(out_path, out);
  *out << "k,alpha_k,rejected,R_k,bound_freed,bound_kr,bound_kru\n";
  for (std::size_t i = 0; i < pvalues.size(); ++i) {
    *out << (i + 1) << ',' << format_double(run.alphas[i]) << ','
         << static_cast<int>(run.rejected[i]) << ',' << run.rejections_prefix[i]
         << ',' << format_double(run.bound_freed[i]) << ','
         << format_double(run.bound_kr[i]) << ','
         << format_double(run.bound_kru[i]) << '\n';
  }
  return 0;
}

int run_real_data(const std::string& in_path, Setting setting, double alpha,
                  double delta, double s, double lambda,
                  const std::vector<std::string>& methods,
                  const LordParams& lord, const std::string& out_path) {
  const PValueBatch batch = load_pvalues_csv(in_path);
  std::ostream* out = nullptr;
  auto holder = open_out(out_path, out);

  switch (setting) {
    case Setting::kTopk: {
      const SortedPValues sp = SortedPValues::from(batch);
      std::vector<MethodSpec> specs = parse_methods(methods, setting, false);
      *out << "k,pvalue";
      for (const auto& ms : specs) *out << ",bound_" << ms.name();
      *out << '\n';
      std::vector<std::int64_t> sizes(sp.size());
      std::iota(sizes.begin(), sizes.end(), std::int64_t{1});
      std::vector<Envelope> envs;
      for (const auto& ms : specs) {
        Envelope env = ms.adaptive
                           ? topk_envelope_adaptive(ms.method, sp, delta)
                           : topk_envelope(ms.method, sp, delta,
                                           static_cast<double>(sp.size()));
        if (ms.interpolated) env = interpolate(env, sizes);
        envs.push_back(std::move(env));
      }
      for (std::size_t k = 1; k <= sp.size(); ++k) {
        *out << k << ',' << format_double(sp.sorted[k - 1]);
        for (const auto& env : envs) *out << ',' << format_double(env.bounds[k - 1]);
        *out << '\n';
      }
      std::cerr << "bh_k_hat=" << bh_select(sp, alpha) << '\n';
      for (const auto& ms : specs)
        if (!ms.interpolated)
          std::cerr << "bh_bound_" << ms.name() << '='
                    << format_double(bh_fdp_bound(ms.method, sp, alpha, delta,
                                                  ms.adaptive))
                    << '\n';
      return 0;
    }
    case Setting::kPreordered: {
      PreorderedData data;
      data.pvalues = batch.values;
      data.labels = batch.labels;
      data.s = s;
      data.lambda = lambda;
      std::vector<MethodSpec> specs = parse_methods(methods, setting, false);
      *out << "k,pvalue";
      for (const auto& ms : specs) *out << ",bound_" << ms.name();
      *out << '\n';
      std::vector<Envelope> envs;
      const std::vector<std::int64_t> sizes = prefix_counts(data).below_s;
      for (const auto& ms : specs) {
        Envelope env = preordered_envelope(ms.method, data, delta);
        if (ms.interpolated) env = interpolate(env, sizes);
        envs.push_back(std::move(env));
      }
      for (std::size_t k = 1; k <= data.size(); ++k) {
        *out << k << ',' << format_double(data.pvalues[k - 1]);
        for (const auto& env : envs) *out << ',' << format_double(env.bounds[k - 1]);
        *out << '\n';
      }
      const LfSelection sel = lf_select(data, alpha);
      std::cerr << "lf_k_hat=" << sel.k_hat << " lf_r_hat=" << sel.r_hat << '\n';
      for (const auto& ms : specs)
        if (!ms.interpolated)
          std::cerr << "lf_bound_" << ms.name() << '='
                    << format_double(lf_fdp_bound(ms.method, data, alpha, delta))
                    << '\n';
      return 0;
    }
    case Setting::kOnline: {
      const OnlineRun run =
          run_lord_stream(batch.values, alpha, lord, delta, true);
      *out << "k,alpha_k,rejected,R_k,bound_freed,bound_kr,bound_kru\n";
      for (std::size_t i = 0; i < batch.values.size(); ++i) {
        *out << (i + 1) << ',' << format_double(run.alphas[i]) << ','
             << static_cast<int>(run.rejected[i]) << ','
             << run.rejections_prefix[i] << ','
             << format_double(run.bound_freed[i]) << ','
             << format_double(run.bound_kr[i]) << ','
             << format_double(run.bound_kru[i]) << '\n';
      }
      return 0;
    }
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"FDP confidence envelopes for top-k, pre-ordered and online testing"};
  app.require_subcommand(1);

  // --- topk ---
  CommonFlags topk_flags;
  ExperimentConfig topk_cfg;
  topk_cfg.setting = Setting::kTopk;
  topk_cfg.m_grid = {100, 1000, 10000, 100000};
  topk_cfg.alpha_grid = {0.2};
  CLI::App* topk = app.add_subcommand("topk", "top-k experiments (BH reference)");
  add_common(topk, topk_flags);
  topk->add_option("--model-b", topk_cfg.gaussian.b, "alternative mean offset b");
  topk->add_option("--model-c", topk_cfg.gaussian.c, "alternative fraction c");
  topk->add_option("--model-beta", topk_cfg.gaussian.beta, "sparsity beta");
  double topk_mu = 0.0;
  CLI::Option* topk_mu_opt =
      topk->add_option("--mu", topk_mu, "fixed alternative mean override");

  // --- preordered ---
  CommonFlags pre_flags;
  ExperimentConfig pre_cfg;
  pre_cfg.setting = Setting::kPreordered;
  pre_cfg.m_grid = {100, 1000, 10000, 100000};
  pre_cfg.alpha_grid = {0.2};
  CLI::App* pre = app.add_subcommand("preordered",
                                     "pre-ordered/knockoff experiments (LF reference)");
  add_common(pre, pre_flags);
  std::string pi_family = "knockoff";
  pre->add_option("--pi-family", pi_family, "pi curve: lf | knockoff");
  double pre_pi1 = 0.4, pre_pib = 2.0, pre_z = 30.0;
  pre->add_option("--pi1", pre_pi1, "LF curve pi1");
  pre->add_option("--pi-b", pre_pib, "LF curve decay b");
  pre->add_option("--z", pre_z, "knockoff curve decay z");
  pre->add_option("--model-beta", pre_cfg.vct.beta, "sparsity beta");
  std::string alt_kind = "binary";
  pre->add_option("--alt", alt_kind, "alternative law: gaussian | binary");
  double alt_mu = 1.5, alt_q = 0.9;
  pre->add_option("--alt-mu", alt_mu, "gaussian alternative shift");
  pre->add_option("--alt-q", alt_q, "binary alternative P(p=1/2)");
  std::string null_kind = "binary";
  pre->add_option("--null", null_kind, "null law: uniform | binary");
  pre->add_option("--s", pre_cfg.s, "selection threshold s");
  pre->add_option("--lambda", pre_cfg.lambda, "estimation threshold lambda");
  double s_alpha_frac = 0.0;
  CLI::Option* s_frac_opt = pre->add_option(
      "--s-alpha-frac", s_alpha_frac, "set s = frac * alpha (single alpha only)");

  // --- online ---
  CommonFlags online_flags;
  ExperimentConfig online_cfg;
  online_cfg.setting = Setting::kOnline;
  online_cfg.m_grid = {5000};
  online_cfg.alpha_grid = {0.2};
  CLI::App* online = app.add_subcommand("online",
                                        "online experiments / LORD stream runs");
  add_common(online, online_flags);
  online->add_option("--pi1", online_cfg.mixture.pi1, "alternative fraction");
  online->add_option("--mu", online_cfg.mixture.mu, "alternative shift");
  online->add_option("--w0-frac", online_cfg.lord.w0_frac, "W0 as a fraction of alpha");
  online->add_option("--gamma-exponent", online_cfg.lord.gamma_exponent,
                     "spending sequence exponent");
  online->add_flag("--raw-gamma", online_cfg.lord.raw_gamma,
                   "use the unnormalized spending sequence");
  std::string stream_path;
  online->add_option("--stream", stream_path,
                     "line-delimited p-value stream ('-' = stdin); emits the"
                     " per-step CSV instead of an experiment");

  // --- coverage ---
  CommonFlags cov_flags;
  std::string cov_setting = "topk";
  CLI::App* coverage = app.add_subcommand(
      "coverage", "uniform-in-k coverage experiment (all method variants)");
  coverage->add_option("--setting", cov_setting, "topk | preordered | online");
  add_common(coverage, cov_flags);

  // --- consistency ---
  CommonFlags cons_flags;
  std::string cons_setting = "topk";
  CLI::App* consistency = app.add_subcommand(
      "consistency", "median bound gap vs m with fitted log-log slopes");
  consistency->add_option("--setting", cons_setting, "topk | preordered | online");
  add_common(consistency, cons_flags);

  // --- real-data ---
  std::string rd_in, rd_setting = "topk", rd_out;
  double rd_alpha = 0.2, rd_delta = 0.25, rd_s = 0.5, rd_lambda = 0.5;
  std::vector<std::string> rd_methods;
  LordParams rd_lord;
  CLI::App* real = app.add_subcommand("real-data",
                                      "evaluate envelopes on a p-value CSV");
  real->add_option("--in", rd_in, "input CSV (index,pvalue[,label])")->required();
  real->add_option("--setting", rd_setting, "topk | preordered | online");
  real->add_option("--alpha", rd_alpha, "target level");
  real->add_option("--delta", rd_delta, "confidence parameter");
  real->add_option("--s", rd_s, "preordered threshold s");
  real->add_option("--lambda", rd_lambda, "preordered threshold lambda");
  real->add_option("--methods", rd_methods, "method tokens");
  real->add_option("--w0-frac", rd_lord.w0_frac, "LORD W0 fraction");
  real->add_option("--gamma-exponent", rd_lord.gamma_exponent, "LORD gamma exponent");
  real->add_flag("--raw-gamma", rd_lord.raw_gamma, "unnormalized gamma");
  real->add_option("--out", rd_out, "output CSV path (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (topk->parsed()) {
      if (*topk_mu_opt) topk_cfg.gaussian.mu_override = topk_mu;
      return run_setting_command(topk_cfg, topk_flags, topk, false);
    }
    if (pre->parsed()) {
      pre_cfg.vct.pi_curve = pi_family == "lf"
                                 ? PiCurve::lf_exponential(pre_pi1, pre_pib)
                                 : PiCurve::knockoff_linear(pre_z);
      pre_cfg.vct.null_dist.kind = null_kind == "uniform"
                                       ? NullDist::Kind::kUniform
                                       : NullDist::Kind::kBinaryKnockoff;
      pre_cfg.vct.alt_dist = alt_kind == "gaussian"
                                 ? AltDist::one_sided_gaussian(alt_mu)
                                 : AltDist::binary_knockoff(alt_q);
      if (*s_frac_opt) {
        if (pre_cfg.alpha_grid.size() != 1 && pre_flags.alpha_grid.size() != 1)
          throw std::runtime_error("--s-alpha-frac needs a single alpha");
        const double a = pre_flags.alpha_grid.empty() ? pre_cfg.alpha_grid[0]
                                                      : pre_flags.alpha_grid[0];
        pre_cfg.s = s_alpha_frac * a;
      }
      return run_setting_command(pre_cfg, pre_flags, pre, false);
    }
    if (online->parsed()) {
      if (!stream_path.empty()) {
        const double alpha = online_flags.alpha_grid.empty()
                                 ? online_cfg.alpha_grid[0]
                                 : online_flags.alpha_grid[0];
        const double delta =
            online->count("--delta") ? online_flags.delta : online_cfg.delta;
        return run_stream_command(stream_path, alpha, delta, online_cfg.lord,
                                  online_flags.out_path);
      }
      return run_setting_command(online_cfg, online_flags, online, false);
    }
    if (coverage->parsed()) {
      ExperimentConfig cfg;
      cfg.setting = setting_from_name(cov_setting);
      if (cfg.setting == Setting::kPreordered) {
        cfg.vct.pi_curve = PiCurve::knockoff_linear(30.0);
        cfg.vct.beta = 0.25;
        cfg.vct.null_dist.kind = NullDist::Kind::kBinaryKnockoff;
        cfg.vct.alt_dist = AltDist::binary_knockoff(0.9);
        cfg.m_grid = {500};
      } else if (cfg.setting == Setting::kOnline) {
        cfg.m_grid = {5000};
        cfg.replications = 500;
      } else {
        cfg.m_grid = {200};
      }
      cov_flags.all_variants = true;
      cfg.compute_coverage = true;
      return run_setting_command(cfg, cov_flags, coverage, false);
    }
    if (consistency->parsed()) {
      ExperimentConfig cfg;
      cfg.setting = setting_from_name(cons_setting);
      if (cfg.setting == Setting::kPreordered) {
        cfg.vct.pi_curve = PiCurve::knockoff_linear(30.0);
        cfg.vct.null_dist.kind = NullDist::Kind::kBinaryKnockoff;
        cfg.vct.alt_dist = AltDist::binary_knockoff(0.9);
      }
      cfg.m_grid = {1000, 10000, 100000};
      cfg.replications = 200;
      cfg.compute_coverage = false;
      return run_setting_command(cfg, cons_flags, consistency, true);
    }
    if (real->parsed()) {
      return run_real_data(rd_in, setting_from_name(rd_setting), rd_alpha,
                           rd_delta, rd_s, rd_lambda, rd_methods, rd_lord,
                           rd_out);
    }
  } catch (const std::exception& e) {
    nlohmann::json err;
    err["error"] = e.what();
    std::cerr << err.dump() << '\n';
    return 1;
  }
  return 1;
}

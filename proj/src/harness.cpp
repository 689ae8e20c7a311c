#include "fdpenv/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <mutex>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "fdpenv/numerics.hpp"
#include "json.hpp"

namespace fdpenv {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

bool topk_method(Method m) {
  switch (m) {
    case Method::kSimes:
    case Method::kDkw:
    case Method::kKr:
    case Method::kWellner:
    case Method::kHybrid:
      return true;
    default:
      return false;
  }
}

bool sequential_method(Method m) {
  return m == Method::kFreedman || m == Method::kKr || m == Method::kKru;
}

// type-7 quantile (linear interpolation between order statistics)
double quantile(std::vector<double> v, double p) {
  if (v.empty()) return kNan;
  std::sort(v.begin(), v.end());
  const double idx = p * static_cast<double>(v.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(idx));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  const double w = idx - static_cast<double>(lo);
  return (1.0 - w) * v[lo] + w * v[hi];
}

}  // namespace

std::string_view setting_name(Setting s) {
  switch (s) {
    case Setting::kTopk: return "topk";
    case Setting::kPreordered: return "preordered";
    case Setting::kOnline: return "online";
  }
  return "?";
}

Setting setting_from_name(std::string_view name) {
  if (name == "topk") return Setting::kTopk;
  if (name == "preordered") return Setting::kPreordered;
  if (name == "online") return Setting::kOnline;
  throw std::invalid_argument("unknown setting: " + std::string(name));
}

std::string MethodSpec::name() const {
  std::string out{method_name(method)};
  if (adaptive) out += "+adapt";
  if (interpolated) out += "+interp";
  return out;
}

MethodSpec MethodSpec::parse(std::string_view token) {
  MethodSpec spec;
  std::size_t pos = token.find('+');
  spec.method = method_from_name(token.substr(0, pos));
  while (pos != std::string_view::npos) {
    const std::size_t next = token.find('+', pos + 1);
    const std::string_view mod = token.substr(
        pos + 1, next == std::string_view::npos ? next : next - pos - 1);
    if (mod == "adapt" || mod == "adaptive") spec.adaptive = true;
    else if (mod == "interp" || mod == "interpolated") spec.interpolated = true;
    else throw std::invalid_argument("unknown method modifier: " + std::string(mod));
    pos = next;
  }
  return spec;
}

void ExperimentConfig::validate() const {
  if (m_grid.empty()) throw std::invalid_argument("ExperimentConfig: empty m grid");
  if (alpha_grid.empty())
    throw std::invalid_argument("ExperimentConfig: empty alpha grid");
  for (double a : alpha_grid)
    if (!(a > 0.0) || !(a < 1.0))
      throw std::invalid_argument("ExperimentConfig: alpha outside (0,1)");
  if (!(delta > 0.0) || !(delta < 1.0))
    throw std::invalid_argument("ExperimentConfig: delta outside (0,1)");
  if (replications < 1)
    throw std::invalid_argument("ExperimentConfig: replications must be >= 1");
  if (methods.empty())
    throw std::invalid_argument("ExperimentConfig: no methods requested");
  for (const MethodSpec& ms : methods) {
    if (setting == Setting::kTopk) {
      if (!topk_method(ms.method))
        throw std::invalid_argument("method " + ms.name() + " not defined for topk");
    } else {
      if (!sequential_method(ms.method))
        throw std::invalid_argument("method " + ms.name() + " not defined for " +
                                    std::string(setting_name(setting)));
      if (ms.adaptive)
        throw std::invalid_argument("adaptive variants exist only in the topk setting");
    }
  }
  if (setting == Setting::kTopk) {
    GaussianLocationConfig g = gaussian;
    for (std::size_t m : m_grid) {
      g.m = m;
      g.validate();
    }
  } else if (setting == Setting::kPreordered) {
    vct.validate();
    if (!(s > 0.0) || !(s <= 1.0))
      throw std::invalid_argument("ExperimentConfig: s outside (0,1]");
    if (!(lambda >= 0.0) || !(lambda < 1.0))
      throw std::invalid_argument("ExperimentConfig: lambda outside [0,1)");
  } else {
    OnlineMixtureConfig mc = mixture;
    mc.length = 1;
    mc.validate();
    if (!(lord.w0_frac >= 0.0) || lord.w0_frac > 1.0)
      throw std::invalid_argument("ExperimentConfig: w0_frac outside [0,1]");
    if (!(lord.gamma_exponent > 1.0))
      throw std::invalid_argument("ExperimentConfig: gamma exponent must be > 1");
  }
}

namespace {

using nlohmann::json;

json pi_curve_to_json(const PiCurve& c) {
  json j;
  switch (c.family) {
    case PiCurve::Family::kLfExponential:
      j["family"] = "lf_exponential";
      j["pi1"] = c.pi1;
      j["b"] = c.b;
      break;
    case PiCurve::Family::kKnockoffLinear:
      j["family"] = "knockoff_linear";
      j["z"] = c.z;
      break;
    case PiCurve::Family::kTabulated:
      j["family"] = "tabulated";
      j["points"] = c.table;
      break;
  }
  return j;
}

PiCurve pi_curve_from_json(const json& j) {
  const std::string family = j.at("family").get<std::string>();
  if (family == "lf_exponential")
    return PiCurve::lf_exponential(j.at("pi1").get<double>(), j.at("b").get<double>());
  if (family == "knockoff_linear")
    return PiCurve::knockoff_linear(j.at("z").get<double>());
  if (family == "tabulated")
    return PiCurve::tabulated(
        j.at("points").get<std::vector<std::pair<double, double>>>());
  throw std::invalid_argument("unknown pi curve family: " + family);
}

}  // namespace

std::string ExperimentConfig::to_json() const {
  json j;
  j["setting"] = std::string(setting_name(setting));
  switch (setting) {
    case Setting::kTopk: {
      json m;
      m["type"] = "gaussian_location";
      m["b"] = gaussian.b;
      m["c"] = gaussian.c;
      m["beta"] = gaussian.beta;
      if (gaussian.mu_override) m["mu_override"] = *gaussian.mu_override;
      j["model"] = m;
      break;
    }
    case Setting::kPreordered: {
      json m;
      m["type"] = "vct";
      m["pi_curve"] = pi_curve_to_json(vct.pi_curve);
      m["beta"] = vct.beta;
      m["null"] = vct.null_dist.kind == NullDist::Kind::kUniform ? "uniform"
                                                                 : "binary_knockoff";
      json alt;
      if (vct.alt_dist.kind == AltDist::Kind::kOneSidedGaussian) {
        alt["kind"] = "one_sided_gaussian";
        alt["mu"] = vct.alt_dist.mu;
      } else {
        alt["kind"] = "binary_knockoff";
        alt["q"] = vct.alt_dist.q;
      }
      m["alt"] = alt;
      j["model"] = m;
      j["s"] = s;
      j["lambda"] = lambda;
      break;
    }
    case Setting::kOnline: {
      json m;
      m["type"] = "online_mixture";
      m["pi1"] = mixture.pi1;
      m["mu"] = mixture.mu;
      j["model"] = m;
      json l;
      l["w0_frac"] = lord.w0_frac;
      l["gamma_exponent"] = lord.gamma_exponent;
      l["raw_gamma"] = lord.raw_gamma;
      j["lord"] = l;
      break;
    }
  }
  j["m_grid"] = m_grid;
  j["alpha_grid"] = alpha_grid;
  j["delta"] = delta;
  j["replications"] = replications;
  std::vector<std::string> names;
  for (const MethodSpec& ms : methods) names.push_back(ms.name());
  j["methods"] = names;
  j["seed"] = seed;
  j["compute_coverage"] = compute_coverage;
  j["interp_max_m"] = interp_max_m;
  j["threads"] = threads;
  return j.dump(2);
}

ExperimentConfig ExperimentConfig::from_json(const std::string& text) {
  json j = json::parse(text);
  ExperimentConfig cfg;
  cfg.setting = setting_from_name(j.at("setting").get<std::string>());
  const json& m = j.at("model");
  switch (cfg.setting) {
    case Setting::kTopk:
      cfg.gaussian.b = m.value("b", cfg.gaussian.b);
      cfg.gaussian.c = m.value("c", cfg.gaussian.c);
      cfg.gaussian.beta = m.value("beta", cfg.gaussian.beta);
      if (m.contains("mu_override") && !m["mu_override"].is_null())
        cfg.gaussian.mu_override = m["mu_override"].get<double>();
      break;
    case Setting::kPreordered: {
      cfg.vct.pi_curve = pi_curve_from_json(m.at("pi_curve"));
      cfg.vct.beta = m.value("beta", 0.0);
      const std::string null_kind = m.value("null", "uniform");
      cfg.vct.null_dist.kind = null_kind == "uniform"
                                   ? NullDist::Kind::kUniform
                                   : NullDist::Kind::kBinaryKnockoff;
      const json& alt = m.at("alt");
      const std::string alt_kind = alt.at("kind").get<std::string>();
      if (alt_kind == "one_sided_gaussian")
        cfg.vct.alt_dist = AltDist::one_sided_gaussian(alt.at("mu").get<double>());
      else
        cfg.vct.alt_dist = AltDist::binary_knockoff(alt.at("q").get<double>());
      cfg.s = j.value("s", cfg.s);
      cfg.lambda = j.value("lambda", cfg.lambda);
      break;
    }
    case Setting::kOnline: {
      cfg.mixture.pi1 = m.value("pi1", cfg.mixture.pi1);
      cfg.mixture.mu = m.value("mu", cfg.mixture.mu);
      if (j.contains("lord")) {
        const json& l = j["lord"];
        cfg.lord.w0_frac = l.value("w0_frac", cfg.lord.w0_frac);
        cfg.lord.gamma_exponent = l.value("gamma_exponent", cfg.lord.gamma_exponent);
        cfg.lord.raw_gamma = l.value("raw_gamma", cfg.lord.raw_gamma);
      }
      break;
    }
  }
  cfg.m_grid = j.at("m_grid").get<std::vector<std::size_t>>();
  cfg.alpha_grid = j.at("alpha_grid").get<std::vector<double>>();
  cfg.delta = j.value("delta", cfg.delta);
  cfg.replications = j.value("replications", cfg.replications);
  cfg.methods.clear();
  for (const auto& name : j.at("methods").get<std::vector<std::string>>())
    cfg.methods.push_back(MethodSpec::parse(name));
  cfg.seed = j.value("seed", cfg.seed);
  cfg.compute_coverage = j.value("compute_coverage", cfg.compute_coverage);
  cfg.interp_max_m = j.value("interp_max_m", cfg.interp_max_m);
  cfg.threads = j.value("threads", cfg.threads);
  cfg.validate();
  return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

void ExperimentConfig::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write config file: " + path);
  out << to_json() << "\n";
}

void parallel_for(std::size_t n, std::size_t threads,
                  const std::function<void(std::size_t)>& fn) {
  if (threads == 0) threads = std::max<std::size_t>(std::thread::hardware_concurrency(), 1);
  threads = std::min(threads, n);
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mu;
  auto worker = [&] {
    while (!failed.load(std::memory_order_relaxed)) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) break;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!error) error = std::current_exception();
        failed.store(true);
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

OnlineRun run_lord_stream(const std::vector<double>& pvalues, double alpha,
                          const LordParams& lord, double delta,
                          bool record_bounds) {
  OnlineRun run;
  run.final_state = make_lord_state(
      alpha, lord.w0_frac * alpha,
      SpendingSequence::power_law(lord.gamma_exponent, !lord.raw_gamma));
  OnlineState& st = run.final_state;
  const std::size_t n = pvalues.size();
  run.alphas.resize(n);
  run.rejected.resize(n);
  run.rejections_prefix.resize(n);
  if (record_bounds) {
    run.bound_freed.resize(n);
    run.bound_kr.resize(n);
    run.bound_kru.resize(n);
  }
  for (std::size_t i = 0; i < n; ++i) {
    const bool rej = online_step(st, pvalues[i]);
    run.alphas[i] = st.last_alpha;
    run.rejected[i] = rej ? 1 : 0;
    run.rejections_prefix[i] = st.r;
    if (record_bounds) {
      run.bound_freed[i] = online_envelope(Method::kFreedman, st, delta);
      run.bound_kr[i] = online_envelope(Method::kKr, st, delta);
      run.bound_kru[i] = online_envelope(Method::kKru, st, delta);
    }
  }
  return run;
}

namespace {

struct RepResult {
  std::vector<double> bounds;       // per requested method
  std::vector<std::uint8_t> covers; // per requested method (1 = uniform event holds)
  double rejections = 0.0;
};

Envelope topk_variant_envelope(const MethodSpec& ms, const SortedPValues& sp,
                               double delta,
                               const std::vector<std::int64_t>& sizes) {
  Envelope env = ms.adaptive
                     ? topk_envelope_adaptive(ms.method, sp, delta)
                     : topk_envelope(ms.method, sp, delta,
                                     static_cast<double>(sp.size()));
  if (ms.interpolated) env = interpolate(env, sizes);
  return env;
}

bool covers_everywhere(const std::vector<double>& fdp,
                       const std::vector<double>& bounds) {
  for (std::size_t i = 0; i < fdp.size(); ++i)
    if (fdp[i] > bounds[i]) return false;
  return true;
}

}  // namespace

std::vector<SummaryRow> run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<SummaryRow> rows;

  for (std::size_t mi = 0; mi < cfg.m_grid.size(); ++mi) {
    const std::size_t m = cfg.m_grid[mi];
    for (std::size_t ai = 0; ai < cfg.alpha_grid.size(); ++ai) {
      const double alpha = cfg.alpha_grid[ai];
      const auto t0 = std::chrono::steady_clock::now();

      // methods active in this cell (interpolated variants may be size-capped)
      std::vector<MethodSpec> active;
      for (const MethodSpec& ms : cfg.methods)
        if (!ms.interpolated || m <= cfg.interp_max_m) active.push_back(ms);
      if (active.empty()) continue;

      const std::uint64_t stream_base =
          (static_cast<std::uint64_t>(mi) * cfg.alpha_grid.size() + ai) *
          cfg.replications;
      std::vector<RepResult> results(cfg.replications);

      parallel_for(cfg.replications, cfg.threads, [&](std::size_t rep) {
        Rng rng = make_replication_rng(cfg.seed, stream_base + rep);
        RepResult& out = results[rep];
        out.bounds.resize(active.size(), kNan);
        out.covers.resize(active.size(), 0);

        switch (cfg.setting) {
          case Setting::kTopk: {
            GaussianLocationConfig g = cfg.gaussian;
            g.m = m;
            const PValueBatch batch = gen_gaussian_topk(g, rng);
            const SortedPValues sp = SortedPValues::from(batch);
            const std::size_t khat = bh_select(sp, alpha);
            out.rejections = static_cast<double>(khat);
            std::vector<double> fdp;
            if (cfg.compute_coverage) fdp = true_fdp_topk(sp, batch.labels);
            std::vector<std::int64_t> sizes(m);
            std::iota(sizes.begin(), sizes.end(), std::int64_t{1});
            for (std::size_t s = 0; s < active.size(); ++s) {
              const MethodSpec& ms = active[s];
              if (!ms.interpolated && !cfg.compute_coverage) {
                out.bounds[s] =
                    bh_fdp_bound(ms.method, sp, alpha, cfg.delta, ms.adaptive);
                continue;
              }
              const Envelope env =
                  topk_variant_envelope(ms, sp, cfg.delta, sizes);
              if (cfg.compute_coverage)
                out.covers[s] = covers_everywhere(fdp, env.bounds) ? 1 : 0;
              if (ms.interpolated)
                out.bounds[s] = khat > 0 ? env.bounds[khat - 1] : 0.0;
              else
                out.bounds[s] =
                    bh_fdp_bound(ms.method, sp, alpha, cfg.delta, ms.adaptive);
            }
            break;
          }
          case Setting::kPreordered: {
            const PreorderedData data =
                gen_vct(cfg.vct, m, cfg.s, cfg.lambda, rng);
            const LfSelection sel = lf_select(data, alpha);
            out.rejections = static_cast<double>(sel.r_hat);
            std::vector<double> fdp;
            if (cfg.compute_coverage) fdp = true_fdp_preordered(data);
            std::vector<std::int64_t> sizes;
            for (std::size_t s = 0; s < active.size(); ++s) {
              const MethodSpec& ms = active[s];
              if (!ms.interpolated && !cfg.compute_coverage) {
                out.bounds[s] = lf_fdp_bound(ms.method, data, alpha, cfg.delta);
                continue;
              }
              Envelope env = preordered_envelope(ms.method, data, cfg.delta);
              if (ms.interpolated) {
                if (sizes.empty()) sizes = prefix_counts(data).below_s;
                env = interpolate(env, sizes);
              }
              if (cfg.compute_coverage)
                out.covers[s] = covers_everywhere(fdp, env.bounds) ? 1 : 0;
              if (ms.interpolated)
                out.bounds[s] = sel.k_hat > 0 ? env.bounds[sel.k_hat - 1] : 0.0;
              else
                out.bounds[s] = lf_fdp_bound(ms.method, data, alpha, cfg.delta);
            }
            break;
          }
          case Setting::kOnline: {
            OnlineMixtureConfig mc = cfg.mixture;
            mc.length = m;
            const OnlineStream stream = gen_online_mixture(mc, rng);
            bool need_history = cfg.compute_coverage;
            for (const MethodSpec& ms : active)
              need_history = need_history || ms.interpolated;
            const OnlineRun run = run_lord_stream(stream.pvalues, alpha,
                                                  cfg.lord, cfg.delta,
                                                  need_history);
            out.rejections = static_cast<double>(run.final_state.r);
            std::vector<double> fdp;
            if (cfg.compute_coverage)
              fdp = true_fdp_online(stream.labels, run.rejected);
            for (std::size_t s = 0; s < active.size(); ++s) {
              const MethodSpec& ms = active[s];
              const std::vector<double>* history = nullptr;
              if (need_history)
                history = ms.method == Method::kFreedman ? &run.bound_freed
                          : ms.method == Method::kKr     ? &run.bound_kr
                                                         : &run.bound_kru;
              if (ms.interpolated) {
                Envelope env;
                env.method = ms.method;
                env.delta = cfg.delta;
                env.bounds = *history;
                env = interpolate(env, run.rejections_prefix);
                if (cfg.compute_coverage)
                  out.covers[s] = covers_everywhere(fdp, env.bounds) ? 1 : 0;
                out.bounds[s] = env.bounds.back();
              } else {
                if (cfg.compute_coverage)
                  out.covers[s] = covers_everywhere(fdp, *history) ? 1 : 0;
                out.bounds[s] =
                    online_envelope(ms.method, run.final_state, cfg.delta);
              }
            }
            break;
          }
        }
      });

      const auto t1 = std::chrono::steady_clock::now();
      const double elapsed_ms =
          std::chrono::duration<double, std::milli>(t1 - t0).count();

      for (std::size_t s = 0; s < active.size(); ++s) {
        SummaryRow row;
        row.m = m;
        row.alpha = alpha;
        row.method = active[s].name();
        std::vector<double> bounds(cfg.replications);
        double cover = 0.0, rej = 0.0;
        for (std::size_t rep = 0; rep < cfg.replications; ++rep) {
          bounds[rep] = results[rep].bounds[s];
          cover += results[rep].covers[s];
          rej += results[rep].rejections;
        }
        row.q25 = quantile(bounds, 0.25);
        row.median = quantile(bounds, 0.5);
        row.q75 = quantile(bounds, 0.75);
        row.coverage_rate =
            cfg.compute_coverage ? cover / static_cast<double>(cfg.replications) : kNan;
        row.mean_rejections = rej / static_cast<double>(cfg.replications);
        row.wall_time_ms = elapsed_ms;
        rows.push_back(std::move(row));
      }
    }
  }
  return rows;
}

std::vector<ConsistencySeries> consistency_curve(const std::vector<SummaryRow>& rows) {
  std::vector<ConsistencySeries> series;
  for (const SummaryRow& row : rows) {
    auto it = std::find_if(series.begin(), series.end(), [&](const auto& s) {
      return s.method == row.method && s.alpha == row.alpha;
    });
    if (it == series.end()) {
      series.push_back({row.method, row.alpha, {}, 0.0});
      it = series.end() - 1;
    }
    it->gaps.emplace_back(row.m, row.median - row.alpha);
  }
  for (ConsistencySeries& s : series) {
    std::sort(s.gaps.begin(), s.gaps.end());
    if (s.gaps.size() < 3)
      throw std::invalid_argument(
          "consistency_curve: need results spanning at least 3 values of m");
    // least-squares slope of log(gap) on log(m); NaN when a gap is nonpositive
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    bool ok = true;
    for (const auto& [m, gap] : s.gaps) {
      if (!(gap > 0.0)) { ok = false; break; }
      const double x = std::log(static_cast<double>(m));
      const double y = std::log(gap);
      sx += x; sy += y; sxx += x * x; sxy += x * y;
    }
    const double n = static_cast<double>(s.gaps.size());
    s.loglog_slope = ok ? (n * sxy - sx * sy) / (n * sxx - sx * sx) : kNan;
  }
  return series;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r' && c != ' ') {
      cur += c;
    }
  }
  fields.push_back(cur);
  return fields;
}

}  // namespace

PValueBatch read_pvalues_csv(std::istream& in, const std::string& origin) {
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error(origin + ": empty file");
  const std::vector<std::string> header = split_csv_line(line);
  const bool with_labels = header.size() == 3 && header[2] == "label";
  if (!((header.size() == 2 || with_labels) && header[0] == "index" &&
        header[1] == "pvalue"))
    throw std::runtime_error(origin + ": line 1: expected header index,pvalue[,label]");

  PValueBatch batch;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const std::vector<std::string> fields = split_csv_line(line);
    const std::string where = origin + ": line " + std::to_string(lineno);
    if (fields.size() != header.size())
      throw std::runtime_error(where + ": expected " +
                               std::to_string(header.size()) + " fields");
    try {
      std::size_t used = 0;
      (void)std::stoll(fields[0], &used);
      if (used != fields[0].size()) throw std::invalid_argument("index");
      const double p = std::stod(fields[1], &used);
      if (used != fields[1].size()) throw std::invalid_argument("pvalue");
      if (!(p >= 0.0) || !(p <= 1.0))
        throw std::runtime_error(where + ": p-value " + fields[1] +
                                 " outside [0,1]");
      batch.values.push_back(p);
      if (with_labels) {
        if (fields[2] != "0" && fields[2] != "1")
          throw std::runtime_error(where + ": label must be 0 or 1");
        batch.labels.push_back(fields[2] == "1" ? 1 : 0);
      }
    } catch (const std::invalid_argument&) {
      throw std::runtime_error(where + ": malformed row");
    } catch (const std::out_of_range&) {
      throw std::runtime_error(where + ": malformed row");
    }
  }
  if (batch.values.empty())
    throw std::runtime_error(origin + ": no data rows");
  batch.validate();
  return batch;
}

PValueBatch load_pvalues_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_pvalues_csv(in, path);
}

void emit_pvalues_csv(const PValueBatch& batch, std::ostream& out) {
  const bool with_labels = batch.has_labels();
  out << (with_labels ? "index,pvalue,label\n" : "index,pvalue\n");
  for (std::size_t i = 0; i < batch.values.size(); ++i) {
    out << i << ',' << format_double(batch.values[i]);
    if (with_labels) out << ',' << static_cast<int>(batch.labels[i]);
    out << '\n';
  }
}

void emit_summary_csv(const std::vector<SummaryRow>& rows, Setting setting,
                      std::ostream& out, bool include_timing) {
  out << "setting,m,alpha,method,q25,median,q75,coverage,mean_rejections";
  if (include_timing) out << ",wall_time_ms";
  out << '\n';
  for (const SummaryRow& r : rows) {
    out << setting_name(setting) << ',' << r.m << ',' << format_double(r.alpha)
        << ',' << r.method << ',' << format_double(r.q25) << ','
        << format_double(r.median) << ',' << format_double(r.q75) << ','
        << format_double(r.coverage_rate) << ','
        << format_double(r.mean_rejections);
    if (include_timing) out << ',' << format_double(r.wall_time_ms);
    out << '\n';
  }
}

void emit_consistency_csv(const std::vector<ConsistencySeries>& series,
                          Setting setting, std::ostream& out) {
  out << "setting,method,alpha,m,gap,loglog_slope\n";
  for (const ConsistencySeries& s : series)
    for (const auto& [m, gap] : s.gaps)
      out << setting_name(setting) << ',' << s.method << ','
          << format_double(s.alpha) << ',' << m << ',' << format_double(gap)
          << ',' << format_double(s.loglog_slope) << '\n';
}

}  // namespace fdpenv

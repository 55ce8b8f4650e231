#include "notears/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <thread>

#include "notears/acyclicity.hpp"
#include "notears/errors.hpp"
#include "notears/estimators.hpp"
#include "notears/io.hpp"
#include "notears/model_select.hpp"
#include "notears/rng.hpp"

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace notears {

namespace {

NoiseKind::Kind noise_kind_from(const std::string& s) {
  if (s == "gaussian") return NoiseKind::Kind::gaussian;
  if (s == "exponential") return NoiseKind::Kind::exponential;
  if (s == "gumbel") return NoiseKind::Kind::gumbel;
  throw invalid_argument_error("unknown noise kind: " + s);
}

const char* noise_name(NoiseKind::Kind k) {
  switch (k) {
    case NoiseKind::Kind::gaussian: return "gaussian";
    case NoiseKind::Kind::exponential: return "exponential";
    case NoiseKind::Kind::gumbel: return "gumbel";
  }
  return "?";
}

WeightDist weights_from_json(const json& j) {
  WeightDist w;
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "gaussian") {
    w.kind = WeightDist::Kind::gaussian;
    w.a = j.value("mean", 0.0);
    w.b = j.at("sd").get<double>();
  } else if (kind == "uniform_sym") {
    w.kind = WeightDist::Kind::uniform_sym;
    w.a = j.at("c").get<double>();
  } else if (kind == "uniform_gap") {
    w.kind = WeightDist::Kind::uniform_gap;
    w.a = j.at("lo").get<double>();
    w.b = j.at("hi").get<double>();
  } else {
    throw invalid_argument_error("unknown weight dist kind: " + kind);
  }
  return w;
}

json weights_to_json(const WeightDist& w) {
  switch (w.kind) {
    case WeightDist::Kind::gaussian:
      return {{"kind", "gaussian"}, {"mean", w.a}, {"sd", w.b}};
    case WeightDist::Kind::uniform_sym:
      return {{"kind", "uniform_sym"}, {"c", w.a}};
    case WeightDist::Kind::uniform_gap:
      return {{"kind", "uniform_gap"}, {"lo", w.a}, {"hi", w.b}};
  }
  return {};
}

}  // namespace

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw parse_error("cannot open config: " + path);
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw parse_error(std::string("config is not valid json: ") + e.what());
  }

  ExperimentConfig c;
  try {
    c.schema_version = j.at("schema_version").get<int>();
    if (c.schema_version != 1)
      throw invalid_argument_error("unsupported schema_version (expected 1)");
    for (const auto& g : j.at("graphs"))
      c.graphs.push_back({g.at("d").get<int>(), g.at("er_degree").get<double>()});
    c.n = j.at("n").get<std::vector<int>>();
    for (const auto& z : j.at("noise"))
      c.noise.push_back({noise_kind_from(z.at("kind").get<std::string>()),
                         z.value("scale", 1.0)});
    c.model = j.value("model", "linear");
    if (c.model != "linear" && c.model != "logistic")
      throw invalid_argument_error("model must be linear or logistic");
    c.weights = weights_from_json(j.at("weights"));
    for (const auto& e : j.at("estimators")) {
      EstimatorSpec s;
      s.name = e.at("name").get<std::string>();
      if (s.name != "notears_fixed" && s.name != "notears_al" && s.name != "ols_only")
        throw invalid_argument_error("unknown estimator: " + s.name);
      s.lambda = e.value("lambda", 0.1);
      s.threshold = e.value("threshold", 0.1);
      s.gamma = e.value("gamma", 1.0);
      s.lambda_n = e.value("lambda_n", 0.01);
      s.cv = e.value("cv", false);
      c.estimators.push_back(std::move(s));
    }
    c.replicates = j.at("replicates").get<int>();
    c.master_seed = j.value("master_seed", 0ull);
    c.output_dir = j.value("output_dir", std::string("out"));
  } catch (const json::exception& e) {
    throw parse_error(std::string("bad config field: ") + e.what());
  }
  if (c.graphs.empty() || c.n.empty() || c.noise.empty() || c.estimators.empty())
    throw invalid_argument_error("config sweep axes must be nonempty");
  if (c.replicates < 1) throw invalid_argument_error("replicates must be >= 1");
  return c;
}

namespace {

json config_to_json(const ExperimentConfig& c) {
  json j;
  j["schema_version"] = c.schema_version;
  j["graphs"] = json::array();
  for (const auto& g : c.graphs) j["graphs"].push_back({{"d", g.d}, {"er_degree", g.er_degree}});
  j["n"] = c.n;
  j["noise"] = json::array();
  for (const auto& z : c.noise)
    j["noise"].push_back({{"kind", noise_name(z.kind)}, {"scale", z.scale}});
  j["model"] = c.model;
  j["weights"] = weights_to_json(c.weights);
  j["estimators"] = json::array();
  for (const auto& e : c.estimators)
    j["estimators"].push_back({{"name", e.name},
                               {"lambda", e.lambda},
                               {"threshold", e.threshold},
                               {"gamma", e.gamma},
                               {"lambda_n", e.lambda_n},
                               {"cv", e.cv}});
  j["replicates"] = c.replicates;
  j["master_seed"] = c.master_seed;
  j["output_dir"] = c.output_dir;
  return j;
}

struct JobOutput {
  Mat truth;
  std::vector<RunRecord> records;          // one per estimator
  std::vector<std::optional<Mat>> estimates;  // W_hat per estimator (nullopt on failure)
};

struct DataCell {
  GraphCell graph;
  int n;
  NoiseKind noise;
};

JobOutput run_job(const ExperimentConfig& config, const std::vector<DataCell>& cells, int cell,
                  int rep, const SolverConfig& cfg) {
  const DataCell& dc = cells[cell];
  const uint64_t s0 = derive_seed(config.master_seed, static_cast<uint64_t>(cell),
                                  static_cast<uint64_t>(rep));

  GraphSpec gs;
  gs.d = dc.graph.d;
  gs.er_degree = dc.graph.er_degree;
  gs.weight_dist = config.weights;
  gs.seed = derive_seed(s0, 1, 0);

  JobOutput out;
  const Mat pattern = sample_er_dag(gs);
  out.truth = assign_weights(pattern, config.weights, derive_seed(s0, 2, 0));

  Dataset data;
  if (config.model == "logistic")
    data = simulate_logistic_sem(out.truth, dc.n, derive_seed(s0, 3, 0));
  else
    data = simulate_linear_sem(out.truth, dc.n, dc.noise, derive_seed(s0, 3, 0));

  for (int ei = 0; ei < static_cast<int>(config.estimators.size()); ++ei) {
    const EstimatorSpec& es = config.estimators[ei];
    RunRecord r;
    r.cell = cell;
    r.replicate = rep;
    r.est_idx = ei;
    r.d = dc.graph.d;
    r.er_degree = dc.graph.er_degree;
    r.n = dc.n;
    r.noise_kind = noise_name(dc.noise.kind);
    r.noise_scale = dc.noise.scale;
    r.model = config.model;
    r.estimator = es.name;
    r.seed = s0;

    const auto t0 = std::chrono::steady_clock::now();
    try {
      Mat W_hat;
      if (es.name == "ols_only") {
        W_hat = config.model == "logistic" ? logistic_stage(data, cfg) : ols_stage(data, cfg);
      } else if (es.name == "notears_fixed") {
        const EstimateResult res = config.model == "logistic"
                                       ? notears_logistic(data, es.lambda, es.threshold, cfg)
                                       : notears_fixed(data, es.lambda, es.threshold, cfg);
        W_hat = res.W_hat;
        r.converged = res.converged;
        r.h_final = res.h_final;
        r.lambda_used = res.lambda_used;
      } else {  // notears_al
        if (config.model == "logistic") {
          const EstimateResult res = notears_al_logistic(data, es.lambda_n, es.gamma, cfg);
          W_hat = res.W_hat;
          r.converged = res.converged;
          r.h_final = res.h_final;
          r.lambda_used = res.lambda_used;
        } else if (es.cv) {
          CvPlan plan;
          plan.gamma_grid = {es.gamma};
          plan.seed = derive_seed(s0, 4, 0);
          const CvResult cv = cross_validate(data, plan, cfg);
          W_hat = cv.best.refit_W;
          r.h_final = h_and_grad(W_hat).h;
          r.lambda_used = cv.best.lambda;
        } else {
          const EstimateResult res = notears_al(data, es.lambda_n, es.gamma, cfg);
          W_hat = res.W_hat;
          r.converged = res.converged;
          r.h_final = res.h_final;
          r.lambda_used = res.lambda_used;
        }
      }
      r.metrics = compare(W_hat, out.truth);
      r.support_size = static_cast<int>(support_edges(W_hat).size());
      r.frob_err = (W_hat - out.truth).norm();
      out.estimates.emplace_back(std::move(W_hat));
    } catch (const error&) {
      r.failed = true;
      out.estimates.emplace_back(std::nullopt);
    }
    r.wall_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out.records.push_back(std::move(r));
  }
  return out;
}

std::string record_header() {
  return "cell,replicate,est_idx,d,er_degree,n,noise,noise_scale,model,estimator,seed,failed,"
         "converged,shd,tpr,fdr,tp,fp,fn,reversed,predicted,true_edges,support_size,h_final,"
         "lambda_used,frob_err";
}

std::string record_row(const RunRecord& r) {
  std::ostringstream s;
  s << r.cell << ',' << r.replicate << ',' << r.est_idx << ',' << r.d << ','
    << fmt_g17(r.er_degree) << ',' << r.n << ',' << r.noise_kind << ',' << fmt_g17(r.noise_scale)
    << ',' << r.model << ',' << r.estimator << ',' << r.seed << ',' << (r.failed ? 1 : 0) << ','
    << (r.converged ? 1 : 0) << ',' << r.metrics.shd << ',' << fmt_g17(r.metrics.tpr) << ','
    << fmt_g17(r.metrics.fdr) << ',' << r.metrics.tp << ',' << r.metrics.fp << ','
    << r.metrics.fn << ',' << r.metrics.reversed << ',' << r.metrics.predicted << ','
    << r.metrics.true_edges << ',' << r.support_size << ',' << fmt_g17(r.h_final) << ','
    << fmt_g17(r.lambda_used) << ',' << fmt_g17(r.frob_err);
  return s.str();
}

double sample_sd(const std::vector<double>& v, double mean) {
  if (v.size() < 2) return 0.0;
  double acc = 0.0;
  for (double x : v) acc += (x - mean) * (x - mean);
  return std::sqrt(acc / (v.size() - 1));
}

}  // namespace

SweepOutcome run_sweep(const ExperimentConfig& config, int jobs, bool with_timings,
                       const SolverConfig& cfg) {
  if (jobs < 1) throw invalid_argument_error("run_sweep: jobs must be >= 1");
  const fs::path out_dir(config.output_dir);
  fs::create_directories(out_dir / "estimates");

  {
    std::ofstream mf(out_dir / "manifest.json");
    if (!mf) throw error("cannot write manifest.json");
    mf << config_to_json(config).dump(2) << '\n';
  }

  std::vector<DataCell> cells;
  for (const auto& g : config.graphs)
    for (int n : config.n)
      for (const auto& z : config.noise) cells.push_back({g, n, z});

  const int n_jobs = static_cast<int>(cells.size()) * config.replicates;
  auto job_coords = [&](int k) { return std::pair<int, int>{k / config.replicates, k % config.replicates}; };

  std::vector<std::optional<JobOutput>> results(n_jobs);
  std::mutex mu;
  std::condition_variable cv_done;
  int next_job = 0;

  auto worker = [&]() {
    while (true) {
      int k;
      {
        std::lock_guard<std::mutex> lock(mu);
        if (next_job >= n_jobs) return;
        k = next_job++;
      }
      const auto [cell, rep] = job_coords(k);
      JobOutput jo = run_job(config, cells, cell, rep, cfg);
      {
        std::lock_guard<std::mutex> lock(mu);
        results[k] = std::move(jo);
      }
      cv_done.notify_all();
    }
  };

  std::vector<std::thread> pool;
  const int nw = std::min(jobs, std::max(n_jobs, 1));
  for (int t = 0; t < nw; ++t) pool.emplace_back(worker);

  SweepOutcome outcome;
  std::ofstream rec(out_dir / "records.csv");
  if (!rec) throw error("cannot write records.csv");
  rec << record_header() << '\n';
  rec.flush();
  std::ofstream tim;
  if (with_timings) {
    tim.open(out_dir / "timings.csv");
    tim << "cell,replicate,est_idx,estimator,wall_s\n";
  }

  for (int k = 0; k < n_jobs; ++k) {
    std::unique_lock<std::mutex> lock(mu);
    cv_done.wait(lock, [&] { return results[k].has_value(); });
    JobOutput jo = std::move(*results[k]);
    results[k].reset();
    lock.unlock();

    const auto [cell, rep] = job_coords(k);
    std::ostringstream base;
    base << "c" << cell << "_r" << rep;
    save_edge_csv(jo.truth, (out_dir / "estimates" / (base.str() + "_truth.csv")).string());
    for (size_t ei = 0; ei < jo.records.size(); ++ei) {
      const RunRecord& r = jo.records[ei];
      std::ostringstream fn;
      fn << base.str() << "_e" << ei << "_" << r.estimator << ".csv";
      if (jo.estimates[ei].has_value())
        save_edge_csv(*jo.estimates[ei], (out_dir / "estimates" / fn.str()).string());
      else
        save_edge_csv(Mat::Zero(r.d, r.d), (out_dir / "estimates" / fn.str()).string());
      rec << record_row(r) << '\n';
      if (with_timings)
        tim << r.cell << ',' << r.replicate << ',' << r.est_idx << ',' << r.estimator << ','
            << fmt_g17(r.wall_s) << '\n';
      outcome.any_failed = outcome.any_failed || r.failed;
      outcome.records.push_back(r);
      ++outcome.n_records;
    }
    rec.flush();
  }
  for (auto& t : pool) t.join();

  // aggregate: one row per data cell x estimator
  std::ofstream agg(out_dir / "aggregate.csv");
  if (!agg) throw error("cannot write aggregate.csv");
  agg << "cell,d,er_degree,n,noise,noise_scale,model,estimator,records,failures,"
         "mean_shd,sd_shd,mean_tpr,sd_tpr,mean_fdr,sd_fdr\n";
  for (int cell = 0; cell < static_cast<int>(cells.size()); ++cell)
    for (int ei = 0; ei < static_cast<int>(config.estimators.size()); ++ei) {
      std::vector<double> shd, tpr, fdr;
      int failures = 0, total = 0;
      for (const auto& r : outcome.records) {
        if (r.cell != cell || r.est_idx != ei) continue;
        ++total;
        if (r.failed) {
          ++failures;
          continue;
        }
        shd.push_back(r.metrics.shd);
        tpr.push_back(r.metrics.tpr);
        fdr.push_back(r.metrics.fdr);
      }
      auto mean = [](const std::vector<double>& v) {
        if (v.empty()) return 0.0;
        double a = 0.0;
        for (double x : v) a += x;
        return a / v.size();
      };
      const double ms = mean(shd), mt = mean(tpr), mf = mean(fdr);
      agg << cell << ',' << cells[cell].graph.d << ',' << fmt_g17(cells[cell].graph.er_degree)
          << ',' << cells[cell].n << ',' << noise_name(cells[cell].noise.kind) << ','
          << fmt_g17(cells[cell].noise.scale) << ',' << config.model << ','
          << config.estimators[ei].name << ',' << total << ',' << failures << ',' << fmt_g17(ms)
          << ',' << fmt_g17(sample_sd(shd, ms)) << ',' << fmt_g17(mt) << ','
          << fmt_g17(sample_sd(tpr, mt)) << ',' << fmt_g17(mf) << ','
          << fmt_g17(sample_sd(fdr, mf)) << '\n';
    }
  return outcome;
}

namespace {

struct ParsedRecord {
  int cell, replicate, est_idx, d, n;
  double er_degree;
  std::string noise, model, estimator;
  bool failed;
  double shd, tpr, fdr;
};

std::vector<ParsedRecord> read_records(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw parse_error("cannot open: " + path);
  std::string line;
  std::getline(in, line);  // header
  std::vector<ParsedRecord> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() < 26) throw parse_error("short record row in " + path);
    ParsedRecord r;
    r.cell = std::stoi(f[0]);
    r.replicate = std::stoi(f[1]);
    r.est_idx = std::stoi(f[2]);
    r.d = std::stoi(f[3]);
    r.er_degree = std::stod(f[4]);
    r.n = std::stoi(f[5]);
    r.noise = f[6];
    r.model = f[8];
    r.estimator = f[9];
    r.failed = f[11] == "1";
    r.shd = std::stod(f[13]);
    r.tpr = std::stod(f[14]);
    r.fdr = std::stod(f[15]);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace

void emit_plot_data(const std::string& sweep_dir, const std::string& plot_dir) {
  const fs::path in_dir(sweep_dir), out_dir(plot_dir);
  fs::create_directories(out_dir);
  const std::vector<ParsedRecord> records = read_records((in_dir / "records.csv").string());

  const char* metric_names[3] = {"shd", "tpr", "fdr"};
  auto metric_of = [](const ParsedRecord& r, int m) {
    return m == 0 ? r.shd : (m == 1 ? r.tpr : r.fdr);
  };

  // ordered axis values
  std::vector<double> degrees;
  std::vector<int> dims;
  std::vector<std::pair<int, std::string>> estimators;  // (est_idx, name)
  for (const auto& r : records) {
    if (std::find(degrees.begin(), degrees.end(), r.er_degree) == degrees.end())
      degrees.push_back(r.er_degree);
    if (std::find(dims.begin(), dims.end(), r.d) == dims.end()) dims.push_back(r.d);
    const std::pair<int, std::string> e{r.est_idx, r.estimator};
    if (std::find(estimators.begin(), estimators.end(), e) == estimators.end())
      estimators.push_back(e);
  }
  std::sort(degrees.begin(), degrees.end());
  std::sort(dims.begin(), dims.end());
  std::sort(estimators.begin(), estimators.end());

  for (double deg : degrees)
    for (int m = 0; m < 3; ++m) {
      std::ostringstream name;
      name << "plot_by_d_er" << deg << "_" << metric_names[m] << ".csv";
      std::ofstream out(out_dir / name.str());
      out << "d,estimator,mean,sd\n";
      for (int d : dims)
        for (const auto& [ei, ename] : estimators) {
          std::vector<double> vals;
          for (const auto& r : records)
            if (!r.failed && r.er_degree == deg && r.d == d && r.est_idx == ei)
              vals.push_back(metric_of(r, m));
          if (vals.empty()) continue;
          double mean = 0.0;
          for (double v : vals) mean += v;
          mean /= vals.size();
          out << d << ',' << ename << ',' << fmt_g17(mean) << ','
              << fmt_g17(sample_sd(vals, mean)) << '\n';
        }
    }

  for (int m = 0; m < 3; ++m) {
    std::ostringstream name;
    name << "plot_by_estimator_" << metric_names[m] << ".csv";
    std::ofstream out(out_dir / name.str());
    out << "d,er_degree,n,noise,estimator,mean,sd\n";
    std::set<std::tuple<int, double, int, std::string>> cells_seen;
    for (const auto& r : records)
      cells_seen.insert({r.d, r.er_degree, r.n, r.noise});
    for (const auto& [d, deg, n, noise] : cells_seen)
      for (const auto& [ei, ename] : estimators) {
        std::vector<double> vals;
        for (const auto& r : records)
          if (!r.failed && r.d == d && r.er_degree == deg && r.n == n && r.noise == noise &&
              r.est_idx == ei)
            vals.push_back(metric_of(r, m));
        if (vals.empty()) continue;
        double mean = 0.0;
        for (double v : vals) mean += v;
        mean /= vals.size();
        out << d << ',' << fmt_g17(deg) << ',' << n << ',' << noise << ',' << ename << ','
            << fmt_g17(mean) << ',' << fmt_g17(sample_sd(vals, mean)) << '\n';
      }
  }

  // missed-true-edge histogram per estimator, 0.25-wide bins over the observed
  // truth-weight range
  std::vector<std::vector<double>> missed(estimators.size());
  double wmin = 0.0, wmax = 0.0;
  bool any_w = false;
  for (const auto& r : records) {
    if (r.failed) continue;
    std::ostringstream tf, ef;
    tf << "c" << r.cell << "_r" << r.replicate << "_truth.csv";
    ef << "c" << r.cell << "_r" << r.replicate << "_e" << r.est_idx << "_" << r.estimator
       << ".csv";
    const fs::path tp = in_dir / "estimates" / tf.str();
    const fs::path ep = in_dir / "estimates" / ef.str();
    if (!fs::exists(tp) || !fs::exists(ep)) continue;
    const Mat truth = load_edge_csv(tp.string(), r.d);
    const Mat est = load_edge_csv(ep.string(), r.d);
    size_t slot = 0;
    for (size_t s = 0; s < estimators.size(); ++s)
      if (estimators[s].first == r.est_idx) slot = s;
    for (int i = 0; i < r.d; ++i)
      for (int j = 0; j < r.d; ++j) {
        if (i == j || std::abs(truth(i, j)) <= 1e-8) continue;
        const double w = truth(i, j);
        if (!any_w) {
          wmin = wmax = w;
          any_w = true;
        }
        wmin = std::min(wmin, w);
        wmax = std::max(wmax, w);
        const bool present = std::abs(est(i, j)) > 1e-8 || std::abs(est(j, i)) > 1e-8;
        if (!present) missed[slot].push_back(w);
      }
  }
  std::ofstream hist(out_dir / "plot_missed_hist.csv");
  hist << "bin_lo,bin_hi,estimator,count\n";
  if (any_w) {
    const double lo = std::floor(wmin / 0.25) * 0.25;
    const double hi = std::ceil(wmax / 0.25) * 0.25;
    const int nb = std::max(1, static_cast<int>(std::lround((hi - lo) / 0.25)));
    for (int b = 0; b < nb; ++b) {
      const double blo = lo + 0.25 * b, bhi = blo + 0.25;
      for (size_t s = 0; s < estimators.size(); ++s) {
        int count = 0;
        for (double w : missed[s])
          if (w >= blo && (w < bhi || (b == nb - 1 && w <= bhi))) ++count;
        hist << fmt_g17(blo) << ',' << fmt_g17(bhi) << ',' << estimators[s].second << ','
             << count << '\n';
      }
    }
  }
}

}  // namespace notears

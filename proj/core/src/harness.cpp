#include "streamopt/harness.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include "streamopt/errors.hpp"
#include "streamopt/version.hpp"

namespace streamopt {

namespace {

std::string fmt_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

struct StreamKeys {
  std::uint64_t data;
  std::uint64_t subsample;
  std::uint64_t init;
};

StreamKeys run_keys(const ExperimentConfig& cfg, int run_id) {
  const std::uint64_t id_h = label_hash(cfg.id);
  const std::uint64_t method_h = label_hash(method_base_name(cfg.method));
  const auto key = [&](Substream s) {
    return stream_key(cfg.seed,
                      {id_h, method_h, static_cast<std::uint64_t>(run_id), substream_tag(s)});
  };
  return {key(Substream::kData), key(Substream::kSubsample), key(Substream::kInit)};
}

struct SingleRun {
  std::vector<RunRecord> rows;
  Vector final_estimate;
  bool diverged = false;
};

SingleRun run_single(const ExperimentConfig& cfg, const CovarianceModel& model,
                     const GroundTruth& truth, const std::vector<long>& checkpoints,
                     int run_id) {
  const StreamKeys keys = run_keys(cfg, run_id);
  RngStream data_rng(keys.data);
  RngStream z_rng(keys.subsample);
  RngStream init_rng(keys.init);

  const std::string series = series_name(cfg);
  Optimizer opt(optimizer_config(cfg), sample_init(truth.theta_star, cfg.r, init_rng));

  SingleRun out;
  out.rows.reserve(checkpoints.size());
  std::vector<Sample> batch;
  std::size_t next_cp = 0;
  long long wall_ns = 0;

  const long total_blocks = checkpoints.back();
  for (long t = 1; t <= total_blocks; ++t) {
    draw_batch(model, truth, batch_size(cfg.batch, t), data_rng, batch);
    try {
      if (cfg.timing) {
        const auto begin = std::chrono::steady_clock::now();
        opt.step(batch, z_rng);
        wall_ns += std::chrono::duration_cast<std::chrono::nanoseconds>(
                       std::chrono::steady_clock::now() - begin)
                       .count();
      } else {
        opt.step(batch, z_rng);
      }
    } catch (const NonFiniteIterate&) {
      out.diverged = true;
      break;
    }
    if (next_cp < checkpoints.size() && t == checkpoints[next_cp]) {
      ++next_cp;
      RunRecord rec;
      rec.method = series;
      rec.run_id = run_id;
      rec.t = t;
      rec.n_seen = opt.samples_seen();
      double err = 0.0;
      const Vector& est = opt.estimate();
      for (int i = 0; i < cfg.dim; ++i) {
        const double delta = est[i] - truth.theta_star[i];
        err += delta * delta;
      }
      rec.sq_error = err;
      rec.wall_ns = wall_ns;
      rec.rank_one_updates = opt.rank_one_updates();
      out.rows.push_back(std::move(rec));
    }
  }
  if (!out.diverged) out.final_estimate = opt.estimate();
  return out;
}

long long llround_nonneg(double x) { return static_cast<long long>(std::llround(x)); }

}  // namespace

std::vector<long> checkpoint_blocks(const BatchSchedule& batch, long samples, int count) {
  if (samples < 1) throw ConfigError("checkpoint_blocks: samples must be >= 1");
  if (count < 1) throw ConfigError("checkpoint_blocks: count must be >= 1");

  // Walk the schedule once to find every block boundary up to the budget.
  std::vector<long> cum;  // cum[i] = N_{i+1}
  long seen = 0;
  for (long t = 1; seen < samples; ++t) {
    seen += batch_size(batch, t);
    cum.push_back(seen);
  }
  const long total_blocks = static_cast<long>(cum.size());
  const double lo = std::log(static_cast<double>(cum.front()));
  const double hi = std::log(static_cast<double>(cum.back()));

  std::vector<long> blocks;
  for (int i = 0; i < count; ++i) {
    const double frac = count == 1 ? 1.0 : static_cast<double>(i) / (count - 1);
    const double target = std::exp(lo + frac * (hi - lo));
    // first block whose cumulative count reaches the target
    const auto it = std::lower_bound(cum.begin(), cum.end(),
                                     static_cast<long>(std::ceil(target - 1e-9)));
    const long t = it == cum.end() ? total_blocks : static_cast<long>(it - cum.begin()) + 1;
    if (blocks.empty() || blocks.back() != t) blocks.push_back(t);
  }
  if (blocks.back() != total_blocks) blocks.push_back(total_blocks);
  return blocks;
}

CovarianceModel experiment_model(const ExperimentConfig& cfg) {
  RngStream model_rng(stream_key(cfg.seed, {label_hash(cfg.id), substream_tag(Substream::kModel)}));
  return CovarianceModel(cfg.dim, model_rng);
}

GroundTruth experiment_truth(const ExperimentConfig& cfg) {
  GroundTruth truth;
  truth.problem = cfg.problem;
  truth.noise_sd = cfg.noise_sd;
  truth.theta_star = cfg.problem == ProblemKind::kLeastSquares ? ls_theta_star(cfg.dim)
                                                               : logit_theta_star(cfg.dim);
  return truth;
}

ExperimentResult run_experiment_detailed(const ExperimentConfig& cfg, int threads) {
  validate_experiment(cfg);
  const CovarianceModel model = experiment_model(cfg);
  const GroundTruth truth = experiment_truth(cfg);
  const std::vector<long> checkpoints = checkpoint_blocks(cfg.batch, cfg.samples, cfg.checkpoints);

  std::vector<SingleRun> runs(cfg.runs);
  const int workers = std::max(1, std::min(threads, cfg.runs));
  if (workers == 1) {
    for (int r = 0; r < cfg.runs; ++r) runs[r] = run_single(cfg, model, truth, checkpoints, r);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (int r = next.fetch_add(1); r < cfg.runs; r = next.fetch_add(1))
          runs[r] = run_single(cfg, model, truth, checkpoints, r);
      });
    }
    for (auto& th : pool) th.join();
  }

  ExperimentResult result;
  result.total_blocks = checkpoints.back();
  {
    long seen = 0;
    for (long t = 1; t <= result.total_blocks; ++t) seen += batch_size(cfg.batch, t);
    result.final_samples = seen;
  }
  result.final_estimates.resize(cfg.runs);
  for (int r = 0; r < cfg.runs; ++r) {
    if (runs[r].diverged) result.diverged_runs.push_back(r);
    result.final_estimates[r] = runs[r].final_estimate;
  }

  // Aggregates over completed runs, one mean and one std row per checkpoint.
  const std::string series = series_name(cfg);
  std::vector<int> completed;
  for (int r = 0; r < cfg.runs; ++r)
    if (!runs[r].diverged) completed.push_back(r);
  if (!completed.empty()) {
    for (std::size_t c = 0; c < checkpoints.size(); ++c) {
      double sq_sum = 0.0;
      double wall_sum = 0.0;
      double upd_sum = 0.0;
      for (int r : completed) {
        const RunRecord& rec = runs[r].rows[c];
        sq_sum += rec.sq_error;
        wall_sum += static_cast<double>(rec.wall_ns);
        upd_sum += static_cast<double>(rec.rank_one_updates);
      }
      const double n_runs = static_cast<double>(completed.size());
      const double sq_mean = sq_sum / n_runs;
      const double wall_mean = wall_sum / n_runs;
      const double upd_mean = upd_sum / n_runs;
      double sq_var = 0.0;
      double wall_var = 0.0;
      double upd_var = 0.0;
      if (completed.size() > 1) {
        for (int r : completed) {
          const RunRecord& rec = runs[r].rows[c];
          sq_var += (rec.sq_error - sq_mean) * (rec.sq_error - sq_mean);
          wall_var += (rec.wall_ns - wall_mean) * (rec.wall_ns - wall_mean);
          upd_var += (rec.rank_one_updates - upd_mean) * (rec.rank_one_updates - upd_mean);
        }
        sq_var /= n_runs - 1.0;
        wall_var /= n_runs - 1.0;
        upd_var /= n_runs - 1.0;
      }
      const RunRecord& proto = runs[completed.front()].rows[c];
      RunRecord mean_row;
      mean_row.method = series + ":mean";
      mean_row.run_id = -1;
      mean_row.t = proto.t;
      mean_row.n_seen = proto.n_seen;
      mean_row.sq_error = sq_mean;
      mean_row.wall_ns = llround_nonneg(wall_mean);
      mean_row.rank_one_updates = static_cast<long>(std::llround(upd_mean));
      RunRecord std_row;
      std_row.method = series + ":std";
      std_row.run_id = -1;
      std_row.t = proto.t;
      std_row.n_seen = proto.n_seen;
      std_row.sq_error = std::sqrt(sq_var);
      std_row.wall_ns = llround_nonneg(std::sqrt(wall_var));
      std_row.rank_one_updates = static_cast<long>(std::llround(std::sqrt(upd_var)));
      result.records.push_back(std::move(mean_row));
      result.records.push_back(std::move(std_row));
    }
  }

  for (int r = 0; r < cfg.runs; ++r)
    for (auto& rec : runs[r].rows) result.records.push_back(std::move(rec));

  std::sort(result.records.begin(), result.records.end(),
            [](const RunRecord& a, const RunRecord& b) {
              if (a.method != b.method) return a.method < b.method;
              if (a.run_id != b.run_id) return a.run_id < b.run_id;
              return a.t < b.t;
            });
  return result;
}

std::vector<RunRecord> run_experiment(const ExperimentConfig& cfg, int threads) {
  return run_experiment_detailed(cfg, threads).records;
}

void write_csv(const std::vector<RunRecord>& records, const std::string& path) {
  if (records.empty()) throw IoError("write_csv: no records");
  std::vector<const RunRecord*> sorted;
  sorted.reserve(records.size());
  for (const auto& rec : records) sorted.push_back(&rec);
  std::stable_sort(sorted.begin(), sorted.end(), [](const RunRecord* a, const RunRecord* b) {
    if (a->method != b->method) return a->method < b->method;
    if (a->run_id != b->run_id) return a->run_id < b->run_id;
    return a->t < b->t;
  });
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("write_csv: cannot open " + path);
  out << "method,run_id,t,n_seen,sq_error,wall_ns,rank_one_updates\n";
  for (const RunRecord* rec : sorted) {
    out << rec->method << ',' << rec->run_id << ',' << rec->t << ',' << rec->n_seen << ','
        << fmt_double(rec->sq_error) << ',' << rec->wall_ns << ',' << rec->rank_one_updates
        << '\n';
  }
  if (!out) throw IoError("write_csv: write failed for " + path);
}

std::vector<RunRecord> read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("read_csv: cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line != "method,run_id,t,n_seen,sq_error,wall_ns,rank_one_updates")
    throw IoError("read_csv: bad header in " + path);
  std::vector<RunRecord> out;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::array<std::string, 7> fields;
    std::size_t start = 0;
    for (int f = 0; f < 7; ++f) {
      const std::size_t comma = line.find(',', start);
      if (f < 6) {
        if (comma == std::string::npos)
          throw IoError("read_csv: line " + std::to_string(lineno) + ": expected 7 fields");
        fields[f] = line.substr(start, comma - start);
        start = comma + 1;
      } else {
        if (comma != std::string::npos)
          throw IoError("read_csv: line " + std::to_string(lineno) + ": expected 7 fields");
        fields[f] = line.substr(start);
      }
    }
    try {
      RunRecord rec;
      rec.method = fields[0];
      rec.run_id = std::stoi(fields[1]);
      rec.t = std::stol(fields[2]);
      rec.n_seen = std::stol(fields[3]);
      rec.sq_error = std::stod(fields[4]);
      rec.wall_ns = std::stoll(fields[5]);
      rec.rank_one_updates = std::stol(fields[6]);
      out.push_back(std::move(rec));
    } catch (const std::exception&) {
      throw IoError("read_csv: line " + std::to_string(lineno) + ": malformed number");
    }
  }
  return out;
}

void write_metadata(const ExperimentConfig& cfg, const ExperimentResult& result,
                    const std::string& csv_path) {
  const std::string path = csv_path + ".meta";
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("write_metadata: cannot open " + path);
  out << "library_version = " << kVersion << "\n";
  out << resolved_config_text(cfg);
  out << "series = " << series_name(cfg) << "\n";
  out << "total_blocks = " << result.total_blocks << "\n";
  out << "final_samples = " << result.final_samples << "\n";
  out << "diverged_count = " << result.diverged_runs.size() << "\n";
  out << "diverged_runs =";
  for (int r : result.diverged_runs) out << ' ' << r;
  out << "\n";
  if (!out) throw IoError("write_metadata: write failed for " + path);
}

CostReport report_cost(const std::vector<RunRecord>& records, std::optional<double> p) {
  // Final row per (method, run): records are per-checkpoint cumulative.
  std::map<std::pair<std::string, int>, const RunRecord*> finals;
  for (const auto& rec : records) {
    if (rec.run_id < 0) continue;  // aggregates
    auto key = std::make_pair(rec.method, rec.run_id);
    auto [it, inserted] = finals.emplace(key, &rec);
    if (!inserted && rec.t > it->second->t) it->second = &rec;
  }

  CostReport report;
  for (const auto& [key, rec] : finals) {
    CostEntry e;
    e.method = key.first;
    e.run_id = key.second;
    e.n_seen = rec->n_seen;
    e.updates = rec->rank_one_updates;
    e.per_sample = static_cast<double>(rec->rank_one_updates) / static_cast<double>(rec->n_seen);
    const bool subsampled_curvature = e.method.rfind("ssn", 0) == 0 ||
                                      e.method.rfind("wassn", 0) == 0 ||
                                      e.method.rfind("newton_direct", 0) == 0;
    if (subsampled_curvature) {
      if (!p.has_value())
        throw ConfigError("report_cost: inclusion probability required to band-check " + e.method);
      const double pn = *p * static_cast<double>(e.n_seen);
      const double half = 3.0 * std::sqrt(4.0 * static_cast<double>(e.n_seen) * *p * (1.0 - *p));
      e.band_checked = true;
      e.band_lo = 2.0 * pn - half;
      e.band_hi = 2.0 * pn + half;
      e.in_band = e.updates >= e.band_lo && e.updates <= e.band_hi;
      if (!e.in_band) report.all_in_band = false;
    }
    report.entries.push_back(std::move(e));
  }
  return report;
}

void dump_stream(const ExperimentConfig& cfg, int run_id, long samples, const std::string& path) {
  if (run_id < 0) throw ConfigError("dump_stream: run_id must be >= 0");
  const CovarianceModel model = experiment_model(cfg);
  const GroundTruth truth = experiment_truth(cfg);
  RngStream data_rng(run_keys(cfg, run_id).data);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("dump_stream: cannot open " + path);
  Vector x(cfg.dim, 0.0);
  Vector zbuf(cfg.dim, 0.0);
  for (long i = 0; i < samples; ++i) {
    model.sample_x_into(data_rng, x, zbuf);
    const double y = sample_label(truth, x, data_rng);
    for (int k = 0; k < cfg.dim; ++k) out << fmt_double(x[k]) << ',';
    out << fmt_double(y) << '\n';
  }
  if (!out) throw IoError("dump_stream: write failed for " + path);
}

}  // namespace streamopt

#include "zupt/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <ostream>
#include <set>
#include <thread>

#include "zupt/windowing.hpp"

namespace zupt {

namespace {

// Runs job(i) for i in [0, n) on up to `threads` workers; rethrows the first
// failure after all workers stop.
template <typename Job>
void parallel_for(std::size_t n, std::size_t threads, Job job) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, n);
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (std::size_t w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          job(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

RunReport cmd_run(const Recording& recording, const Config& config) {
  RunReport report;
  report.recording_id = recording.id;
  report.result = run_pipeline(recording.stream, pipeline_config(config));
  report.params_used = config.entries();
  return report;
}

double rmse(std::span<const double> errors) {
  if (errors.empty()) return 0.0;
  double sum = 0.0;
  for (double e : errors) sum += e * e;
  return std::sqrt(sum / static_cast<double>(errors.size()));
}

std::vector<double> c1_grid(const Config& config) {
  const double lo = config.number("sweep_c1_min");
  const double hi = config.number("sweep_c1_max");
  const std::size_t n = config.count("sweep_points");
  if (n == 0) throw Error(ErrorKind::Config, "sweep_points must be at least 1");
  if (!(std::isfinite(lo) && std::isfinite(hi))) throw Error(ErrorKind::Config, "sweep bounds must be finite");
  std::vector<double> grid(n);
  for (std::size_t i = 0; i < n; ++i) {
    grid[i] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return grid;
}

std::vector<SweepRow> cmd_sweep(std::span<const Recording> recordings, const Config& config,
                                std::span<const double> grid) {
  if (grid.empty()) throw Error(ErrorKind::Config, "sweep needs a non-empty threshold grid");

  std::vector<const Recording*> usable;
  for (const auto& r : recordings) {
    if (r.loop_length_m) {
      usable.push_back(&r);
    } else {
      warn("recording '" + r.id + "' has no loop length; excluded from RMSE tables");
    }
  }

  const PipelineConfig adaptive = pipeline_config(config);
  std::vector<PipelineConfig> configs;
  for (double c1 : grid) {
    PipelineConfig fixed = adaptive;
    fixed.mode = ThresholdMode::Fixed;
    fixed.fixed_log_gamma = c1;
    fixed.threshold = ThresholdParams{c1, 0.0, 0.0};
    configs.push_back(fixed);
  }
  PipelineConfig adaptive_run = adaptive;
  adaptive_run.mode = ThresholdMode::Adaptive;
  configs.push_back(adaptive_run);

  // errors[c][r]: loop-closure error of recording r under configuration c.
  std::vector<std::vector<double>> errors(configs.size(), std::vector<double>(usable.size(), 0.0));
  const std::size_t jobs = configs.size() * usable.size();
  parallel_for(jobs, config.count("threads"), [&](std::size_t j) {
    const std::size_t c = j / usable.size();
    const std::size_t r = j % usable.size();
    errors[c][r] = run_pipeline(usable[r]->stream, configs[c]).loop_closure_error_m;
  });

  std::set<std::string> tags;
  for (const auto* r : usable) {
    if (r->gait_tag) tags.insert(*r->gait_tag);
  }
  std::vector<std::string> subsets(tags.begin(), tags.end());
  subsets.push_back("all");

  std::vector<SweepRow> rows;
  for (const auto& subset : subsets) {
    for (std::size_t c = 0; c < configs.size(); ++c) {
      std::vector<double> subset_errors;
      for (std::size_t r = 0; r < usable.size(); ++r) {
        if (subset == "all" || usable[r]->gait_tag == subset) subset_errors.push_back(errors[c][r]);
      }
      const bool is_adaptive = c + 1 == configs.size();
      rows.push_back({is_adaptive ? "adaptive" : "fixed", is_adaptive ? adaptive.threshold.c1 : grid[c], subset,
                      rmse(subset_errors), subset_errors.size()});
    }
  }
  return rows;
}

void write_sweep_table(std::ostream& out, std::span<const SweepRow> rows) {
  out << "threshold_mode,c1,subset,rmse_m,n_recordings\n";
  for (const auto& r : rows) {
    out << r.threshold_mode << ',' << format_double(r.c1) << ',' << r.subset << ',' << format_double(r.rmse_m) << ','
        << r.n_recordings << '\n';
  }
}

std::vector<ImuSample> concatenate_streams(std::span<const Recording> recordings) {
  std::vector<ImuSample> joined;
  for (const auto& rec : recordings) {
    if (rec.stream.empty()) throw Error(ErrorKind::EmptyStream, "recording '" + rec.id + "' is empty");
    double shift = 0.0;
    if (!joined.empty()) {
      const double period = rec.stream.size() >= 2 ? median_period(rec.stream) : median_period(joined);
      shift = joined.back().t + period - rec.stream.front().t;
    }
    for (auto s : rec.stream) {
      s.t += shift;
      joined.push_back(s);
    }
  }
  return joined;
}

ConcatResult cmd_concat(std::span<const Recording> recordings, const Config& config) {
  if (recordings.empty()) throw Error(ErrorKind::EmptyStream, "concat needs at least one recording");
  Recording joined;
  joined.stream = concatenate_streams(recordings);
  for (const auto& r : recordings) joined.id += (joined.id.empty() ? "" : "+") + r.id;
  if (recordings.size() > 3) joined.id = recordings.front().id + "+" + std::to_string(recordings.size() - 1) + "_more";

  ConcatResult out;
  out.report = cmd_run(joined, config);
  out.n_samples = joined.stream.size();
  out.final_position_error_m = out.report.result.loop_closure_error_m;
  return out;
}

ThresholdParams cmd_calibrate(std::span<const ImuSample> stream, std::span<const std::uint8_t> labels,
                              const Config& config) {
  const double epsilon = config.number("epsilon");
  if (!(epsilon > 0.0 && epsilon < 0.5)) throw Error(ErrorKind::Config, "epsilon must lie in (0, 0.5)");
  const PipelineConfig pc = pipeline_config(config);
  const auto sets = extract_calibration_sets(stream, labels, pc);

  CalibrationInputs in;
  in.stationary_log_lr = sets.stationary_log_lr;
  in.midstance_log_lr = sets.midstance_log_lr;
  in.swing_log_lr = sets.swing_log_lr;
  in.swing_xi_star = sets.xi_star;
  in.dtau = config.number("dtau");
  in.epsilon = epsilon;
  in.prior = pc.prior;
  return calibrate(in);
}

}  // namespace zupt

#include "otto/runner.hpp"

#include <atomic>
#include <condition_variable>
#include <fstream>
#include <functional>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "otto/metrics.hpp"

namespace otto {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

std::string file_tag(Variant v) {
  switch (v) {
    case Variant::UNA:
      return "UNA";
    case Variant::STA:
      return "STA";
    case Variant::STAE:
      return "STAE";
  }
  return "X";
}

std::string clean_message(std::string s) {
  for (char& c : s) {
    if (c == ',' || c == '\n' || c == '\r' || c == '"') {
      c = c == ',' ? ';' : ' ';
    }
  }
  return s;
}

struct Block {
  std::string text;
  bool failed = false;
};

struct FilePlan {
  std::string name;
  std::string header;
  std::vector<std::function<Block()>> tasks;
};

std::string join(const std::vector<std::string>& cells) {
  std::string out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    out += (i ? "," : "") + cells[i];
  }
  return out + "\n";
}

const char* kSweepHeader =
    "tau_adi,tau_iso,power,eta_th,eta_op,C12,C23,C34,C_total,converged_cycles,not_an_engine,error\n";

Block sweep_row(const RunSpec& spec, Variant v, double adi, double iso) {
  const EngineConfig cfg = spec.at(v, adi, iso);
  std::vector<std::string> cells{format_number(adi), format_number(iso)};
  try {
    std::optional<CycleOutcome> outcome;
    std::string cycles;
    std::string note;
    if (spec.mode == RunMode::LimitCycle) {
      LimitCycleReport report = run_to_limit_cycle(cfg, spec.fidelity_tol, spec.max_cycles);
      outcome.emplace(report.final_cycle());
      if (report.converged) {
        cycles = std::to_string(report.cycles_run);
      } else {
        note = "not converged after " + std::to_string(report.cycles_run) + " cycles";
      }
    } else {
      outcome.emplace(run_cycle(thermal_state(cfg.omega_c, cfg.T_c, cfg.basis()), cfg));
    }
    const CycleOutcome& o = *outcome;
    for (double x : {o.power, o.eta_th, o.eta_op, o.C12, o.C23, o.C34, o.total_cost()}) {
      cells.push_back(format_number(x));
    }
    cells.push_back(cycles);
    cells.push_back(o.not_an_engine ? "1" : "0");
    cells.push_back(note);
    return {join(cells), false};
  } catch (const std::exception& e) {
    for (int i = 0; i < 7; ++i) {
      cells.push_back("nan");
    }
    cells.push_back("");
    cells.push_back("");
    cells.push_back(clean_message(e.what()));
    return {join(cells), true};
  }
}

Block fidelity_row(const RunSpec& spec, Variant v, double adi, double iso) {
  const EngineConfig cfg = spec.at(v, adi, iso);
  std::vector<std::string> cells{format_number(adi), format_number(iso), "1"};
  try {
    const CycleOutcome o = run_cycle(thermal_state(cfg.omega_c, cfg.T_c, cfg.basis()), cfg);
    for (double f : stroke_fidelities(o, cfg)) {
      cells.push_back(format_number(f));
    }
    cells.push_back("");
    return {join(cells), false};
  } catch (const std::exception& e) {
    for (int i = 0; i < 4; ++i) {
      cells.push_back("nan");
    }
    cells.push_back(clean_message(e.what()));
    return {join(cells), true};
  }
}

Block coherence_rows(const RunSpec& spec, Variant v, double tau) {
  const EngineConfig cfg = spec.at(v, tau, tau);
  try {
    const LimitCycleReport report = run_to_limit_cycle(cfg, spec.fidelity_tol, spec.max_cycles);
    std::string text;
    for (int k = 0; k < report.cycles_run; ++k) {
      text += join({format_number(tau), std::to_string(k + 1), format_number(report.coherence[k]),
                    ""});
    }
    return {text, false};
  } catch (const std::exception& e) {
    return {join({format_number(tau), "", "nan", clean_message(e.what())}), true};
  }
}

std::vector<FilePlan> plan_for(const RunSpec& spec) {
  std::vector<FilePlan> plans;
  const auto adi = spec.tau_adi.values();
  const auto iso = spec.tau_iso.values();
  for (Variant v : spec.variants) {
    FilePlan plan;
    switch (spec.mode) {
      case RunMode::SingleCycle:
      case RunMode::LimitCycle:
        plan.name = "sweep_" + to_string(spec.mode) + "_" + file_tag(v) + ".csv";
        plan.header = kSweepHeader;
        for (double a : adi) {
          for (double i : iso) {
            plan.tasks.push_back([&spec, v, a, i] { return sweep_row(spec, v, a, i); });
          }
        }
        break;
      case RunMode::FidelityReport:
        plan.name = "fidelity_" + file_tag(v) + ".csv";
        plan.header = "tau_adi,tau_iso,cycle,F_compression,F_hot,F_expansion,F_cold,error\n";
        for (double a : adi) {
          for (double i : iso) {
            plan.tasks.push_back([&spec, v, a, i] { return fidelity_row(spec, v, a, i); });
          }
        }
        break;
      case RunMode::CoherenceReport:
        plan.name = "coherence_" + file_tag(v) + ".csv";
        plan.header = "tau,cycle_number,l1_coherence,error\n";
        for (double a : adi) {
          plan.tasks.push_back([&spec, v, a] { return coherence_rows(spec, v, a); });
        }
        break;
    }
    plans.push_back(std::move(plan));
  }
  return plans;
}

struct FileProgress {
  std::size_t completed = 0;
  std::uintmax_t bytes = 0;
};

std::string hex(std::uint64_t h) {
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << h;
  return os.str();
}

void write_manifest(const RunSpec& spec, const std::vector<FilePlan>& plans,
                    const std::vector<FileProgress>& progress) {
  const EngineConfig& e = spec.engine;
  json m;
  m["config_hash"] = hex(spec.hash());
  m["code_version"] = kCodeVersion;
  m["mode"] = to_string(spec.mode);
  m["dim"] = e.dim;
  m["dt"] = {{"policy", "tau / max(steps, ceil(tau * spectral_bound / stiffness_limit)), "
                        "rounded up to even, times substeps"},
             {"steps", e.propagation.min_steps},
             {"stiffness_limit", e.propagation.stiffness_limit},
             {"substeps", e.propagation.substeps}};
  m["config"] = spec.canonical();
  json files = json::array();
  for (std::size_t f = 0; f < plans.size(); ++f) {
    files.push_back({{"name", plans[f].name},
                     {"rows_total", plans[f].tasks.size()},
                     {"rows_completed", progress[f].completed},
                     {"bytes", progress[f].bytes}});
  }
  m["files"] = files;
  const fs::path path = spec.output_dir / "manifest.json";
  const fs::path tmp = spec.output_dir / "manifest.json.tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << m.dump(2) << "\n";
    if (!out) {
      throw Error("cannot write " + tmp.string());
    }
  }
  fs::rename(tmp, path);
}

// Completed prefix of each file according to an existing manifest with the same hash.
std::vector<FileProgress> resume_state(const RunSpec& spec, const std::vector<FilePlan>& plans) {
  std::vector<FileProgress> progress(plans.size());
  const fs::path path = spec.output_dir / "manifest.json";
  if (!fs::exists(path)) {
    return progress;
  }
  json m;
  try {
    std::ifstream in(path, std::ios::binary);
    m = json::parse(in);
  } catch (const std::exception&) {
    return progress;
  }
  if (m.value("config_hash", std::string{}) != hex(spec.hash())) {
    return progress;
  }
  for (const auto& entry : m.value("files", json::array())) {
    for (std::size_t f = 0; f < plans.size(); ++f) {
      if (entry.value("name", std::string{}) != plans[f].name) {
        continue;
      }
      const fs::path csv = spec.output_dir / plans[f].name;
      const auto bytes = entry.value("bytes", std::uintmax_t{0});
      const auto done = entry.value("rows_completed", std::size_t{0});
      if (fs::exists(csv) && fs::file_size(csv) >= bytes && done <= plans[f].tasks.size() &&
          bytes > 0) {
        progress[f] = {done, bytes};
      }
    }
  }
  return progress;
}

RunSummary execute(const RunSpec& spec) {
  spec.validate();
  fs::create_directories(spec.output_dir);
  std::vector<FilePlan> plans = plan_for(spec);
  std::vector<FileProgress> progress = resume_state(spec, plans);

  RunSummary summary;
  std::vector<std::ofstream> outs(plans.size());
  struct Job {
    std::size_t file;
    std::size_t task;
  };
  std::vector<Job> jobs;
  for (std::size_t f = 0; f < plans.size(); ++f) {
    const fs::path csv = spec.output_dir / plans[f].name;
    summary.files.push_back(csv);
    summary.tasks_total += static_cast<int>(plans[f].tasks.size());
    if (progress[f].bytes > 0) {
      fs::resize_file(csv, progress[f].bytes);
      outs[f].open(csv, std::ios::binary | std::ios::app);
      summary.tasks_resumed += static_cast<int>(progress[f].completed);
    } else {
      outs[f].open(csv, std::ios::binary | std::ios::trunc);
      outs[f] << plans[f].header;
      outs[f].flush();
      progress[f] = {0, plans[f].header.size()};
    }
    if (!outs[f]) {
      throw Error("cannot open " + csv.string() + " for writing");
    }
    for (std::size_t t = progress[f].completed; t < plans[f].tasks.size(); ++t) {
      jobs.push_back({f, t});
    }
  }
  write_manifest(spec, plans, progress);

  // Workers fill result slots in any order; this thread writes them in job order.
  std::vector<std::optional<Block>> results(jobs.size());
  std::mutex mu;
  std::condition_variable ready;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t j = next++; j < jobs.size(); j = next++) {
      Block b = plans[jobs[j].file].tasks[jobs[j].task]();
      {
        std::lock_guard<std::mutex> lock(mu);
        results[j] = std::move(b);
      }
      ready.notify_all();
    }
  };
  const int n_threads = std::max(1, std::min<int>(spec.workers, static_cast<int>(jobs.size())));
  std::vector<std::jthread> pool;
  for (int i = 0; i < n_threads && !jobs.empty(); ++i) {
    pool.emplace_back(worker);
  }
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    Block b;
    {
      std::unique_lock<std::mutex> lock(mu);
      ready.wait(lock, [&] { return results[j].has_value(); });
      b = std::move(*results[j]);
      results[j].reset();
    }
    const std::size_t f = jobs[j].file;
    outs[f] << b.text;
    outs[f].flush();
    progress[f].completed += 1;
    progress[f].bytes += b.text.size();
    summary.tasks_run += 1;
    summary.failures += b.failed ? 1 : 0;
    write_manifest(spec, plans, progress);
  }
  return summary;
}

}  // namespace

RunSummary run_sweep(const RunSpec& spec) {
  if (spec.mode != RunMode::SingleCycle && spec.mode != RunMode::LimitCycle) {
    throw InvalidArgument("run_sweep needs mode single or limit");
  }
  return execute(spec);
}

RunSummary run_reports(const RunSpec& spec) {
  if (spec.mode != RunMode::FidelityReport && spec.mode != RunMode::CoherenceReport) {
    throw InvalidArgument("run_reports needs mode fidelity or coherence");
  }
  return execute(spec);
}

RunSummary run(const RunSpec& spec) { return execute(spec); }

}  // namespace otto

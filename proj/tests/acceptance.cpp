// Acceptance suite: one PASS/FAIL line per criterion.
//
//   otto_acceptance [--only 1,5,12] [--strict]
//
// Runs at the desk scale (dim 80, tau/2000 steps). Exit status is 0 when every
// selected criterion was evaluated; --strict makes any FAIL line fatal too.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "otto/engine.hpp"
#include "otto/metrics.hpp"

using namespace otto;

namespace {

const std::vector<double> kGrid{0.7, 2.4, 4.1, 5.8, 7.5};
const std::vector<double> kShort{0.7, 1.0, 1.5, 2.0};
constexpr int kLimitCap = 60;  // enough to reach the fixed point on the diagonal
constexpr double kLimitTol = 1.0 - 1e-6;

EngineConfig config(Variant v, double a, double i) {
  EngineConfig c;
  c.variant = v;
  c.tau_adi = a;
  c.tau_iso = i;
  return c;
}

struct Point {
  double power = 0, eta_th = 0, eta_op = 0, heat_in = 0;
  double W12 = 0, Q23 = 0, W34 = 0, Q41 = 0;
  double C12 = 0, C23 = 0, C34 = 0;
  std::array<double, 4> fidelity{};
  double worst_trace = 0, worst_floor = 0;
  std::string error;

  double total_cost() const { return C12 + C23 + C34; }
};

Point summarize(const CycleOutcome& o, const EngineConfig& c) {
  Point p;
  p.power = o.power;
  p.eta_th = o.eta_th;
  p.eta_op = o.eta_op;
  p.heat_in = o.heat_in;
  p.W12 = o.W12;
  p.Q23 = o.Q23;
  p.W34 = o.W34;
  p.Q41 = o.Q41;
  p.C12 = o.C12;
  p.C23 = o.C23;
  p.C34 = o.C34;
  p.fidelity = stroke_fidelities(o, c);
  for (const StrokeLedger* l : {&o.compression, &o.hot, &o.expansion, &o.cold}) {
    p.worst_trace = std::max(p.worst_trace, l->trace_drift);
    p.worst_floor = std::min(p.worst_floor, l->positivity_floor);
  }
  return p;
}

Point single_cycle(const EngineConfig& c) {
  try {
    return summarize(run_cycle(thermal_state(c.omega_c, c.T_c, c.basis()), c), c);
  } catch (const std::exception& e) {
    Point p;
    p.error = e.what();
    p.power = p.eta_th = p.eta_op = NAN;
    return p;
  }
}

struct Limit {
  int cycles = 0;
  bool converged = false;
  bool contractive = true;
  double worst_rise = 0;
  Point first, last;
  std::vector<double> coherence;
  std::string error;
};

Limit limit_cycle(const EngineConfig& c, int cap) {
  Limit l;
  try {
    const LimitCycleReport r = run_to_limit_cycle(c, kLimitTol, cap);
    l.cycles = r.cycles_run;
    l.converged = r.converged;
    l.first = summarize(r.cycles.front(), c);
    l.last = summarize(r.final_cycle(), c);
    l.coherence = r.coherence;
    for (std::size_t k = 1; k < r.distance_to_final.size(); ++k) {
      const double rise = r.distance_to_final[k] - r.distance_to_final[k - 1];
      l.worst_rise = std::max(l.worst_rise, rise);
      if (rise > 1e-10) {
        l.contractive = false;
      }
    }
  } catch (const std::exception& e) {
    l.error = e.what();
  }
  return l;
}

// Lazily computed shared data, so a subset run only pays for what it uses.
class Data {
 public:
  const Point& single(Variant v, double a, double i) {
    const auto key = std::make_tuple(v, a, i);
    auto it = single_.find(key);
    if (it == single_.end()) {
      it = single_.emplace(key, single_cycle(config(v, a, i))).first;
    }
    return it->second;
  }
  const Limit& limit(Variant v, double a, double i) {
    const int cap = a == i ? kLimitCap : 10;
    const auto key = std::make_tuple(v, a, i);
    auto it = limit_.find(key);
    if (it == limit_.end()) {
      it = limit_.emplace(key, limit_cycle(config(v, a, i), cap)).first;
    }
    return it->second;
  }

 private:
  std::map<std::tuple<Variant, double, double>, Point> single_;
  std::map<std::tuple<Variant, double, double>, Limit> limit_;
};

struct Verdict {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& why) {
    if (!ok) {
      if (!pass) {
        detail << "; ";
      }
      pass = false;
      detail << why;
    }
  }
};

std::string fmt(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

std::string at(double a, double i) { return "(" + fmt(a, 3) + "," + fmt(i, 3) + ")"; }

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-12); }

using Criterion = std::function<std::string(Data&, Verdict&)>;

// 1. Quasistatic oracle.
std::string quasistatic(Data&, Verdict& v) {
  const EngineConfig c = config(Variant::UNA, 50.0, 50.0);
  const Point p = single_cycle(c);
  const QuasistaticLedger q = quasistatic_oracle(c);
  const double worst = std::max({rel(p.W12, q.W12), rel(p.Q23, q.Q23), rel(p.W34, q.W34),
                                 rel(p.Q41, q.Q41)});
  v.require(p.error.empty(), p.error);
  v.require(worst < 0.01, "ledger off by " + fmt(worst));
  v.require(std::abs(p.eta_th - 0.6) <= 0.01, "eta " + fmt(p.eta_th));
  return "worst ledger rel err " + fmt(worst, 3) + ", eta " + fmt(p.eta_th, 5);
}

// 2. UNA failure at the shortest strokes.
std::string una_failure(Data& d, Verdict& v) {
  const double una = d.single(Variant::UNA, 0.7, 0.7).power;
  const double sta = d.single(Variant::STA, 0.7, 0.7).power;
  const double stae = d.single(Variant::STAE, 0.7, 0.7).power;
  v.require(una < 0, "UNA power " + fmt(una));
  v.require(sta > 0, "STA power " + fmt(sta));
  v.require(stae > 0, "STAE power " + fmt(stae));
  return "P_UNA " + fmt(una, 4) + ", P_STA " + fmt(sta, 4) + ", P_STAE " + fmt(stae, 4);
}

// 3. Power ordering on short cycles.
std::string ordering(Data& d, Verdict& v) {
  std::string out;
  for (double t : kShort) {
    const double una = d.single(Variant::UNA, t, t).power;
    const double sta = d.single(Variant::STA, t, t).power;
    const double stae = d.single(Variant::STAE, t, t).power;
    v.require(stae > sta && sta > una, "order broken at tau " + fmt(t));
    out += (out.empty() ? "" : "; ") + fmt(t, 2) + ": " + fmt(stae, 3) + ">" + fmt(sta, 3) + ">" +
           fmt(una, 3);
  }
  return out;
}

// 4. STAE thermodynamic efficiency over the grid.
std::string stae_efficiency(Data& d, Verdict& v) {
  double worst = 0;
  for (double a : kGrid) {
    for (double i : kGrid) {
      const Point& p = d.single(Variant::STAE, a, i);
      const double dev = std::abs(p.eta_th - 0.6);
      worst = std::max(worst, std::isnan(dev) ? INFINITY : dev);
      v.require(dev <= 1e-2, "eta_th " + fmt(p.eta_th) + " at " + at(a, i));
    }
  }
  return "max |eta_th - 0.6| = " + fmt(worst, 3);
}

// 5. Efficiency bounds.
std::string bounds(Data& d, Verdict& v) {
  const double carnot = reference_bounds(EngineConfig{}).carnot;
  int checked = 0;
  for (Variant var : kAllVariants) {
    for (double a : kGrid) {
      for (double i : kGrid) {
        const Point& p = d.single(var, a, i);
        if (!(p.heat_in > 0)) {
          continue;
        }
        ++checked;
        v.require(p.eta_op <= carnot, to_string(var) + " eta_op above Carnot at " + at(a, i));
        v.require(p.eta_op <= p.eta_th + 1e-12,
                  to_string(var) + " eta_op > eta_th at " + at(a, i));
      }
    }
  }
  std::string out = fmt(checked, 3) + " points bounded; at tau 7.5:";
  for (Variant var : kAllVariants) {
    const Point& p = d.single(var, 7.5, 7.5);
    v.require(std::abs(p.eta_th - 0.6) <= 0.02, to_string(var) + " eta_th " + fmt(p.eta_th));
    v.require(std::abs(p.eta_op - 0.6) <= 0.02, to_string(var) + " eta_op " + fmt(p.eta_op));
    out += " " + to_string(var) + " " + fmt(p.eta_th, 4) + "/" + fmt(p.eta_op, 4);
  }
  return out;
}

// 6. Shortcut fidelities.
std::string fidelities(Data& d, Verdict& v) {
  double stae_min = 1, sta_min = 1;
  for (double a : kGrid) {
    for (double i : kGrid) {
      const Point& s = d.single(Variant::STAE, a, i);
      for (int k = 0; k < 3; ++k) {
        stae_min = std::min(stae_min, s.fidelity[k]);
        v.require(s.fidelity[k] >= 0.999, "STAE stroke " + std::to_string(k + 1) + " F " +
                                              fmt(s.fidelity[k]) + " at " + at(a, i));
      }
      const Point& t = d.single(Variant::STA, a, i);
      sta_min = std::min(sta_min, t.fidelity[0]);
      v.require(t.fidelity[0] >= 0.999, "STA compression F " + fmt(t.fidelity[0]) + " at " + at(a, i));
    }
  }
  return "min STAE F " + fmt(stae_min, 7) + ", min STA compression F " + fmt(sta_min, 7);
}

// 7. Limit-cycle existence, speed and contraction.
std::string convergence(Data& d, Verdict& v) {
  std::string out;
  for (Variant var : kAllVariants) {
    int within = 0, total = 0, slowest = 0;
    std::string slow_at;
    for (double a : kGrid) {
      for (double i : kGrid) {
        const Limit& l = d.limit(var, a, i);
        ++total;
        v.require(l.error.empty(), l.error);
        v.require(l.contractive, to_string(var) + " distance rose by " + fmt(l.worst_rise) +
                                     " at " + at(a, i));
        const int n = l.converged ? l.cycles : 1000;
        if (n <= 10) {
          ++within;
        }
        if (n > slowest) {
          slowest = n;
          slow_at = at(a, i);
        }
      }
    }
    v.require(within == total, to_string(var) + " " + std::to_string(total - within) +
                                   " points need more than 10 cycles");
    out += (out.empty() ? "" : "; ") + to_string(var) + " " + std::to_string(within) + "/" +
           std::to_string(total) + " within 10 (slowest " +
           (slowest >= 1000 ? std::string(">cap") : std::to_string(slowest)) + " at " + slow_at + ")";
  }
  return out;
}

// 8. Limit-cycle power.
std::string limit_power(Data& d, Verdict& v) {
  std::string out;
  for (double t : kGrid) {
    const Limit& l = d.limit(Variant::STAE, t, t);
    const double single = d.single(Variant::STAE, t, t).power;
    v.require(l.last.power > single, "STAE limit " + fmt(l.last.power) + " <= single " +
                                         fmt(single) + " at tau " + fmt(t));
    out += (out.empty() ? "STAE limit/single: " : ", ") + fmt(l.last.power, 4) + "/" +
           fmt(single, 4);
  }
  for (double t : {0.7, 1.0}) {
    const double una = d.limit(Variant::UNA, t, t).last.power;
    const double sta = d.limit(Variant::STA, t, t).last.power;
    const double stae = d.limit(Variant::STAE, t, t).last.power;
    v.require(stae > sta && sta > una, "limit order broken at tau " + fmt(t));
    out += "; tau " + fmt(t, 2) + " limit " + fmt(stae, 4) + ">" + fmt(sta, 4) + ">" + fmt(una, 4);
  }
  return out;
}

// 9. Cost monotonicity.
std::string cost_trends(Data& d, Verdict& v) {
  int pairs = 0;
  for (Variant var : {Variant::STA, Variant::STAE}) {
    for (double i : kGrid) {
      for (std::size_t k = 1; k < kGrid.size(); ++k) {
        const Point& lo = d.single(var, kGrid[k - 1], i);
        const Point& hi = d.single(var, kGrid[k], i);
        v.require(hi.C12 < lo.C12, to_string(var) + " C12 rises along tau_adi at tau_iso " + fmt(i));
        v.require(hi.C34 < lo.C34, to_string(var) + " C34 rises along tau_adi at tau_iso " + fmt(i));
        pairs += 2;
      }
    }
  }
  for (double a : kGrid) {
    for (std::size_t k = 1; k < kGrid.size(); ++k) {
      const Point& lo = d.single(Variant::STAE, a, kGrid[k - 1]);
      const Point& hi = d.single(Variant::STAE, a, kGrid[k]);
      v.require(hi.C23 < lo.C23, "C23 rises along tau_iso at tau_adi " + fmt(a));
      ++pairs;
    }
  }
  std::string out = std::to_string(pairs) + " neighbour pairs; limit/single total cost at 0.7:";
  for (Variant var : {Variant::STA, Variant::STAE}) {
    const double lim = d.limit(var, 0.7, 0.7).last.total_cost();
    const double one = d.single(var, 0.7, 0.7).total_cost();
    v.require(lim >= one, to_string(var) + " limit cost " + fmt(lim) + " < single " + fmt(one));
    out += " " + to_string(var) + " " + fmt(lim, 4) + "/" + fmt(one, 4);
  }
  return out;
}

// 10. Expansion costs more than compression.
std::string cost_ordering(Data& d, Verdict& v) {
  std::string out;
  for (Variant var : {Variant::STA, Variant::STAE}) {
    double c12 = 0, c34 = 0;
    for (double a : kGrid) {
      for (double i : kGrid) {
        c12 = std::max(c12, d.single(var, a, i).C12);
        c34 = std::max(c34, d.single(var, a, i).C34);
      }
    }
    v.require(c34 > c12, to_string(var) + " max C34 " + fmt(c34) + " <= max C12 " + fmt(c12));
    out += (out.empty() ? "" : "; ") + to_string(var) + " max C34 " + fmt(c34, 4) + " vs C12 " +
           fmt(c12, 4);
  }
  return out;
}

// 11. Coherence accumulation.
std::string coherence(Data& d, Verdict& v) {
  const Limit& fast = d.limit(Variant::STAE, 0.7, 0.7);
  const Limit& slow = d.limit(Variant::STAE, 7.5, 7.5);
  auto monotone = [&](const Limit& l, const char* name) {
    for (std::size_t k = 1; k < l.coherence.size(); ++k) {
      if (l.coherence[k] < l.coherence[k - 1]) {
        v.require(false, std::string("tau ") + name + " coherence drops at cycle " +
                             std::to_string(k + 1) + " (" + fmt(l.coherence[k - 1], 4) + " -> " +
                             fmt(l.coherence[k], 4) + ")");
        return;
      }
    }
  };
  monotone(fast, "0.7");
  monotone(slow, "7.5");
  // After convergence the sequence stays at its last value.
  const std::size_t n = std::max(fast.coherence.size(), slow.coherence.size());
  for (std::size_t k = 0; k < n && !fast.coherence.empty() && !slow.coherence.empty(); ++k) {
    const double a = fast.coherence[std::min(k, fast.coherence.size() - 1)];
    const double b = slow.coherence[std::min(k, slow.coherence.size() - 1)];
    v.require(a > b, "tau 0.7 not above tau 7.5 at cycle " + std::to_string(k + 1));
  }
  std::string out = "tau 0.7:";
  for (std::size_t k = 0; k < std::min<std::size_t>(fast.coherence.size(), 6); ++k) {
    out += " " + fmt(fast.coherence[k], 3);
  }
  out += " ... " + fmt(fast.coherence.back(), 3) + "; tau 7.5:";
  for (double c : slow.coherence) {
    out += " " + fmt(c, 3);
  }
  return out;
}

// 12. Numerical hygiene.
std::string hygiene(Data& d, Verdict& v) {
  double trace = 0, floor = 0;
  for (Variant var : kAllVariants) {
    for (double a : kGrid) {
      for (double i : kGrid) {
        const Point& p = d.single(var, a, i);
        trace = std::max(trace, p.worst_trace);
        floor = std::min(floor, p.worst_floor);
      }
    }
  }
  v.require(trace < 1e-8, "trace drift " + fmt(trace));
  v.require(floor >= -1e-8, "positivity floor " + fmt(floor));

  double halving = 0;
  for (Variant var : kAllVariants) {
    for (double t : {0.7, 7.5}) {
      EngineConfig fine = config(var, t, t);
      fine.propagation = fine.propagation.refined();
      const Point& a = d.single(var, t, t);
      const Point b = single_cycle(fine);
      v.require(b.error.empty(), b.error);
      for (auto [x, y] : {std::pair{a.W12, b.W12}, {a.Q23, b.Q23}, {a.W34, b.W34},
                          {a.Q41, b.Q41}, {a.C12, b.C12}, {a.C23, b.C23}, {a.C34, b.C34},
                          {a.heat_in, b.heat_in}}) {
        const double r = std::abs(x - y) / std::max(std::abs(y), 1e-300);
        if (x != y) {
          halving = std::max(halving, r);
        }
      }
    }
  }
  v.require(halving < 1e-6, "dt halving moves a ledger by " + fmt(halving));

  // <H1> closed form along controlled adiabats started from Gibbs states.
  double worst = 0;
  const FockBasis basis(80);
  for (double tau : kGrid) {
    for (auto [w0, w1, T] : {std::tuple{1.0, 2.5, 1.0}, {2.5, 1.0, 10.0}}) {
      const RampSchedule ramp(w0, w1, tau);
      const StrokeLedger l = evolve_adiabat(thermal_state(w0, T, basis), ramp, true);
      for (const StrokeSample& s : l.samples) {
        const RampPoint w = ramp.at(s.t);
        const double closed =
            (w.value / w0) * l.energy_start * (w.value / effective_frequency(w.value, w.first) - 1.0);
        if (std::abs(closed) > 1e-9) {
          worst = std::max(worst, std::abs(s.cd_energy - closed) / std::abs(closed));
        }
      }
    }
  }
  v.require(worst < 1e-5, "<H1> closed form off by " + fmt(worst));
  return "trace drift " + fmt(trace, 3) + ", floor " + fmt(floor, 3) + ", dt-halving " +
         fmt(halving, 3) + ", <H1> rel " + fmt(worst, 3);
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only;
  bool strict = false;
  for (int k = 1; k < argc; ++k) {
    if (std::strcmp(argv[k], "--strict") == 0) {
      strict = true;
    } else if (std::strcmp(argv[k], "--only") == 0 && k + 1 < argc) {
      std::stringstream ss(argv[++k]);
      std::string item;
      while (std::getline(ss, item, ',')) {
        only.insert(std::stoi(item));
      }
    } else {
      std::fprintf(stderr, "usage: %s [--only N,M,...] [--strict]\n", argv[0]);
      return 2;
    }
  }

  const std::vector<std::pair<const char*, Criterion>> criteria{
      {"quasistatic oracle", quasistatic},
      {"UNA failure regime", una_failure},
      {"short-cycle power ordering", ordering},
      {"STAE thermodynamic efficiency", stae_efficiency},
      {"efficiency bounds", bounds},
      {"shortcut fidelities", fidelities},
      {"limit-cycle existence and speed", convergence},
      {"limit-cycle STAE advantage", limit_power},
      {"cost monotonicity", cost_trends},
      {"expansion vs compression cost", cost_ordering},
      {"coherence trend", coherence},
      {"numerical hygiene", hygiene},
  };

  Data data;
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const int id = static_cast<int>(k) + 1;
    if (!only.empty() && !only.count(id)) {
      continue;
    }
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    std::string summary;
    try {
      summary = criteria[k].second(data, v);
    } catch (const std::exception& e) {
      v.require(false, std::string("exception: ") + e.what());
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failed += v.pass ? 0 : 1;
    std::printf("%s %2d %s: %s%s%s [%.0fs]\n", v.pass ? "PASS" : "FAIL", id, criteria[k].first,
                summary.c_str(), v.pass ? "" : " | ", v.detail.str().c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d criteria failed\n", failed);
  return strict && failed > 0 ? 1 : 0;
}

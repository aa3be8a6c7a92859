#pragma once

// Parameter sweeps and derivative-free minimization of the gate error.
// Grid points are independent and evaluated concurrently; results are stored
// by grid index so identical specs give bit-identical tables regardless of
// thread count. Per-point failures become sentinel rows, never aborts.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "dissipgate/metrics.hpp"

namespace dissipgate {

enum class GateScheme { kSpontaneous, kOscillator, kHybrid };

inline GateSystem build_gate(const SystemParams& p, GateScheme scheme) {
  switch (scheme) {
    case GateScheme::kSpontaneous: return build_or_spontaneous(p);
    case GateScheme::kOscillator: return build_or_oscillator(p);
    case GateScheme::kHybrid: return build_or_hybrid(p);
  }
  throw std::logic_error("build_gate: unknown scheme");
}

inline void set_param(SystemParams& p, const std::string& name, double v) {
  if (name == "g") p.g = v;
  else if (name == "gamma") p.gamma = v;
  else if (name == "kappa") p.kappa = v;
  else if (name == "omega") p.omega = v;
  else if (name == "delta") p.delta = v;
  else if (name == "Delta") p.Delta = v;
  else if (name == "r") p.r = v;
  else if (name == "gamma_g") p.gamma_g = v;
  else if (name == "t1") p.t1 = v;
  else if (name == "t2") p.t2 = v;
  else throw std::invalid_argument("set_param: unknown parameter '" + name + "'");
}

inline double get_param(const SystemParams& p, const std::string& name) {
  if (name == "g") return p.g;
  if (name == "gamma") return p.gamma;
  if (name == "kappa") return p.kappa;
  if (name == "omega") return p.omega;
  if (name == "delta") return p.delta;
  if (name == "Delta") return p.Delta;
  if (name == "r") return p.r.value_or(p.gamma / p.kappa);
  if (name == "gamma_g") return p.gamma_g.value_or(0.5e-3 / p.t1);
  if (name == "t1") return p.t1;
  if (name == "t2") return p.t2;
  throw std::invalid_argument("get_param: unknown parameter '" + name + "'");
}

inline std::vector<double> log_grid(double lo, double hi, int n) {
  if (!(lo > 0.0) || !(hi > lo) || n < 2)
    throw std::invalid_argument("log_grid: need 0 < lo < hi and n >= 2");
  std::vector<double> g(n);
  const double step = std::log(hi / lo) / (n - 1);
  for (int i = 0; i < n; ++i) g[i] = lo * std::exp(step * i);
  g.back() = hi;
  return g;
}

namespace detail {

inline int thread_count(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("DISSIPGATE_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

// runs fn(k) for k in [0, total) on a small pool; exceptions must be handled
// inside fn
template <typename Fn>
void parallel_for(int total, int threads, Fn&& fn) {
  threads = std::min(threads, total);
  if (threads <= 1) {
    for (int k = 0; k < total; ++k) fn(k);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (int k = next.fetch_add(1); k < total; k = next.fetch_add(1)) fn(k);
    });
  for (auto& th : pool) th.join();
}

}  // namespace detail

// evaluates one parameter point: build, optionally attach T1/T2 noise, find
// the optimal gate time on the shared log grid
inline GateResult evaluate_point(const SystemParams& p, GateScheme scheme,
                                 bool noise,
                                 const std::vector<double>& times = {}) {
  GateSystem sys = build_gate(p, scheme);
  if (noise) sys = with_ground_noise(std::move(sys), p.t1, p.t2);
  return optimal_gate_time(error_series(sys, times));
}

struct AxisSpec {
  std::string name;
  std::vector<double> grid;
};

struct SweepSpec {
  SystemParams base;
  AxisSpec axis1;
  std::optional<AxisSpec> axis2;
  GateScheme scheme = GateScheme::kSpontaneous;
  bool noise = true;
  std::vector<double> omega_grid;  // nonempty: re-optimize omega per point
  std::vector<double> times;       // optional shared time-grid override
  int threads = 0;                 // 0: DISSIPGATE_THREADS env, else hardware
};

struct SweepPoint {
  double x1 = 0.0;
  double x2 = std::numeric_limits<double>::quiet_NaN();
  double omega = 0.0;  // drive actually used (after any line search)
  double min_error = std::numeric_limits<double>::quiet_NaN();
  double t_opt = std::numeric_limits<double>::quiet_NaN();
  bool boundary = false;
  bool failed = false;
};

struct SweepResult {
  std::vector<SweepPoint> points;  // axis1-major ordering
  int n1 = 0;
  int n2 = 1;
  int best_index = -1;  // argmin over non-failed points, -1 if none
};

namespace detail {

inline void validate_axis(const AxisSpec& axis, const SystemParams& base) {
  if (axis.grid.empty())
    throw std::invalid_argument("sweep: empty grid for axis '" + axis.name + "'");
  for (size_t i = 1; i < axis.grid.size(); ++i)
    if (!(axis.grid[i] > axis.grid[i - 1]))
      throw std::invalid_argument("sweep: grid for axis '" + axis.name +
                                  "' must be strictly increasing");
  SystemParams probe = base;
  set_param(probe, axis.name, axis.grid.front());  // throws on unknown name
}

}  // namespace detail

inline SweepResult sweep(const SweepSpec& spec) {
  detail::validate_axis(spec.axis1, spec.base);
  if (spec.axis2) detail::validate_axis(*spec.axis2, spec.base);
  SweepResult res;
  res.n1 = static_cast<int>(spec.axis1.grid.size());
  res.n2 = spec.axis2 ? static_cast<int>(spec.axis2->grid.size()) : 1;
  res.points.resize(static_cast<size_t>(res.n1) * res.n2);

  const int total = res.n1 * res.n2;
  detail::parallel_for(total, detail::thread_count(spec.threads), [&](int k) {
    SweepPoint& pt = res.points[k];
    SystemParams p = spec.base;
    pt.x1 = spec.axis1.grid[k / res.n2];
    set_param(p, spec.axis1.name, pt.x1);
    if (spec.axis2) {
      pt.x2 = spec.axis2->grid[k % res.n2];
      set_param(p, spec.axis2->name, pt.x2);
    }
    const std::vector<double> omegas =
        spec.omega_grid.empty() ? std::vector<double>{p.omega} : spec.omega_grid;
    bool any = false;
    for (double om : omegas) {
      p.omega = om;
      try {
        const GateResult r = evaluate_point(p, spec.scheme, spec.noise, spec.times);
        if (!std::isfinite(r.min_error)) continue;
        if (!any || r.min_error < pt.min_error) {
          pt.omega = om;
          pt.min_error = r.min_error;
          pt.t_opt = r.t_opt;
          pt.boundary = r.boundary;
          any = true;
        }
      } catch (const std::exception&) {
        // recorded as a failed point below if nothing else succeeds
      }
    }
    pt.failed = !any;
  });

  for (int k = 0; k < total; ++k) {
    const SweepPoint& pt = res.points[k];
    if (pt.failed) continue;
    if (res.best_index < 0 || pt.min_error < res.points[res.best_index].min_error)
      res.best_index = k;
  }
  return res;
}

struct MinimizeOptions {
  std::vector<std::string> free;  // subset of {omega, gamma, r, ...}
  std::vector<std::pair<double, double>> bounds;  // one per free parameter
  std::optional<std::vector<double>> start;  // warm start; skips the coarse scan
  int coarse_points = 5;  // per-dimension log grid of the initial scan
  int max_evals = 80;
  GateScheme scheme = GateScheme::kSpontaneous;
  bool noise = true;
  std::vector<double> times;
  int threads = 0;
};

struct MinimizeEval {
  std::vector<double> x;
  double error = std::numeric_limits<double>::quiet_NaN();
};

struct MinimizeResult {
  SystemParams params;
  GateResult result;
  bool hit_bounds = false;
  std::vector<MinimizeEval> trace;
};

inline MinimizeResult minimize(const SystemParams& base,
                               const MinimizeOptions& opt) {
  const int dim = static_cast<int>(opt.free.size());
  if (opt.bounds.size() != opt.free.size())
    throw std::invalid_argument("minimize: bounds must match free parameters");
  for (const auto& [lo, hi] : opt.bounds)
    if (!(lo > 0.0) || !(hi > lo))
      throw std::invalid_argument("minimize: need 0 < lo < hi per bound");
  {
    SystemParams probe = base;
    for (const auto& name : opt.free) set_param(probe, name, 1.0);
  }

  MinimizeResult out;
  out.params = base;
  if (dim == 0) {
    out.result = evaluate_point(base, opt.scheme, opt.noise, opt.times);
    return out;
  }
  if (opt.start && static_cast<int>(opt.start->size()) != dim)
    throw std::invalid_argument("minimize: start must match free parameters");

  // work in log space; all tunable parameters are positive rates
  const auto clamp_u = [&](std::vector<double> u) {
    for (int d = 0; d < dim; ++d)
      u[d] = std::min(std::log(opt.bounds[d].second),
                      std::max(std::log(opt.bounds[d].first), u[d]));
    return u;
  };
  std::vector<MinimizeEval>& trace = out.trace;
  const auto eval_u = [&](const std::vector<double>& u) {
    SystemParams p = base;
    MinimizeEval ev;
    ev.x.resize(dim);
    for (int d = 0; d < dim; ++d) {
      ev.x[d] = std::exp(u[d]);
      set_param(p, opt.free[d], ev.x[d]);
    }
    try {
      const GateResult r = evaluate_point(p, opt.scheme, opt.noise, opt.times);
      ev.error = r.min_error;
    } catch (const std::exception&) {
      // leave NaN; treated as +inf by the ordering below
    }
    trace.push_back(ev);
    return ev.error;
  };
  const auto worse = [](double a, double b) {
    // NaN sorts last
    if (std::isnan(a)) return false;
    if (std::isnan(b)) return true;
    return a < b;
  };

  // initial simplex vertex: warm start or best coarse-grid point
  std::vector<double> u0(dim);
  if (opt.start) {
    for (int d = 0; d < dim; ++d) u0[d] = std::log((*opt.start)[d]);
    u0 = clamp_u(u0);
  } else {
    std::vector<std::vector<double>> grids;
    int total = 1;
    for (int d = 0; d < dim; ++d) {
      grids.push_back(log_grid(opt.bounds[d].first, opt.bounds[d].second,
                               std::max(2, opt.coarse_points)));
      total *= static_cast<int>(grids[d].size());
    }
    std::vector<MinimizeEval> coarse(total);
    detail::parallel_for(total, detail::thread_count(opt.threads), [&](int k) {
      SystemParams p = base;
      MinimizeEval ev;
      ev.x.resize(dim);
      int rem = k;
      for (int d = dim - 1; d >= 0; --d) {
        const int n = static_cast<int>(grids[d].size());
        ev.x[d] = grids[d][rem % n];
        rem /= n;
        set_param(p, opt.free[d], ev.x[d]);
      }
      try {
        ev.error = evaluate_point(p, opt.scheme, opt.noise, opt.times).min_error;
      } catch (const std::exception&) {
      }
      coarse[k] = std::move(ev);
    });
    int best = 0;
    for (int k = 1; k < total; ++k)
      if (worse(coarse[k].error, coarse[best].error)) best = k;
    for (int d = 0; d < dim; ++d) u0[d] = std::log(coarse[best].x[d]);
    for (auto& ev : coarse) trace.push_back(std::move(ev));
  }

  // Nelder-Mead with bound clamping
  struct Vertex {
    std::vector<double> u;
    double f;
  };
  std::vector<Vertex> sx;
  sx.push_back({u0, eval_u(u0)});
  for (int d = 0; d < dim; ++d) {
    std::vector<double> u = u0;
    u[d] += 0.25;  // ~28% step in the parameter
    u = clamp_u(u);
    if (u[d] == u0[d]) u[d] -= 0.25;
    sx.push_back({u, eval_u(u)});
  }
  const auto order = [&] {
    std::sort(sx.begin(), sx.end(),
              [&](const Vertex& a, const Vertex& b) { return worse(a.f, b.f); });
  };
  order();
  while (static_cast<int>(trace.size()) < opt.max_evals) {
    // spread small enough: finished
    if (!std::isnan(sx.front().f) && !std::isnan(sx.back().f) &&
        std::abs(sx.back().f - sx.front().f) < 1e-5)
      break;
    std::vector<double> centroid(dim, 0.0);
    for (int v = 0; v < dim; ++v)
      for (int d = 0; d < dim; ++d) centroid[d] += sx[v].u[d] / dim;
    const auto blend = [&](double coeff) {
      std::vector<double> u(dim);
      for (int d = 0; d < dim; ++d)
        u[d] = centroid[d] + coeff * (centroid[d] - sx.back().u[d]);
      return clamp_u(u);
    };
    const std::vector<double> ur = blend(1.0);
    const double fr = eval_u(ur);
    if (worse(fr, sx.front().f)) {
      const std::vector<double> ue = blend(2.0);
      const double fe = eval_u(ue);
      sx.back() = worse(fe, fr) ? Vertex{ue, fe} : Vertex{ur, fr};
    } else if (worse(fr, sx[dim - 1].f)) {
      sx.back() = {ur, fr};
    } else {
      const std::vector<double> uc = blend(-0.5);
      const double fc = eval_u(uc);
      if (worse(fc, sx.back().f)) {
        sx.back() = {uc, fc};
      } else {
        for (int v = 1; v <= dim; ++v) {
          for (int d = 0; d < dim; ++d)
            sx[v].u[d] = 0.5 * (sx[v].u[d] + sx[0].u[d]);
          sx[v].f = eval_u(sx[v].u);
          if (static_cast<int>(trace.size()) >= opt.max_evals) break;
        }
      }
    }
    order();
  }

  // best evaluation ever seen wins, never worse than the coarse scan
  const MinimizeEval* best = nullptr;
  for (const auto& ev : trace)
    if (!best || worse(ev.error, best->error)) best = &ev;
  if (!best || std::isnan(best->error))
    throw std::runtime_error("minimize: no successful evaluation");
  for (int d = 0; d < dim; ++d) {
    set_param(out.params, opt.free[d], best->x[d]);
    const double lo = opt.bounds[d].first, hi = opt.bounds[d].second;
    if (best->x[d] <= lo * (1.0 + 1e-9) || best->x[d] >= hi * (1.0 - 1e-9))
      out.hit_bounds = true;
  }
  out.result = evaluate_point(out.params, opt.scheme, opt.noise, opt.times);
  return out;
}

}  // namespace dissipgate

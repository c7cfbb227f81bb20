#include "drekit/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace drekit {

namespace {

constexpr double kDivergenceGuard = 1e6;

bool finite_state(const std::vector<double>& x) {
  double norm2 = 0.0;
  for (double v : x) {
    if (!std::isfinite(v)) return false;
    norm2 += v * v;
  }
  return std::sqrt(norm2) <= kDivergenceGuard;
}

// Right-hand side evaluator for the plain and augmented systems.
class Rhs {
 public:
  Rhs(const VectorField& f, bool variational) : f_(f), variational_(variational) {
    f.validate();
    if (variational_) {
      CMatrix j = jacobian(f);
      jac_.reserve(static_cast<std::size_t>(f.n) * static_cast<std::size_t>(f.n));
      for (int r = 0; r < f.n; ++r)
        for (int c = 0; c < f.n; ++c) jac_.push_back(j.at(r, c).re());
    }
  }

  int dim() const { return variational_ ? 2 * f_.n : f_.n; }

  void operator()(const std::vector<double>& y, double t, std::vector<double>& dy) const {
    const std::size_t n = static_cast<std::size_t>(f_.n);
    EvalPoint p;
    p.x.assign(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(n));
    p.t = t;
    dy.resize(y.size());
    for (std::size_t i = 0; i < n; ++i) dy[i] = eval(f_.components[i], p);
    if (!variational_) return;
    for (std::size_t r = 0; r < n; ++r) {
      double acc = 0.0;
      for (std::size_t c = 0; c < n; ++c)
        acc += eval(jac_[r * n + c], p) * y[n + c];
      dy[n + r] = acc;
    }
  }

 private:
  const VectorField& f_;
  bool variational_;
  std::vector<Expr> jac_;
};

Trajectory run_rk4(const Rhs& rhs, std::vector<double> y, double t0, double t1,
                   double h, int n_state) {
  if (h <= 0) throw Error("step size must be positive");
  if (t1 <= t0) throw Error("t1 must exceed t0");

  Trajectory out;
  out.h = h;
  const bool variational = rhs.dim() != n_state;
  auto record = [&](double t, const std::vector<double>& state) {
    out.times.push_back(t);
    out.states.emplace_back(state.begin(), state.begin() + n_state);
    if (variational)
      out.variational.emplace_back(state.begin() + n_state, state.end());
  };

  record(t0, y);
  const long long steps = static_cast<long long>(std::ceil((t1 - t0) / h - 1e-12));
  std::vector<double> k1, k2, k3, k4, tmp(y.size());
  for (long long s = 0; s < steps; ++s) {
    double t = t0 + static_cast<double>(s) * h;
    rhs(y, t, k1);
    for (std::size_t i = 0; i < y.size(); ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
    rhs(tmp, t + 0.5 * h, k2);
    for (std::size_t i = 0; i < y.size(); ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
    rhs(tmp, t + 0.5 * h, k3);
    for (std::size_t i = 0; i < y.size(); ++i) tmp[i] = y[i] + h * k3[i];
    rhs(tmp, t + h, k4);
    for (std::size_t i = 0; i < y.size(); ++i)
      y[i] += h / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
    if (!finite_state(y)) {
      out.truncated = true;
      return out;
    }
    record(t + h, y);
  }
  return out;
}

void format_double(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out += buf;
}

}  // namespace

Trajectory integrate(const VectorField& field, const std::vector<double>& x0,
                     double t0, double t1, double h) {
  if (static_cast<int>(x0.size()) != field.n)
    throw Error("initial state dimension mismatch");
  return run_rk4(Rhs(field, false), x0, t0, t1, h, field.n);
}

Trajectory integrate_variational(const VectorField& field, const std::vector<double>& x0,
                                 const std::vector<double>& dx0, double t0, double t1,
                                 double h) {
  if (static_cast<int>(x0.size()) != field.n ||
      static_cast<int>(dx0.size()) != field.n)
    throw Error("initial state dimension mismatch");
  std::vector<double> y = x0;
  y.insert(y.end(), dx0.begin(), dx0.end());
  return run_rk4(Rhs(field, true), std::move(y), t0, t1, h, field.n);
}

std::string trajectory_csv(const Trajectory& t, int traj_id) {
  std::string out;
  for (std::size_t k = 0; k < t.times.size(); ++k) {
    out += std::to_string(traj_id);
    out += ',';
    format_double(out, t.times[k]);
    for (double v : t.states[k]) {
      out += ',';
      format_double(out, v);
    }
    if (!t.variational.empty()) {
      for (double v : t.variational[k]) {
        out += ',';
        format_double(out, v);
      }
    }
    out += '\n';
  }
  return out;
}

std::string csv_header(int n, bool with_variational) {
  std::string out = "traj_id,t";
  for (int i = 1; i <= n; ++i) out += ",x" + std::to_string(i);
  if (with_variational)
    for (int i = 1; i <= n; ++i) out += ",dx" + std::to_string(i);
  return out;
}

std::string phase_portrait_csv(const VectorField& field,
                               const std::vector<std::vector<double>>& starts,
                               double t1, double h) {
  std::string out = csv_header(field.n);
  out += '\n';
  for (std::size_t id = 0; id < starts.size(); ++id) {
    Trajectory t = integrate(field, starts[id], 0.0, t1, h);
    out += trajectory_csv(t, static_cast<int>(id));
  }
  return out;
}

std::string portrait_svg(const std::vector<Trajectory>& trajectories) {
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& t : trajectories) {
    for (const auto& s : t.states) {
      if (s.size() < 2) throw Error("SVG portraits need planar trajectories");
      xmin = std::min(xmin, s[0]);
      xmax = std::max(xmax, s[0]);
      ymin = std::min(ymin, s[1]);
      ymax = std::max(ymax, s[1]);
    }
  }
  if (xmin > xmax) { xmin = -1; xmax = 1; ymin = -1; ymax = 1; }
  double padx = 0.05 * (xmax - xmin + 1e-12), pady = 0.05 * (ymax - ymin + 1e-12);
  xmin -= padx; xmax += padx; ymin -= pady; ymax += pady;

  const double W = 640, H = 640;
  auto sx = [&](double x) { return (x - xmin) / (xmax - xmin) * W; };
  auto sy = [&](double y) { return H - (y - ymin) / (ymax - ymin) * H; };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W
     << "\" height=\"" << H << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (xmin < 0 && xmax > 0)
    os << "<line x1=\"" << sx(0) << "\" y1=\"0\" x2=\"" << sx(0) << "\" y2=\"" << H
       << "\" stroke=\"#cccccc\"/>\n";
  if (ymin < 0 && ymax > 0)
    os << "<line x1=\"0\" y1=\"" << sy(0) << "\" x2=\"" << W << "\" y2=\"" << sy(0)
       << "\" stroke=\"#cccccc\"/>\n";
  for (const auto& t : trajectories) {
    os << "<polyline fill=\"none\" stroke=\"#1f6fb4\" stroke-width=\"1\" points=\"";
    // Thin dense trajectories to keep the file reasonable.
    std::size_t stride = std::max<std::size_t>(1, t.states.size() / 2000);
    for (std::size_t k = 0; k < t.states.size(); k += stride)
      os << sx(t.states[k][0]) << "," << sy(t.states[k][1]) << " ";
    os << sx(t.states.back()[0]) << "," << sy(t.states.back()[1]);
    os << "\"/>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::vector<SeparationReport> incremental_convergence(
    const VectorField& field,
    const std::vector<std::pair<std::vector<double>, std::vector<double>>>& pairs,
    double t1, double h) {
  std::vector<SeparationReport> out;
  out.reserve(pairs.size());
  for (const auto& [a0, b0] : pairs) {
    Trajectory ta = integrate(field, a0, 0.0, t1, h);
    Trajectory tb = integrate(field, b0, 0.0, t1, h);
    std::size_t len = std::min(ta.states.size(), tb.states.size());
    SeparationReport rep;
    double prev = 0.0;
    long long decreased = 0, compared = 0;
    for (std::size_t k = 0; k < len; ++k) {
      double d2 = 0.0;
      for (std::size_t i = 0; i < ta.states[k].size(); ++i) {
        double diff = ta.states[k][i] - tb.states[k][i];
        d2 += diff * diff;
      }
      double d = std::sqrt(d2);
      if (k == 0) rep.initial = d;
      else {
        ++compared;
        if (d < prev) ++decreased;
      }
      prev = d;
      rep.final = d;
    }
    rep.decrease_fraction =
        compared ? static_cast<double>(decreased) / static_cast<double>(compared) : 1.0;
    out.push_back(rep);
  }
  return out;
}

}  // namespace drekit

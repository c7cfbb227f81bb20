#ifndef DREKIT_SIM_HPP
#define DREKIT_SIM_HPP

#include "drekit/lieop.hpp"

#include <string>

namespace drekit {

/// Uniformly sampled trajectory; truncated is set when integration stopped
/// early on a non-finite state or the divergence guard.
struct Trajectory {
  double h = 0.0;
  std::vector<double> times;
  std::vector<std::vector<double>> states;            // n-vectors
  std::vector<std::vector<double>> variational;       // empty unless requested
  bool truncated = false;

  const std::vector<double>& final_state() const { return states.back(); }
};

/// Classical fixed-step RK4. Aborts (truncating) when the state leaves
/// the ||x|| <= 1e6 guard or evaluates non-finite.
Trajectory integrate(const VectorField& field, const std::vector<double>& x0,
                     double t0, double t1, double h);

/// Joint RK4 on the augmented system xdot = f, d(dx)/dt = (df/dx) dx with
/// the Jacobian obtained symbolically.
Trajectory integrate_variational(const VectorField& field, const std::vector<double>& x0,
                                 const std::vector<double>& dx0, double t0, double t1,
                                 double h);

/// One trajectory per grid start, concatenated as CSV rows
/// traj_id,t,x1,...,xn with 17 significant digits.
std::string phase_portrait_csv(const VectorField& field,
                               const std::vector<std::vector<double>>& starts,
                               double t1, double h);

std::string trajectory_csv(const Trajectory& t, int traj_id = 0);

/// Header "traj_id,t,x1,...,xn" with ",dx1,...,dxn" appended for
/// variational output.
std::string csv_header(int n, bool with_variational = false);

/// Polyline SVG for planar portraits.
std::string portrait_svg(const std::vector<Trajectory>& trajectories);

struct SeparationReport {
  double initial = 0.0;
  double final = 0.0;
  double decrease_fraction = 0.0;  // fraction of steps with shrinking separation
};

/// Evidence that trajectory pairs approach each other: separation at t1 and
/// the fraction of steps where the separation decreased.
std::vector<SeparationReport> incremental_convergence(
    const VectorField& field,
    const std::vector<std::pair<std::vector<double>, std::vector<double>>>& pairs,
    double t1, double h);

}  // namespace drekit

#endif

#pragma once

#include "lpinit/series.hpp"

namespace lpinit {

struct LorenzParams {
  double sigma = 10.0;
  double r = 28.0;
  double b = 8.0 / 3.0;

  void validate() const;
};

struct State3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

struct Trajectory {
  TimeSeries x;
  TimeSeries y;
  TimeSeries z;
};

State3 lorenz_derivative(const State3& s, const LorenzParams& params);

/// Adaptive Runge-Kutta-Fehlberg 4(5) integration sampled on the grid
/// k * dt_out, k = 0 .. floor(t_end / dt_out). Steps are clipped so that every
/// grid time is hit exactly.
///
/// Throws NumericError if the step size underflows 1e-12 * t_end or the state
/// stops being finite.
Trajectory integrate_lorenz(const LorenzParams& params, const State3& s0, double t_end,
                            double dt_out, double rel_tol);

/// Classic fixed-step RK4 from t = 0 to t_end; the final step is shortened to
/// land on t_end. Used as a reference integrator.
State3 integrate_rk4_fixed(const LorenzParams& params, const State3& s0, double t_end, double step);

}  // namespace lpinit

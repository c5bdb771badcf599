#include "lpinit/dynamics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "lpinit/errors.hpp"

namespace lpinit {
namespace {

State3 axpy(const State3& s, double a, const State3& d) { return {s.x + a * d.x, s.y + a * d.y, s.z + a * d.z}; }

bool finite(const State3& s) { return std::isfinite(s.x) && std::isfinite(s.y) && std::isfinite(s.z); }

// Fehlberg 4(5) tableau.
constexpr std::array<double, 6> kC = {0.0, 1.0 / 4, 3.0 / 8, 12.0 / 13, 1.0, 1.0 / 2};
constexpr double kA[6][5] = {
    {},
    {1.0 / 4},
    {3.0 / 32, 9.0 / 32},
    {1932.0 / 2197, -7200.0 / 2197, 7296.0 / 2197},
    {439.0 / 216, -8.0, 3680.0 / 513, -845.0 / 4104},
    {-8.0 / 27, 2.0, -3544.0 / 2565, 1859.0 / 4104, -11.0 / 40},
};
constexpr std::array<double, 6> kB5 = {16.0 / 135, 0.0, 6656.0 / 12825, 28561.0 / 56430, -9.0 / 50, 2.0 / 55};
constexpr std::array<double, 6> kB4 = {25.0 / 216, 0.0, 1408.0 / 2565, 2197.0 / 4104, -1.0 / 5, 0.0};

struct StepResult {
  State3 next;      // fifth-order solution (local extrapolation)
  double err_norm;  // max component error relative to tolerance
};

StepResult rkf45_step(const LorenzParams& p, const State3& s, double h, double rel_tol) {
  std::array<State3, 6> k;
  for (int i = 0; i < 6; ++i) {
    State3 stage = s;
    for (int j = 0; j < i; ++j) stage = axpy(stage, h * kA[i][j], k[j]);
    k[i] = lorenz_derivative(stage, p);
  }
  State3 y5 = s;
  State3 y4 = s;
  for (int i = 0; i < 6; ++i) {
    y5 = axpy(y5, h * kB5[i], k[i]);
    y4 = axpy(y4, h * kB4[i], k[i]);
  }
  auto scaled = [&](double a5, double a4, double a0) {
    const double tol = rel_tol * (1.0 + std::max(std::abs(a0), std::abs(a5)));
    return std::abs(a5 - a4) / tol;
  };
  const double err = std::max({scaled(y5.x, y4.x, s.x), scaled(y5.y, y4.y, s.y), scaled(y5.z, y4.z, s.z)});
  return {y5, err};
}

State3 rk4_step(const LorenzParams& p, const State3& s, double h) {
  const State3 k1 = lorenz_derivative(s, p);
  const State3 k2 = lorenz_derivative(axpy(s, h / 2, k1), p);
  const State3 k3 = lorenz_derivative(axpy(s, h / 2, k2), p);
  const State3 k4 = lorenz_derivative(axpy(s, h, k3), p);
  return {s.x + h / 6 * (k1.x + 2 * k2.x + 2 * k3.x + k4.x), s.y + h / 6 * (k1.y + 2 * k2.y + 2 * k3.y + k4.y),
          s.z + h / 6 * (k1.z + 2 * k2.z + 2 * k3.z + k4.z)};
}

}  // namespace

void LorenzParams::validate() const {
  if (!std::isfinite(sigma) || !std::isfinite(r) || !std::isfinite(b)) {
    throw std::invalid_argument("lorenz params must be finite");
  }
  if (!(b > 0.0)) throw std::invalid_argument("lorenz params: b must be positive");
}

State3 lorenz_derivative(const State3& s, const LorenzParams& p) {
  return {p.sigma * (s.y - s.x), s.x * (p.r - s.z) - s.y, s.x * s.y - p.b * s.z};
}

Trajectory integrate_lorenz(const LorenzParams& params, const State3& s0, double t_end, double dt_out,
                            double rel_tol) {
  params.validate();
  if (!(t_end > 0.0) || !(dt_out > 0.0)) throw std::invalid_argument("integrate_lorenz: t_end and dt_out must be > 0");
  if (!(rel_tol > 0.0 && rel_tol <= 1e-2)) throw std::invalid_argument("integrate_lorenz: rel_tol must lie in (0, 1e-2]");
  if (!finite(s0)) throw std::invalid_argument("integrate_lorenz: non-finite initial state");

  const auto n_out = static_cast<std::size_t>(std::floor(t_end / dt_out + 1e-9)) + 1;
  Trajectory out;
  for (TimeSeries* ts : {&out.x, &out.y, &out.z}) {
    ts->dt = dt_out;
    ts->t0 = 0.0;
    ts->values.reserve(n_out);
  }
  auto record = [&](const State3& s) {
    out.x.values.push_back(s.x);
    out.y.values.push_back(s.y);
    out.z.values.push_back(s.z);
  };

  const double h_min = 1e-12 * t_end;
  State3 s = s0;
  double t = 0.0;
  double h = std::min(dt_out, 1e-3);
  record(s);
  for (std::size_t k = 1; k < n_out; ++k) {
    const double t_grid = static_cast<double>(k) * dt_out;
    while (t < t_grid) {
      const bool clipped = t + h >= t_grid;
      const double h_try = clipped ? t_grid - t : h;
      const StepResult step = rkf45_step(params, s, h_try, rel_tol);
      if (!finite(step.next) || !std::isfinite(step.err_norm)) {
        throw NumericError("integrate_lorenz: state diverged near t = " + std::to_string(t));
      }
      const double factor = step.err_norm == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(step.err_norm, -0.2), 0.2, 5.0);
      if (step.err_norm <= 1.0) {
        s = step.next;
        t = clipped ? t_grid : t + h_try;
        // A clipped step says nothing about the admissible step length.
        if (!clipped || factor < 1.0) h = h_try * factor;
      } else {
        h = h_try * factor;
      }
      if (h < h_min) throw NumericError("integrate_lorenz: step size underflow near t = " + std::to_string(t));
    }
    record(s);
  }
  return out;
}

State3 integrate_rk4_fixed(const LorenzParams& params, const State3& s0, double t_end, double step) {
  params.validate();
  if (!(t_end > 0.0) || !(step > 0.0)) throw std::invalid_argument("integrate_rk4_fixed: t_end and step must be > 0");
  const auto n = static_cast<long long>(std::floor(t_end / step + 1e-9));
  State3 s = s0;
  for (long long i = 0; i < n; ++i) s = rk4_step(params, s, step);
  const double rest = t_end - static_cast<double>(n) * step;
  if (rest > 1e-15 * t_end) s = rk4_step(params, s, rest);
  if (!finite(s)) throw NumericError("integrate_rk4_fixed: state diverged");
  return s;
}

}  // namespace lpinit

/* Copyright 2026 The civic Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *   http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "civic/controller.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include "civic/error.hpp"

namespace civic::control {

void LinearModel::validate() const {
  const Eigen::Index n = A.rows();
  if (A.cols() != n || B.rows() != n || state_point.size() != n || drift.size() != n ||
      input_point.size() != B.cols()) {
    throw ConfigError("linear model: inconsistent dimensions");
  }
  if (!A.allFinite() || !B.allFinite() || !drift.allFinite()) {
    throw NumericalError("linear model: non-finite entries");
  }
  if (!continuous && !(sample_period_s > 0.0)) {
    throw ConfigError("linear model: discrete model needs a sample period");
  }
}

LinearModel linearize(const plant::PlantConfig& config, const OperatingPoint& point) {
  for (int i = 0; i < 3; ++i) {
    if (!(point.levels_L[i] > 0.0)) {
      throw NumericalError("linearize: operating-point level of T" + std::to_string(i + 1) +
                           " must be > 0 (sqrt is not differentiable at 0)");
    }
  }
  const double k1 = config.outflow_coefficient[0];
  const double k3 = config.outflow_coefficient[1];
  const double c = config.coupling_coefficient;
  const double g = config.pump_gain_L_per_s_at_full;
  // dh/dV per tank.
  Eigen::Vector3d s;
  for (int i = 0; i < 3; ++i) s[i] = 1.0 / (1000.0 * config.tank_cross_section_m2[i]);
  const Eigen::Vector3d h = point.levels_L.cwiseProduct(s);
  const double v1 = point.inputs[1];
  const double v2 = point.inputs[2];

  // d/dV of k * valve * sqrt(s V) = k * valve * s / (2 sqrt(h)).
  const double dq1 = k1 * v1 * s[0] / (2.0 * std::sqrt(h[0]));
  const double dq3 = k3 * v2 * s[2] / (2.0 * std::sqrt(h[2]));

  LinearModel m;
  m.A = Eigen::MatrixXd::Zero(3, 3);
  m.A(0, 0) = -dq1 - c * s[0];
  m.A(0, 1) = c * s[1];
  m.A(1, 0) = dq1 + c * s[0];
  m.A(1, 1) = -2.0 * c * s[1];
  m.A(1, 2) = c * s[2];
  m.A(2, 1) = c * s[1];
  m.A(2, 2) = -c * s[2] - dq3;

  m.B = Eigen::MatrixXd::Zero(3, 3);
  m.B(0, 0) = g;
  m.B(0, 1) = -k1 * std::sqrt(h[0]);
  m.B(1, 1) = k1 * std::sqrt(h[0]);
  m.B(2, 2) = -k3 * std::sqrt(h[2]);

  m.state_point = point.levels_L;
  m.input_point = point.inputs;

  const plant::FlowRates q = plant::flow_rates(
      config, {point.levels_L[0], point.levels_L[1], point.levels_L[2], 0.0},
      {point.inputs[0], point.inputs[1], point.inputs[2]}, 1.0, 1.0);
  const plant::TankVolumes f = plant::volume_derivatives(q);
  m.drift = Eigen::Vector3d(f[0], f[1], f[2]);
  m.continuous = true;
  m.validate();
  return m;
}

LinearModel discretize(const LinearModel& model, double sample_period_s,
                       Discretization method) {
  if (!model.continuous) throw ConfigError("discretize: model is already discrete");
  if (!(sample_period_s > 0.0)) throw ConfigError("discretize: sample period must be > 0");
  model.validate();
  const Eigen::Index n = model.states();
  const Eigen::Index m = model.inputs();

  LinearModel d = model;
  d.continuous = false;
  d.sample_period_s = sample_period_s;
  if (method == Discretization::ForwardEuler) {
    d.A = Eigen::MatrixXd::Identity(n, n) + sample_period_s * model.A;
    d.B = sample_period_s * model.B;
    d.drift = sample_period_s * model.drift;
    return d;
  }
  // exp([[A, B, f], [0, 0, 0]] * Ts) yields A_d, B_d and the drift increment.
  Eigen::MatrixXd aug = Eigen::MatrixXd::Zero(n + m + 1, n + m + 1);
  aug.topLeftCorner(n, n) = model.A;
  aug.block(0, n, n, m) = model.B;
  aug.block(0, n + m, n, 1) = model.drift;
  const Eigen::MatrixXd e = (aug * sample_period_s).exp();
  d.A = e.topLeftCorner(n, n);
  d.B = e.block(0, n, n, m);
  d.drift = e.block(0, n + m, n, 1);
  return d;
}

void MpcConfig::validate(Eigen::Index states) const {
  if (horizon_steps < 1) throw ConfigError("mpc: horizon must be >= 1");
  if (state_weight.size() != states) throw ConfigError("mpc: state_weight size mismatch");
  if ((state_weight.array() < 0.0).any() || input_weight < 0.0) {
    throw ConfigError("mpc: weights must be >= 0");
  }
  if (!(sample_period_s > 0.0)) throw ConfigError("mpc: sample period must be > 0");
  if (!(input_lower <= input_upper)) throw ConfigError("mpc: empty input bounds");
  if (max_iterations < 1) throw ConfigError("mpc: iteration budget must be >= 1");
}

MpcController::MpcController(LinearModel discrete_model, MpcConfig config)
    : model_(std::move(discrete_model)), config_(std::move(config)) {
  if (model_.continuous) throw ConfigError("mpc: model must be discrete");
  model_.validate();
  config_.validate(model_.states());

  const Eigen::Index n = model_.states();
  const Eigen::Index m = model_.inputs();
  const int horizon = config_.horizon_steps;

  phi_ = Eigen::MatrixXd::Zero(horizon * n, n);
  gamma_ = Eigen::MatrixXd::Zero(horizon * n, horizon * m);
  psi_ = Eigen::VectorXd::Zero(horizon * n);
  q_ = Eigen::VectorXd::Zero(horizon * n);

  std::vector<Eigen::MatrixXd> powers(horizon + 1);
  powers[0] = Eigen::MatrixXd::Identity(n, n);
  for (int j = 1; j <= horizon; ++j) powers[j] = model_.A * powers[j - 1];

  Eigen::VectorXd drift_sum = Eigen::VectorXd::Zero(n);
  for (int j = 1; j <= horizon; ++j) {
    phi_.block((j - 1) * n, 0, n, n) = powers[j];
    for (int i = 0; i < j; ++i) {
      gamma_.block((j - 1) * n, i * m, n, m) = powers[j - 1 - i] * model_.B;
    }
    drift_sum += powers[j - 1] * model_.drift;
    psi_.segment((j - 1) * n, n) = drift_sum;
    q_.segment((j - 1) * n, n) = config_.state_weight;
  }

  hessian_ = 2.0 * (gamma_.transpose() * q_.asDiagonal() * gamma_);
  hessian_.diagonal().array() += 2.0 * config_.input_weight;
  const double lmax = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(
                          hessian_, Eigen::EigenvaluesOnly)
                          .eigenvalues()
                          .maxCoeff();
  step_ = lmax > 0.0 ? 1.0 / lmax : 0.0;
}

Eigen::VectorXd MpcController::linear_term(const Eigen::VectorXd& measured,
                                           const Eigen::VectorXd& setpoints) const {
  const Eigen::VectorXd x0 = measured - model_.state_point;
  const Eigen::VectorXd r = (setpoints - model_.state_point).replicate(config_.horizon_steps, 1);
  const Eigen::VectorXd free = phi_ * x0 + psi_ - r;
  return 2.0 * gamma_.transpose() * q_.cwiseProduct(free);
}

double MpcController::cost(const Eigen::VectorXd& measured, const Eigen::VectorXd& setpoints,
                           const Eigen::VectorXd& sequence) const {
  const Eigen::VectorXd du =
      sequence - model_.input_point.replicate(config_.horizon_steps, 1);
  const Eigen::VectorXd x0 = measured - model_.state_point;
  const Eigen::VectorXd r = (setpoints - model_.state_point).replicate(config_.horizon_steps, 1);
  const Eigen::VectorXd err = phi_ * x0 + psi_ + gamma_ * du - r;
  return err.dot(q_.cwiseProduct(err)) + config_.input_weight * du.squaredNorm();
}

MpcSolution MpcController::solve(const Eigen::VectorXd& measured,
                                 const Eigen::VectorXd& setpoints) const {
  if (measured.size() != model_.states() || setpoints.size() != model_.states()) {
    throw ConfigError("mpc: measurement/setpoint size mismatch");
  }
  if (!measured.allFinite() || !setpoints.allFinite()) {
    throw NumericalError("mpc: non-finite measurement or setpoint");
  }
  const Eigen::Index m = model_.inputs();
  const int horizon = config_.horizon_steps;
  const Eigen::VectorXd u0 = model_.input_point.replicate(horizon, 1);
  const Eigen::VectorXd lo = Eigen::VectorXd::Constant(horizon * m, config_.input_lower) - u0;
  const Eigen::VectorXd hi = Eigen::VectorXd::Constant(horizon * m, config_.input_upper) - u0;
  const Eigen::VectorXd g = linear_term(measured, setpoints);

  auto project = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
    return v.cwiseMax(lo).cwiseMin(hi);
  };
  auto gradient = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
    return hessian_ * v + g;
  };

  MpcSolution sol;
  Eigen::VectorXd x = project(Eigen::VectorXd::Zero(horizon * m));
  Eigen::VectorXd y = x;
  double t = 1.0;
  for (int it = 1; it <= config_.max_iterations; ++it) {
    const Eigen::VectorXd next = project(y - step_ * gradient(y));
    sol.iterations = it;
    const double residual = (next - project(next - step_ * gradient(next))).lpNorm<Eigen::Infinity>();
    if (residual < config_.tolerance) {
      x = next;
      sol.converged = true;
      break;
    }
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    // Momentum restart when the step points against the last update.
    if ((y - next).dot(next - x) > 0.0) {
      y = next;
      t = 1.0;
    } else {
      y = next + ((t - 1.0) / t_next) * (next - x);
      t = t_next;
    }
    x = next;
  }

  sol.sequence = x + u0;
  sol.first = sol.sequence.head(m);
  sol.cost = cost(measured, setpoints, sol.sequence);
  return sol;
}

ControlDecision mpc_step(const MpcController& controller, const Eigen::VectorXd& measured,
                         const Eigen::VectorXd& setpoints, const Eigen::VectorXd& previous) {
  const MpcSolution sol = controller.solve(measured, setpoints);
  if (!sol.converged) return {previous, true};
  return {sol.first, false};
}

Eigen::VectorXd pi_step(const Eigen::VectorXd& levels, const Eigen::VectorXd& setpoints,
                        const PiGains& gains, PiState& state) {
  const Eigen::Index n = levels.size();
  if (setpoints.size() != n || gains.kp.size() != n || gains.ki.size() != n ||
      gains.direction.size() != n || gains.equilibrium.size() != n) {
    throw ConfigError("pi: dimension mismatch");
  }
  if (state.integral.size() != n) state.integral = Eigen::VectorXd::Zero(n);

  Eigen::VectorXd out(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double e = gains.direction[i] * (setpoints[i] - levels[i]);
    const double integral = state.integral[i] + gains.ki[i] * gains.sample_period_s * e;
    const double raw = gains.equilibrium[i] + gains.kp[i] * e + integral;
    const double clamped = std::clamp(raw, 0.0, 1.0);
    // Only integrate while unsaturated or when the error pulls back inside.
    const bool winding = (raw > 1.0 && e > 0.0) || (raw < 0.0 && e < 0.0);
    if (!winding) state.integral[i] = integral;
    out[i] = clamped;
  }
  return out;
}

LevelController::LevelController(const plant::PlantConfig& plant, const ControllerConfig& config)
    : config_(config), previous_(Eigen::VectorXd::Zero(3)) {
  if (config_.kind == ControllerKind::Mpc) {
    LinearModel model = discretize(linearize(plant, config_.operating_point),
                                   config_.mpc.sample_period_s, config_.discretization);
    mpc_.emplace(std::move(model), config_.mpc);
  } else {
    pi_state_.integral = Eigen::VectorXd::Zero(3);
  }
}

plant::ActuatorInputs LevelController::compute(const Eigen::Vector3d& levels_L,
                                               const Eigen::Vector3d& setpoints_L) {
  Eigen::VectorXd u;
  if (mpc_) {
    ControlDecision d = mpc_step(*mpc_, levels_L, setpoints_L, previous_);
    if (d.fallback) ++fallbacks_;
    u = std::move(d.inputs);
  } else {
    u = pi_step(levels_L, setpoints_L, config_.pi, pi_state_);
  }
  u = u.cwiseMax(0.0).cwiseMin(1.0);
  previous_ = u;
  return {u[0], u[1], u[2]};
}

}  // namespace civic::control

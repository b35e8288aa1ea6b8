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

#pragma once

#include <optional>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "civic/plant.hpp"

namespace civic::control {

/// Levels L1..L3 (L) and inputs P1, V1, V2 (fractions) at which the plant
/// is linearized.
struct OperatingPoint {
  Eigen::Vector3d levels_L{5.0, 5.0, 5.0};
  Eigen::Vector3d inputs{0.0, 0.0, 0.0};
};

/// x' = A (x - x0) + B (u - u0) + drift, continuous or discrete. States are
/// tank volumes in litres. `drift` is the flow model evaluated at the
/// operating point (zero at an equilibrium); for a discrete model it is the
/// per-sample increment.
struct LinearModel {
  Eigen::MatrixXd A;
  Eigen::MatrixXd B;
  Eigen::VectorXd state_point;
  Eigen::VectorXd input_point;
  Eigen::VectorXd drift;
  bool continuous = true;
  double sample_period_s = 0.0;

  Eigen::Index states() const { return A.rows(); }
  Eigen::Index inputs() const { return B.cols(); }
  void validate() const;
};

/// Jacobians of the nominal (fault-free) flow model of T1..T3 at `point`.
LinearModel linearize(const plant::PlantConfig& config, const OperatingPoint& point);

enum class Discretization { ForwardEuler, ZeroOrderHold };

LinearModel discretize(const LinearModel& model, double sample_period_s,
                       Discretization method = Discretization::ForwardEuler);

struct MpcConfig {
  int horizon_steps = 10;
  Eigen::VectorXd state_weight = Eigen::Vector3d::Ones();
  double input_weight = 0.01;
  double input_lower = 0.0;
  double input_upper = 1.0;
  double sample_period_s = 0.1;
  int max_iterations = 500;
  double tolerance = 1e-8;

  void validate(Eigen::Index states) const;
};

struct MpcSolution {
  Eigen::VectorXd sequence;  // horizon x inputs, absolute input values
  Eigen::VectorXd first;
  double cost = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Finite-horizon box-constrained tracking QP for a discrete model:
///   sum_{j=1..H} |x_j - r|^2_Q + sum_{j=0..H-1} |u_j - u0|^2_R
/// solved by accelerated projected gradient.
class MpcController {
 public:
  MpcController(LinearModel discrete_model, MpcConfig config);

  MpcSolution solve(const Eigen::VectorXd& measured, const Eigen::VectorXd& setpoints) const;

  /// Cost of an absolute input sequence (horizon x inputs stacked).
  double cost(const Eigen::VectorXd& measured, const Eigen::VectorXd& setpoints,
              const Eigen::VectorXd& sequence) const;

  const LinearModel& model() const { return model_; }
  const MpcConfig& config() const { return config_; }

 private:
  Eigen::VectorXd linear_term(const Eigen::VectorXd& measured,
                              const Eigen::VectorXd& setpoints) const;

  LinearModel model_;
  MpcConfig config_;
  Eigen::MatrixXd phi_;    // stacked A^j
  Eigen::MatrixXd gamma_;  // stacked input response
  Eigen::VectorXd psi_;    // stacked drift response
  Eigen::VectorXd q_;      // stacked state weights
  Eigen::MatrixXd hessian_;
  double step_ = 0.0;
};

/// One MPC decision. On non-convergence the previous input is returned and
/// `fallback` is set.
struct ControlDecision {
  Eigen::VectorXd inputs;
  bool fallback = false;
};

ControlDecision mpc_step(const MpcController& controller, const Eigen::VectorXd& measured,
                         const Eigen::VectorXd& setpoints, const Eigen::VectorXd& previous);

/// Channels pair P1 with L1, V1 with L2 and V2 with L3.
struct PiGains {
  Eigen::VectorXd kp = Eigen::Vector3d::Constant(0.5);
  Eigen::VectorXd ki = Eigen::Vector3d::Constant(0.1);
  // +1 when raising the input raises the paired level, -1 otherwise.
  Eigen::VectorXd direction = Eigen::Vector3d(1.0, 1.0, -1.0);
  Eigen::VectorXd equilibrium = Eigen::Vector3d::Zero();
  double sample_period_s = 0.1;
};

struct PiState {
  Eigen::VectorXd integral;
};

/// Discrete PI per channel with conditional-integration anti-windup; output
/// clamped to [0, 1].
Eigen::VectorXd pi_step(const Eigen::VectorXd& levels, const Eigen::VectorXd& setpoints,
                        const PiGains& gains, PiState& state);

enum class ControllerKind { Mpc, Pi };

struct ControllerConfig {
  ControllerKind kind = ControllerKind::Mpc;
  OperatingPoint operating_point;
  Discretization discretization = Discretization::ForwardEuler;
  MpcConfig mpc;
  PiGains pi;
};

/// Closed-loop controller for L1..L3 producing P1/V1/V2.
class LevelController {
 public:
  LevelController(const plant::PlantConfig& plant, const ControllerConfig& config);

  plant::ActuatorInputs compute(const Eigen::Vector3d& levels_L, const Eigen::Vector3d& setpoints_L);

  /// Number of decisions that fell back to the previous input.
  int fallbacks() const { return fallbacks_; }

 private:
  ControllerConfig config_;
  std::optional<MpcController> mpc_;
  PiState pi_state_;
  Eigen::VectorXd previous_;
  int fallbacks_ = 0;
};

}  // namespace civic::control

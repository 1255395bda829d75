#pragma once

#include "oda/rng.hpp"

namespace oda {

struct CartPoleState {
    double x = 0.0;          // cart position, m
    double theta = 0.0;      // pole angle from vertical, rad
    double x_dot = 0.0;      // m/s
    double theta_dot = 0.0;  // rad/s
};

struct PhysicsParams {
    double g = 9.8;           // m/s^2
    double m_c = 1.0;         // cart mass, kg
    double m = 0.1;           // pole mass, kg
    double l = 0.5;           // half pole length, m
    double mu_c = 0.0005;     // cart-track friction coefficient
    double mu_p = 0.000002;   // pole-pivot friction coefficient
    double tau = 0.02;        // integration step, s
};

// |theta| > 12 degrees or |x| > 2.4 m ends the episode (strict inequalities).
inline constexpr double kCartPoleFailAngle = 0.2094395102393195;  // 12 deg in rad
inline constexpr double kCartPoleFailPosition = 2.4;

// Every component i.i.d. uniform on [-0.05, 0.05].
CartPoleState reset_cartpole(SplitRng& rng);

struct CartPoleStep {
    CartPoleState state;
    bool failed = false;
};

// Nonlinear cart-pole dynamics integrated by one explicit Euler step:
// positions advance by the current velocities, velocities by the computed
// accelerations (theta_ddot first, then x_ddot which depends on it).
CartPoleStep step_cartpole(const CartPoleState& state, double force, const PhysicsParams& params);

bool cartpole_failed(const CartPoleState& state);

}  // namespace oda

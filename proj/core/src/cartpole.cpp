#include "oda/envs/cartpole.hpp"

#include <cmath>

#include "oda/errors.hpp"

namespace oda {

namespace {

double sgn(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

void require_finite(const CartPoleState& s) {
    if (!std::isfinite(s.x) || !std::isfinite(s.theta) || !std::isfinite(s.x_dot) ||
        !std::isfinite(s.theta_dot))
        throw NumericalError("cart-pole state has non-finite components");
}

}  // namespace

CartPoleState reset_cartpole(SplitRng& rng) {
    CartPoleState s;
    s.x = rng.uniform(-0.05, 0.05);
    s.theta = rng.uniform(-0.05, 0.05);
    s.x_dot = rng.uniform(-0.05, 0.05);
    s.theta_dot = rng.uniform(-0.05, 0.05);
    return s;
}

bool cartpole_failed(const CartPoleState& s) {
    return std::abs(s.theta) > kCartPoleFailAngle || std::abs(s.x) > kCartPoleFailPosition;
}

CartPoleStep step_cartpole(const CartPoleState& state, double force, const PhysicsParams& p) {
    require_finite(state);
    const double sin_t = std::sin(state.theta);
    const double cos_t = std::cos(state.theta);
    const double total_mass = p.m_c + p.m;
    const double ml = p.m * p.l;

    // Pole angular acceleration from the state alone, then the cart
    // acceleration which couples to it.
    const double theta_ddot =
        (p.g * sin_t +
         cos_t * ((-force - ml * state.theta_dot * state.theta_dot * sin_t +
                   p.mu_c * sgn(state.x_dot)) /
                  total_mass) -
         p.mu_p * state.theta_dot / ml) /
        (p.l * (4.0 / 3.0 - p.m * cos_t * cos_t / total_mass));

    const double x_ddot =
        (force + ml * (state.theta_dot * state.theta_dot * sin_t - theta_ddot * cos_t) -
         p.mu_c * sgn(state.x_dot)) /
        total_mass;

    CartPoleStep out;
    out.state.x = state.x + p.tau * state.x_dot;
    out.state.theta = state.theta + p.tau * state.theta_dot;
    out.state.x_dot = state.x_dot + p.tau * x_ddot;
    out.state.theta_dot = state.theta_dot + p.tau * theta_ddot;
    require_finite(out.state);
    out.failed = cartpole_failed(out.state);
    return out;
}

}  // namespace oda

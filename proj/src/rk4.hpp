// rk4.hpp - Classic four-stage explicit step shared by the unitary, Redfield and composite engines

#pragma once

namespace oppc::detail {

// f(stage, y) evaluates the right-hand side at t + stage * dt / 2.
template <class State, class Rhs>
State rk4_step(const State& y, double dt, Rhs&& f) {
    const State k1 = f(0, y);
    const State k2 = f(1, State(y + (0.5 * dt) * k1));
    const State k3 = f(1, State(y + (0.5 * dt) * k2));
    const State k4 = f(2, State(y + dt * k3));
    return y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

} // namespace oppc::detail

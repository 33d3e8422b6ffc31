// trajectory.hpp - Propagation configuration and recorded time series

#pragma once

#include <string>
#include <vector>

#include "oppc/system.hpp"

namespace oppc {

enum class Method { Unitary, NonMarkovian, RedfieldNonSecular, RedfieldSecular };

std::string to_string(Method m);
Method parse_method(const std::string& name);

struct PropagatorConfig {
    double dt{0.01};
    double t0{0.0};
    double t_end{1.0};
    Method method{Method::Unitary};
    bool perturbative{false};
    int max_order{2};
    int history_stride{1};

    Eigen::Index steps() const;
};

// rho series per perturbative order (a single entry for nonperturbative runs);
// `observable` holds <O> of the summed state at each recorded time.
struct Trajectory {
    RealVector t;
    std::vector<std::vector<Matrix>> orders;
    RealVector observable;
    RealVector min_eigenvalue; // positivity monitor of the summed state

    const std::vector<Matrix>& rho() const { return orders.front(); }
    Matrix total(Eigen::Index step) const;
    RealVector population(int a, int order = -1) const; // order -1: summed state
    RealVector order_observable(const Matrix& observable, int order) const;
};

} // namespace oppc

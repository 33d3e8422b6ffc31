// system.hpp - Molecular system in its energy eigenbasis, density matrices and thermal states

#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "oppc/error.hpp"

namespace oppc {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr double kHermitianTol = 1e-10;
inline constexpr double kTraceTol = 1e-8;
inline constexpr double kPositivityTol = 1e-8;
inline constexpr double kDegeneracyTol = 1e-9;

// max |A_ab - conj(A_ba)|
double hermiticity_error(const Matrix& m);

// A system-bath coupling operator K^u. Operators sharing a bath group couple to
// the same environment operator Phi, so the pair (K, K^dagger) in one group
// yields a Hermitian (K + K^dagger) Phi.
struct Coupling {
    Matrix op;
    int bath_group{0};
    int adjoint{-1}; // index of the coupling holding op^dagger
};

class SystemModel {
public:
    int dim() const noexcept { return static_cast<int>(energies_.size()); }
    const RealVector& energies() const noexcept { return energies_; }
    double omega(int a, int b) const noexcept { return energies_[a] - energies_[b]; }
    double max_transition() const noexcept;

    const Matrix& dipole() const noexcept { return dipole_; }
    const Matrix& observable() const noexcept { return observable_; }
    const std::vector<Coupling>& couplings() const noexcept { return couplings_; }
    int bath_groups() const noexcept;

    Matrix hamiltonian() const;

    // Same system with every K^u multiplied by `scale`.
    SystemModel with_coupling_scale(double scale) const;
    SystemModel with_observable(const Matrix& observable) const;

private:
    friend SystemModel build_system(RealVector, Matrix, std::vector<Matrix>, Matrix, std::vector<int>);

    RealVector energies_;
    Matrix dipole_;
    std::vector<Coupling> couplings_;
    Matrix observable_;
};

// Validates the inputs and completes the adjoint pairing of the coupling list.
// `bath_groups` defaults to a single shared group.
SystemModel build_system(RealVector energies, Matrix dipole, std::vector<Matrix> couplings,
                         Matrix observable, std::vector<int> bath_groups = {});

// Unit-trace, Hermitian, approximately positive N x N matrix.
class DensityMatrix {
public:
    explicit DensityMatrix(Matrix rho);

    int dim() const noexcept { return static_cast<int>(rho_.rows()); }
    const Matrix& matrix() const noexcept { return rho_; }
    cplx operator()(int a, int b) const { return rho_(a, b); }

private:
    Matrix rho_;
};

// Frobenius norm of AB - BA.
double commutator_norm(const Matrix& a, const Matrix& b);

// sum_ab O_ab rho_ba; throws NonNegligibleImaginaryPart when |Im| >= 1e-10.
double expectation(const Matrix& observable, const Matrix& rho);
double expectation(const Matrix& observable, const DensityMatrix& rho);

// exp(-beta H_M) / Z; beta = +infinity selects the ground state.
DensityMatrix canonical_state(const SystemModel& system, double beta);

} // namespace oppc

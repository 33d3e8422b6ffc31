// system.cpp - SystemModel validation, expectation values and canonical states

#include "oppc/system.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>

namespace oppc {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::DimensionMismatch: return "DimensionMismatch";
        case ErrorKind::NonHermitianDipole: return "NonHermitianDipole";
        case ErrorKind::NonHermitianObservable: return "NonHermitianObservable";
        case ErrorKind::NonNegligibleImaginaryPart: return "NonNegligibleImaginaryPart";
        case ErrorKind::NonFinitePhase: return "NonFinitePhase";
        case ErrorKind::GridTooCoarse: return "GridTooCoarse";
        case ErrorKind::OutOfWindow: return "OutOfWindow";
        case ErrorKind::NonPositiveBeta: return "NonPositiveBeta";
        case ErrorKind::QuadratureNonConvergent: return "QuadratureNonConvergent";
        case ErrorKind::GridMismatch: return "GridMismatch";
        case ErrorKind::KernelNotDecayed: return "KernelNotDecayed";
        case ErrorKind::StepTooLarge: return "StepTooLarge";
        case ErrorKind::TraceDrift: return "TraceDrift";
        case ErrorKind::HistoryExhausted: return "HistoryExhausted";
        case ErrorKind::FrequencyOffGrid: return "FrequencyOffGrid";
        case ErrorKind::NotAFixedPoint: return "NotAFixedPoint";
        case ErrorKind::OrderTooHigh: return "OrderTooHigh";
        case ErrorKind::TruncationSuspect: return "TruncationSuspect";
        case ErrorKind::DimensionGuard: return "DimensionGuard";
        case ErrorKind::MaskAmplitudeMismatch: return "MaskAmplitudeMismatch";
        case ErrorKind::ContrastBelowNoiseFloor: return "ContrastBelowNoiseFloor";
        case ErrorKind::ParseError: return "ParseError";
        case ErrorKind::ValidationError: return "ValidationError";
        case ErrorKind::UnknownParameter: return "UnknownParameter";
        case ErrorKind::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

double hermiticity_error(const Matrix& m) {
    if (m.size() == 0) return 0.0;
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

double SystemModel::max_transition() const noexcept {
    if (energies_.size() == 0) return 0.0;
    return energies_.maxCoeff() - energies_.minCoeff();
}

int SystemModel::bath_groups() const noexcept {
    int groups = 0;
    for (const auto& k : couplings_) groups = std::max(groups, k.bath_group + 1);
    return groups;
}

Matrix SystemModel::hamiltonian() const {
    return energies_.cast<cplx>().asDiagonal();
}

SystemModel SystemModel::with_coupling_scale(double scale) const {
    SystemModel copy = *this;
    for (auto& k : copy.couplings_) k.op *= scale;
    return copy;
}

SystemModel SystemModel::with_observable(const Matrix& observable) const {
    require(observable.rows() == dim() && observable.cols() == dim(), ErrorKind::DimensionMismatch,
            "observable must be N x N");
    require(hermiticity_error(observable) <= kHermitianTol, ErrorKind::NonHermitianObservable,
            "observable is not Hermitian");
    SystemModel copy = *this;
    copy.observable_ = observable;
    return copy;
}

SystemModel build_system(RealVector energies, Matrix dipole, std::vector<Matrix> couplings,
                         Matrix observable, std::vector<int> bath_groups) {
    const auto n = energies.size();
    require(n > 0, ErrorKind::DimensionMismatch, "system needs at least one level");
    auto square = [n](const Matrix& m) { return m.rows() == n && m.cols() == n; };
    require(square(dipole), ErrorKind::DimensionMismatch, "dipole must be N x N");
    require(square(observable), ErrorKind::DimensionMismatch, "observable must be N x N");
    for (const auto& k : couplings)
        require(square(k), ErrorKind::DimensionMismatch, "coupling operators must be N x N");
    require(bath_groups.empty() || bath_groups.size() == couplings.size(),
            ErrorKind::DimensionMismatch, "one bath group per coupling operator");
    for (Eigen::Index a = 1; a < n; ++a)
        require(energies[a] >= energies[a - 1], ErrorKind::InvalidArgument,
                "energies must be sorted non-decreasing");
    require(hermiticity_error(dipole) <= kHermitianTol, ErrorKind::NonHermitianDipole,
            "dipole is not Hermitian");
    require(hermiticity_error(observable) <= kHermitianTol, ErrorKind::NonHermitianObservable,
            "observable is not Hermitian");

    SystemModel model;
    model.energies_ = std::move(energies);
    model.dipole_ = std::move(dipole);
    model.observable_ = std::move(observable);

    for (std::size_t u = 0; u < couplings.size(); ++u) {
        model.couplings_.push_back(
            Coupling{couplings[u], bath_groups.empty() ? 0 : bath_groups[u], -1});
    }
    // Adjoint completion: pair each K^u with an existing K^u' = (K^u)^dagger in
    // the same group, appending the adjoint when absent.
    for (std::size_t u = 0; u < model.couplings_.size(); ++u) {
        if (model.couplings_[u].adjoint >= 0) continue;
        const Matrix adj = model.couplings_[u].op.adjoint();
        if ((adj - model.couplings_[u].op).cwiseAbs().maxCoeff() <= kHermitianTol) {
            model.couplings_[u].adjoint = static_cast<int>(u);
            continue;
        }
        int match = -1;
        for (std::size_t v = 0; v < model.couplings_.size(); ++v) {
            const auto& other = model.couplings_[v];
            if (v == u || other.adjoint >= 0 || other.bath_group != model.couplings_[u].bath_group)
                continue;
            if ((other.op - adj).cwiseAbs().maxCoeff() <= kHermitianTol) {
                match = static_cast<int>(v);
                break;
            }
        }
        if (match < 0) {
            model.couplings_.push_back(Coupling{adj, model.couplings_[u].bath_group, -1});
            match = static_cast<int>(model.couplings_.size() - 1);
        }
        model.couplings_[u].adjoint = match;
        model.couplings_[match].adjoint = static_cast<int>(u);
    }
    return model;
}

DensityMatrix::DensityMatrix(Matrix rho) : rho_(std::move(rho)) {
    require(rho_.rows() == rho_.cols() && rho_.rows() > 0, ErrorKind::DimensionMismatch,
            "density matrix must be square");
    require(hermiticity_error(rho_) <= kHermitianTol, ErrorKind::InvalidArgument,
            "density matrix is not Hermitian");
    require(std::abs(rho_.trace() - 1.0) <= kTraceTol, ErrorKind::InvalidArgument,
            "density matrix trace differs from 1");
    Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (rho_ + rho_.adjoint()), Eigen::EigenvaluesOnly);
    require(eig.eigenvalues().minCoeff() >= -kPositivityTol, ErrorKind::InvalidArgument,
            "density matrix has a negative eigenvalue");
}

double commutator_norm(const Matrix& a, const Matrix& b) {
    require(a.rows() == b.rows() && a.cols() == b.cols() && a.rows() == a.cols(),
            ErrorKind::DimensionMismatch, "commutator operands differ in shape");
    return (a * b - b * a).norm();
}

double expectation(const Matrix& observable, const Matrix& rho) {
    require(observable.rows() == rho.rows() && observable.cols() == rho.cols(),
            ErrorKind::DimensionMismatch, "observable and state differ in shape");
    // sum_ab O_ab rho_ba = tr(O rho)
    const cplx value = (observable.array() * rho.transpose().array()).sum();
    require(std::abs(value.imag()) < 1e-10, ErrorKind::NonNegligibleImaginaryPart,
            "Im<O> = " + std::to_string(value.imag()));
    return value.real();
}

double expectation(const Matrix& observable, const DensityMatrix& rho) {
    return expectation(observable, rho.matrix());
}

DensityMatrix canonical_state(const SystemModel& system, double beta) {
    require(beta >= 0.0, ErrorKind::NonPositiveBeta, "beta must be >= 0");
    const int n = system.dim();
    const RealVector& e = system.energies();
    const double e_min = e.minCoeff();
    RealVector w(n);
    if (std::isinf(beta)) {
        for (int a = 0; a < n; ++a) w[a] = (e[a] - e_min <= kDegeneracyTol) ? 1.0 : 0.0;
    } else {
        for (int a = 0; a < n; ++a) w[a] = std::exp(-beta * (e[a] - e_min));
    }
    w /= w.sum();
    return DensityMatrix(Matrix(w.cast<cplx>().asDiagonal()));
}

} // namespace oppc

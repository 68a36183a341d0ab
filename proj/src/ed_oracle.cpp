#include "compass/ed_oracle.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace compass::ed {

const char* to_string(Boundary b) noexcept {
    switch (b) {
        case Boundary::periodic: return "periodic";
        case Boundary::open: return "open";
        case Boundary::twisted: return "twisted";
    }
    return "unknown";
}

SpinHamiltonian build_ising_hamiltonian(int N, double zz, double transverse, Boundary boundary) {
    if (N < 2) throw std::invalid_argument("exact diagonalization needs N >= 2");
    if (N > kMaxSpins)
        throw std::invalid_argument("exact diagonalization is capped at N = " + std::to_string(kMaxSpins) +
                                    " (got " + std::to_string(N) + ")");
    const Eigen::Index dim = Eigen::Index{1} << N;
    SpinHamiltonian h{N, boundary, Eigen::MatrixXd::Zero(dim, dim)};
    const int bonds = boundary == Boundary::periodic ? N : N - 1;
    const Eigen::Index all = dim - 1;

    for (Eigen::Index s = 0; s < dim; ++s) {
        double diag = 0.0;
        for (int j = 0; j < bonds; ++j) {
            const int next = (j + 1) % N;
            const bool same = ((s >> j) & 1) == ((s >> next) & 1);
            diag += same ? zz : -zz;
        }
        h.matrix(s, s) = diag;
        if (boundary == Boundary::twisted) {
            // zz z_{N-1} z_0 times the parity operator.
            const bool same = ((s >> (N - 1)) & 1) == (s & 1);
            h.matrix(s ^ all, s) += same ? zz : -zz;
        }
        for (int j = 0; j < N; ++j) h.matrix(s ^ (Eigen::Index{1} << j), s) += transverse;
    }
    return h;
}

SpinHamiltonian build_spin_hamiltonian(int N, double J, double field, Boundary boundary) {
    return build_ising_hamiltonian(N, J, J * field, boundary);
}

Eigen::VectorXd apply_parity(const Eigen::VectorXd& v) {
    const Eigen::Index mask = v.size() - 1;
    Eigen::VectorXd out(v.size());
    for (Eigen::Index s = 0; s < v.size(); ++s) out(s ^ mask) = v(s);
    return out;
}

double parity_expectation(const Eigen::VectorXd& v) {
    return v.dot(apply_parity(v)) / v.squaredNorm();
}

namespace {

Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> diagonalize(const SpinHamiltonian& h) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h.matrix);
    if (solver.info() != Eigen::Success) throw std::runtime_error("eigendecomposition failed");
    return solver;
}

GroundState pick_ground(const Eigen::VectorXd& energies, const Eigen::MatrixXd& vectors) {
    const double e0 = energies(0);
    const double tol = 1e-9 * std::max(1.0, std::abs(e0));
    Eigen::Index degenerate = 1;
    while (degenerate < energies.size() && energies(degenerate) - e0 < tol) ++degenerate;

    GroundState gs{e0, vectors.col(0)};
    if (degenerate == 1) return gs;

    // The degenerate manifold is parity invariant; keep its +1 component.
    double best = -1.0;
    for (Eigen::Index i = 0; i < degenerate; ++i) {
        const Eigen::VectorXd v = vectors.col(i);
        const Eigen::VectorXd even = 0.5 * (v + apply_parity(v));
        if (even.norm() > best) {
            best = even.norm();
            gs.vector = even;
        }
    }
    if (best < 1e-6) gs.vector = vectors.col(0);
    gs.vector.normalize();
    return gs;
}

// Boltzmann weights over the eigenbasis, shifted by the ground energy.
Eigen::VectorXd boltzmann(const Eigen::VectorXd& energies, double T) {
    Eigen::VectorXd p = (-(energies.array() - energies(0)) / T).exp();
    return p / p.sum();
}

}  // namespace

GroundState ground_state(const SpinHamiltonian& h) {
    const auto solver = diagonalize(h);
    return pick_ground(solver.eigenvalues(), solver.eigenvectors());
}

Eigen::MatrixXd thermal_state(const SpinHamiltonian& h, double T) {
    if (!(T > 0.0)) throw std::invalid_argument("thermal_state requires T > 0; use ground_state at T = 0");
    const auto solver = diagonalize(h);
    const Eigen::MatrixXd& V = solver.eigenvectors();
    const Eigen::VectorXd p = boltzmann(solver.eigenvalues(), T);
    return V * p.asDiagonal() * V.transpose();
}

EchoContext::EchoContext(const SpinHamiltonian& h_plus, const SpinHamiltonian& h_minus,
                         const SpinHamiltonian& h_prep, double T) {
    if (T < 0.0) throw std::invalid_argument("temperature must be >= 0");
    const auto plus = diagonalize(h_plus);
    const auto minus = diagonalize(h_minus);
    const auto prep = diagonalize(h_prep);
    e_plus_ = plus.eigenvalues();
    e_minus_ = minus.eigenvalues();
    const Eigen::MatrixXd& Vp = plus.eigenvectors();
    const Eigen::MatrixXd& Vm = minus.eigenvectors();

    // A = Vp^T rho Vm with rho diagonal in the preparation eigenbasis.
    Eigen::MatrixXd A;
    if (T == 0.0) {
        const GroundState gs = pick_ground(prep.eigenvalues(), prep.eigenvectors());
        A = (Vp.transpose() * gs.vector) * (Vm.transpose() * gs.vector).transpose();
    } else {
        const Eigen::VectorXd p = boltzmann(prep.eigenvalues(), T);
        const Eigen::MatrixXd V0 = prep.eigenvectors();
        A = (Vp.transpose() * V0) * p.asDiagonal() * (V0.transpose() * Vm);
    }
    const Eigen::MatrixXd O = Vm.transpose() * Vp;
    kernel_ = O.cwiseProduct(A.transpose());
}

std::complex<double> EchoContext::trace_factor(double t) const {
    // sum_{m'm} exp(i E-_{m'} t) K_{m'm} exp(-i E+_m t)
    const Eigen::VectorXd cp = (e_plus_ * t).array().cos();
    const Eigen::VectorXd sp = (e_plus_ * t).array().sin();
    const Eigen::VectorXd cm = (e_minus_ * t).array().cos();
    const Eigen::VectorXd sm = (e_minus_ * t).array().sin();
    const Eigen::VectorXd kc = kernel_ * cp;
    const Eigen::VectorXd ks = kernel_ * sp;
    // (cm + i sm) . (kc - i ks)
    return {cm.dot(kc) + sm.dot(ks), sm.dot(kc) - cm.dot(ks)};
}

EchoContext make_echo_context(int N, double J, const DerivedCouplings& couplings, double T, Boundary boundary,
                              std::optional<double> preparation_field) {
    const double prep = preparation_field.value_or(couplings.lambda);
    return EchoContext(build_spin_hamiltonian(N, J, couplings.lambda_plus, boundary),
                       build_spin_hamiltonian(N, J, couplings.lambda_minus, boundary),
                       build_spin_hamiltonian(N, J, prep, boundary), T);
}

double echo_ed(int N, double J, const DerivedCouplings& couplings, double T, double t, Boundary boundary) {
    return make_echo_context(N, J, couplings, T, boundary).echo(t);
}

std::complex<double> echo_ed_trace(int N, double J, const DerivedCouplings& couplings, double T, double t,
                                   Boundary boundary) {
    return make_echo_context(N, J, couplings, T, boundary).trace_factor(t);
}

}  // namespace compass::ed

#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "ga2d/atoms.hpp"
#include "ga2d/core.hpp"
#include "ga2d/state.hpp"

namespace ga2d {

inline constexpr int dense_lattice_limit = 40;

/// Full single-excitation Hamiltonian. Couplings are real, so the matrix is real symmetric.
/// Basis order matches SystemState: atoms first, then cavities row-major.
struct DenseHamiltonian {
    Eigen::MatrixXd matrix;
    std::size_t num_atoms = 0;
    LatticeSpec lattice;

    Eigen::Index dimension() const { return matrix.rows(); }
};

inline void check_dense_guard(const LatticeSpec& lattice) {
    if (lattice.N > dense_lattice_limit)
        throw GuardError("dense oracle: N = " + std::to_string(lattice.N) + " exceeds the limit of " +
                         std::to_string(dense_lattice_limit));
}

inline DenseHamiltonian build_dense(const SystemConfig& config) {
    config.validate();
    check_dense_guard(config.lattice);
    const auto M = static_cast<Eigen::Index>(config.atoms.size());
    const auto& lat = config.lattice;
    const Eigen::Index dim = M + static_cast<Eigen::Index>(lat.cavities());
    DenseHamiltonian h{Eigen::MatrixXd::Zero(dim, dim), config.atoms.size(), lat};
    for (int y = 0; y < lat.N; ++y)
        for (int x = 0; x < lat.N; ++x) {
            const Eigen::Index a = M + static_cast<Eigen::Index>(lat.index({x, y}));
            for (Site d : {Site{1, 0}, Site{0, 1}}) {
                const Eigen::Index b = M + static_cast<Eigen::Index>(lat.index(Site{x, y} + d));
                h.matrix(a, b) += -lat.J;
                h.matrix(b, a) += -lat.J;
            }
        }
    for (Eigen::Index i = 0; i < M; ++i) {
        const auto& atom = config.atoms[static_cast<std::size_t>(i)];
        h.matrix(i, i) = atom.detuning;
        for (const auto& p : atom.points) {
            const Eigen::Index c = M + static_cast<Eigen::Index>(lat.index(p.position));
            h.matrix(i, c) += p.strength;
            h.matrix(c, i) += p.strength;
        }
    }
    return h;
}

inline Eigen::VectorXcd to_vector(const SystemState& s) {
    Eigen::VectorXcd v(static_cast<Eigen::Index>(s.dimension()));
    for (std::size_t i = 0; i < s.dimension(); ++i) v(static_cast<Eigen::Index>(i)) = s[i];
    return v;
}

inline SystemState from_vector(const Eigen::VectorXcd& v, std::size_t num_atoms, const LatticeSpec& lattice) {
    SystemState s(num_atoms, lattice);
    if (static_cast<std::size_t>(v.size()) != s.dimension()) throw ConfigError("oracle: vector dimension mismatch");
    for (std::size_t i = 0; i < s.dimension(); ++i) s[i] = v(static_cast<Eigen::Index>(i));
    return s;
}

/// exp(-i H t) from one eigendecomposition; reusable for any number of times.
class ExactPropagator {
  public:
    explicit ExactPropagator(const DenseHamiltonian& h) : num_atoms_(h.num_atoms), lattice_(h.lattice), solver_(h.matrix) {
        if (solver_.info() != Eigen::Success) throw SingularityError("oracle: eigendecomposition failed");
    }

    const Eigen::VectorXd& eigenvalues() const { return solver_.eigenvalues(); }
    const Eigen::MatrixXd& eigenvectors() const { return solver_.eigenvectors(); }

    SystemState evolve(const SystemState& initial, double t) const {
        const auto& V = solver_.eigenvectors();
        const Eigen::VectorXcd v0 = to_vector(initial);
        const Eigen::VectorXd re = V.transpose() * v0.real();
        const Eigen::VectorXd im = V.transpose() * v0.imag();
        Eigen::VectorXd cr(re.size()), ci(re.size());
        for (Eigen::Index k = 0; k < re.size(); ++k) {
            const cplx c = cplx{re(k), im(k)} * std::polar(1.0, -solver_.eigenvalues()(k) * t);
            cr(k) = c.real();
            ci(k) = c.imag();
        }
        Eigen::VectorXcd v(re.size());
        v.real() = V * cr;
        v.imag() = V * ci;
        return from_vector(v, num_atoms_, lattice_);
    }

  private:
    std::size_t num_atoms_;
    LatticeSpec lattice_;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver_;
};

inline std::vector<SystemState> exact_evolve(const SystemConfig& config, const SystemState& initial,
                                             const std::vector<double>& times) {
    const ExactPropagator prop(build_dense(config));
    std::vector<SystemState> out;
    out.reserve(times.size());
    for (double t : times) out.push_back(prop.evolve(initial, t));
    return out;
}

/// <psi|H|psi> for the dense Hamiltonian.
inline double energy(const DenseHamiltonian& h, const SystemState& s) {
    const Eigen::VectorXcd v = to_vector(s);
    return (v.adjoint() * (h.matrix.cast<cplx>() * v))(0).real();
}

}  // namespace ga2d

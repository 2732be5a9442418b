#pragma once

// Plane-wave solutions of the Dirac equation (natural units, hbar = c = 1)
// in the standard Dirac representation:
//   beta = diag(1, 1, -1, -1),  alpha_i = [[0, sigma_i], [sigma_i, 0]].
// For spin-up propagation along z the problem reduces to components (1, 3)
// and the 2x2 Hamiltonian H(k) = [[m, k], [k, -m]].

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace klein {

template <typename Scalar>
using Complex = std::complex<Scalar>;

template <typename Scalar>
using Spinor2 = Eigen::Matrix<std::complex<Scalar>, 2, 1>;

template <typename Scalar>
using Spinor4 = Eigen::Matrix<std::complex<Scalar>, 4, 1>;

template <typename Scalar>
using Matrix2c = Eigen::Matrix<std::complex<Scalar>, 2, 2>;

template <typename Scalar>
using Matrix4c = Eigen::Matrix<std::complex<Scalar>, 4, 4>;

template <typename Scalar>
using Momentum3 = Eigen::Matrix<Scalar, 3, 1>;

/// Raised when a coefficient or amplitude has a vanishing denominator.
class singularity_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Branch { positive, negative };
enum class Spin { up, down };
enum class Region { I, II };

/// Energy, mass and constant potential of one region together with the
/// local wavevector magnitude. When the region is classically forbidden
/// (|E - V| < m) `wavevector` holds the evanescent decay rate instead.
template <typename Scalar>
struct Kinematics1D {
    Scalar energy{};
    Scalar mass{};
    Scalar potential{};
    Scalar wavevector{};
    bool propagating{};

    Scalar local_energy() const { return energy - potential; }
};

/// p = sqrt(E^2 - m^2). Throws std::domain_error below the mass shell.
template <typename Scalar>
Scalar momentum(Scalar energy, Scalar mass)
{
    if (std::abs(energy) < mass)
        throw std::domain_error("momentum: |E| < m, no propagating solution");
    return std::sqrt((energy - mass) * (energy + mass));
}

template <typename Scalar>
Kinematics1D<Scalar> local_wavevector(Scalar energy, Scalar potential, Scalar mass)
{
    if (mass < Scalar(0))
        throw std::invalid_argument("local_wavevector: negative mass");
    const Scalar eps = energy - potential;
    const Scalar d = (std::abs(eps) - mass) * (std::abs(eps) + mass);
    if (d >= Scalar(0))
        return {energy, mass, potential, std::sqrt(d), true};
    return {energy, mass, potential, std::sqrt(-d), false};
}

/// Full 4x4 Dirac Hamiltonian alpha.p + beta m.
template <typename Scalar>
Matrix4c<Scalar> dirac_hamiltonian(const Momentum3<Scalar>& p, Scalar mass)
{
    using C = Complex<Scalar>;
    const C i{0, 1};
    Matrix2c<Scalar> sigma_p;
    sigma_p << C(p.z()), C(p.x()) - i * p.y(),
               C(p.x()) + i * p.y(), C(-p.z());

    Matrix4c<Scalar> h = Matrix4c<Scalar>::Zero();
    h.template topRightCorner<2, 2>() = sigma_p;
    h.template bottomLeftCorner<2, 2>() = sigma_p;
    h.template topLeftCorner<2, 2>().diagonal().setConstant(C(mass));
    h.template bottomRightCorner<2, 2>().diagonal().setConstant(C(-mass));
    return h;
}

/// Reduced 1-D Hamiltonian [[m, k], [k, -m]]; k may be complex (evanescent).
template <typename Scalar>
Matrix2c<Scalar> reduced_hamiltonian(Complex<Scalar> k, Scalar mass)
{
    Matrix2c<Scalar> h;
    h << Complex<Scalar>(mass), k,
         k, Complex<Scalar>(-mass);
    return h;
}

namespace detail {

template <typename Scalar>
bool on_shell(Complex<Scalar> energy_sq_minus_k_sq, Scalar mass, Scalar scale, Scalar rel_tol)
{
    const Scalar mismatch = std::abs(energy_sq_minus_k_sq - Complex<Scalar>(mass * mass));
    return mismatch <= rel_tol * std::max(scale, std::numeric_limits<Scalar>::min());
}

} // namespace detail

/// One column of the four plane-wave spinors of the Dirac equation.
/// The psi_- columns satisfy H(p) psi = E psi with the same on-shell E as the
/// psi_+ columns; the physical negative-energy state exp(iEt - ip.x) psi_-(p)
/// then carries energy -E and momentum -p.
///
/// With `normalized` the column is scaled by N = {2 pi [2E(E +- m)]}^{-1/2}.
template <typename Scalar>
Spinor4<Scalar> make_spinor4(Scalar energy, const Momentum3<Scalar>& p, Scalar mass,
                             Branch branch, Spin spin, bool normalized = false)
{
    using C = Complex<Scalar>;
    const C i{0, 1};
    const Scalar p_sq = p.squaredNorm();
    const Scalar scale = std::max({energy * energy, p_sq, mass * mass});
    if (!detail::on_shell(C(energy * energy - p_sq), mass, scale, Scalar(1e-9)))
        throw std::invalid_argument("make_spinor4: (E, p, m) is not on the mass shell");

    const C p_plus = C(p.x()) + i * p.y();
    const C p_minus = C(p.x()) - i * p.y();
    const C pz(p.z());

    Spinor4<Scalar> psi;
    if (branch == Branch::positive) {
        const C e_plus_m(energy + mass);
        if (spin == Spin::up)
            psi << e_plus_m, C(0), pz, p_plus;
        else
            psi << C(0), e_plus_m, p_minus, -pz;
    } else {
        const C e_minus_m(energy - mass);
        if (spin == Spin::up)
            psi << pz, p_plus, e_minus_m, C(0);
        else
            psi << p_minus, -pz, C(0), e_minus_m;
    }

    if (psi.squaredNorm() == Scalar(0))
        throw std::domain_error("make_spinor4: spinor vanishes for this branch at rest");

    if (normalized) {
        const Scalar factor = energy * (branch == Branch::positive ? energy + mass : energy - mass);
        if (!(factor > Scalar(0)))
            throw std::domain_error("make_spinor4: normalization E(E +- m) must be positive");
        psi *= Scalar(1) / std::sqrt(Scalar(2) * std::numbers::pi_v<Scalar> * Scalar(2) * factor);
    }
    return psi;
}

/// Eigenvector (k, eps - m) of the reduced Hamiltonian with eigenvalue eps.
/// At the rest point k = 0, eps = m the proportional form (eps + m, k) = (2m, 0)
/// is returned instead. Imaginary k gives the evanescent solution.
template <typename Scalar>
Spinor2<Scalar> make_spinor2(Scalar local_energy, Complex<Scalar> k, Scalar mass)
{
    using C = Complex<Scalar>;
    const Scalar scale = std::max({local_energy * local_energy, std::norm(k), mass * mass});
    if (!detail::on_shell(C(local_energy * local_energy) - k * k, mass, scale, Scalar(1e-9)))
        throw std::invalid_argument("make_spinor2: (eps, k, m) is not on the mass shell");

    Spinor2<Scalar> psi(k, C(local_energy - mass));
    if (k == C(0) && local_energy - mass == Scalar(0))
        psi << C(2 * mass), C(0);
    if (psi.squaredNorm() == Scalar(0))
        throw std::domain_error("make_spinor2: zero spinor (massless rest point)");
    return psi;
}

template <typename Scalar>
Spinor2<Scalar> make_spinor2(Scalar local_energy, Scalar k, Scalar mass)
{
    return make_spinor2(local_energy, Complex<Scalar>(k), mass);
}

/// ||H psi - eps psi|| / ||psi|| for the reduced Hamiltonian.
template <typename Scalar>
Scalar hamiltonian_residual(const Spinor2<Scalar>& psi, Scalar local_energy,
                            Complex<Scalar> k, Scalar mass)
{
    const Scalar norm = psi.norm();
    if (norm == Scalar(0))
        throw std::invalid_argument("hamiltonian_residual: zero spinor");
    return (reduced_hamiltonian(k, mass) * psi - local_energy * psi).norm() / norm;
}

template <typename Scalar>
Scalar hamiltonian_residual(const Spinor2<Scalar>& psi, Scalar local_energy, Scalar k, Scalar mass)
{
    return hamiltonian_residual(psi, local_energy, Complex<Scalar>(k), mass);
}

template <typename Scalar>
Scalar hamiltonian_residual(const Spinor4<Scalar>& psi, Scalar energy,
                            const Momentum3<Scalar>& p, Scalar mass)
{
    const Scalar norm = psi.norm();
    if (norm == Scalar(0))
        throw std::invalid_argument("hamiltonian_residual: zero spinor");
    return (dirac_hamiltonian(p, mass) * psi - energy * psi).norm() / norm;
}

/// Probability current psi^dagger alpha_z psi. In the reduced representation
/// alpha_z swaps the two components, so j = 2 Re(conj(upper) * lower).
template <typename Scalar>
Scalar current_density(const Spinor2<Scalar>& psi)
{
    return Scalar(2) * std::real(std::conj(psi(0)) * psi(1));
}

/// Region normalization coefficients for the step problem:
///   N_I  = {2 pi [2 p (E - m)]}^{-1/2}
///   N_II = {2 pi [2 q |E - V0 - m|]}^{-1/2}
template <typename Scalar>
Scalar normalization_factor(Region region, Scalar energy, Scalar mass, Scalar height = Scalar(0))
{
    constexpr Scalar two_pi = Scalar(2) * std::numbers::pi_v<Scalar>;
    Scalar denom{};
    if (region == Region::I) {
        denom = Scalar(2) * momentum(energy, mass) * (energy - mass);
    } else {
        const auto kin = local_wavevector(energy, height, mass);
        if (!kin.propagating)
            throw std::domain_error("normalization_factor: region II is not propagating");
        denom = Scalar(2) * kin.wavevector * std::abs(energy - height - mass);
    }
    if (!(denom > Scalar(0)))
        throw std::domain_error("normalization_factor: threshold, factor diverges");
    return Scalar(1) / std::sqrt(two_pi * denom);
}

} // namespace klein

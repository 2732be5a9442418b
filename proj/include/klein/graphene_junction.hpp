#pragma once

// Massless two-dimensional Dirac fermions (graphene) at oblique incidence on
// a potential step or a finite-width barrier along x. Energies in eV, lengths
// in nm; hbar*v_F is the only material constant.
//
// Electron incidence (E > 0) only. Spinors are (1, s e^{i phi}) with
// e^{i phi} = (k_x + i k_y) / |k| and s the band sign; for an evanescent
// region k_x is imaginary and e^{i phi} is its analytic continuation.

#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "klein/dirac_core.hpp"
#include "klein/step_scattering.hpp"

namespace klein {

template <typename Scalar>
struct GrapheneMaterial {
    // hbar * c / 300 with hbar*c = 197.3269804 eV nm
    Scalar hbar_vf{Scalar(197.3269804) / Scalar(300)};

    void validate() const
    {
        if (!(hbar_vf > Scalar(0)))
            throw std::invalid_argument("GrapheneMaterial: hbar_vf must be positive");
    }
};

template <typename Scalar>
Scalar fermi_wavevector(Scalar wavelength)
{
    if (!(wavelength > Scalar(0)))
        throw std::invalid_argument("fermi_wavevector: wavelength must be positive");
    return Scalar(2) * std::numbers::pi_v<Scalar> / wavelength;
}

template <typename Scalar>
Scalar energy_from_wavelength(Scalar wavelength, const GrapheneMaterial<Scalar>& material = {})
{
    return material.hbar_vf * fermi_wavevector(wavelength);
}

template <typename Scalar>
int band_sign(Scalar x)
{
    return (x > Scalar(0)) - (x < Scalar(0));
}

template <typename Scalar>
struct AngleKinematics {
    Scalar energy{};
    Scalar height{};
    Scalar theta_incident{};
    Scalar fermi_wavevector{};
    Scalar ky{};
    Scalar k_region2{};               // |E - V0| / hbar v_F
    Complex<Scalar> kx_region2{};     // real >= 0 when propagating, i*|kappa| otherwise
    Scalar theta_region2{};           // NaN when evanescent
    int band_incident{};
    int band_region2{};
    bool propagating{};

    Scalar kx_incident() const { return fermi_wavevector * std::cos(theta_incident); }
};

template <typename Scalar>
AngleKinematics<Scalar> angle_kinematics(Scalar energy, Scalar height, Scalar theta,
                                         const GrapheneMaterial<Scalar>& material = {})
{
    material.validate();
    if (!(energy > Scalar(0)))
        throw std::invalid_argument("angle_kinematics: only electron incidence (E > 0) is supported");
    if (!(std::abs(theta) < std::numbers::pi_v<Scalar> / Scalar(2)))
        throw std::invalid_argument("angle_kinematics: |theta| must be below pi/2");

    AngleKinematics<Scalar> ak;
    ak.energy = energy;
    ak.height = height;
    ak.theta_incident = theta;
    ak.fermi_wavevector = energy / material.hbar_vf;
    ak.ky = ak.fermi_wavevector * std::sin(theta);
    ak.k_region2 = std::abs(energy - height) / material.hbar_vf;
    ak.band_incident = band_sign(energy);
    ak.band_region2 = band_sign(energy - height);

    const Scalar d = (ak.k_region2 - std::abs(ak.ky)) * (ak.k_region2 + std::abs(ak.ky));
    ak.propagating = d >= Scalar(0);
    if (ak.propagating) {
        ak.kx_region2 = Complex<Scalar>(std::sqrt(d), 0);
        ak.theta_region2 = std::atan2(ak.ky, std::sqrt(d));
    } else {
        ak.kx_region2 = Complex<Scalar>(0, std::sqrt(-d));
        ak.theta_region2 = std::numeric_limits<Scalar>::quiet_NaN();
    }
    return ak;
}

/// arcsin(|E - V0| / E) when region II can become evanescent, none otherwise.
template <typename Scalar>
std::optional<Scalar> critical_angle(Scalar energy, Scalar height)
{
    if (!(energy > Scalar(0)))
        throw std::invalid_argument("critical_angle: E must be positive");
    const Scalar ratio = std::abs(energy - height) / energy;
    if (ratio < Scalar(1))
        return std::asin(ratio);
    return std::nullopt;
}

namespace detail {

template <typename Scalar>
void require_propagating(const AngleKinematics<Scalar>& ak, const char* who)
{
    if (!ak.propagating)
        throw std::domain_error(std::string(who) + ": region II is evanescent");
}

} // namespace detail

/// Step amplitude with the conventional region-II wave exp(+i k_xII x):
///   t = 2 s_I cos(theta_I) / [s_I e^{-i theta_I} + s_II e^{i theta_II}]
template <typename Scalar>
Complex<Scalar> t_common(const AngleKinematics<Scalar>& ak)
{
    using C = Complex<Scalar>;
    detail::require_propagating(ak, "t_common");
    const C i{0, 1};
    const Scalar s1 = Scalar(ak.band_incident), s2 = Scalar(ak.band_region2);
    const C denom = s1 * std::exp(-i * ak.theta_incident) + s2 * std::exp(i * ak.theta_region2);
    if (std::abs(denom) < Scalar(1e-12))
        throw singularity_error(
            "t_common: denominator s_I exp(-i theta_I) + s_II exp(i theta_II) vanishes");
    return Scalar(2) * s1 * std::cos(ak.theta_incident) / denom;
}

/// Step amplitude with the region-II wave exp(-i k_xII x):
///   t = 2 cos(theta_I) / [e^{-i theta_I} + e^{-i theta_II}]
template <typename Scalar>
Complex<Scalar> t_paper(const AngleKinematics<Scalar>& ak)
{
    using C = Complex<Scalar>;
    detail::require_propagating(ak, "t_paper");
    const C i{0, 1};
    const C denom = std::exp(-i * ak.theta_incident) + std::exp(-i * ak.theta_region2);
    if (std::abs(denom) < Scalar(1e-12))
        throw singularity_error("t_paper: denominator exp(-i theta_I) + exp(-i theta_II) vanishes");
    return Scalar(2) * std::cos(ak.theta_incident) / denom;
}

template <typename Scalar>
Complex<Scalar> step_amplitude(const AngleKinematics<Scalar>& ak, Convention convention)
{
    return convention == Convention::paper_kappa ? t_paper(ak) : t_common(ak);
}

/// T = |t|^2 cos(theta_II) / cos(theta_I). Not clamped.
template <typename Scalar>
Scalar transmission_probability(Complex<Scalar> t, const AngleKinematics<Scalar>& ak)
{
    detail::require_propagating(ak, "transmission_probability");
    const Scalar c1 = std::cos(ak.theta_incident);
    if (!(c1 > Scalar(0)))
        throw std::domain_error("transmission_probability: cos(theta_I) = 0");
    return std::norm(t) * std::cos(ak.theta_region2) / c1;
}

template <typename Scalar>
struct BarrierResult {
    Complex<Scalar> r{};
    Complex<Scalar> t{};
    Scalar R{};
    Scalar T{};
};

namespace detail {

template <typename Scalar>
struct GrapheneWave {
    Spinor2<Scalar> spinor;
    Complex<Scalar> kx;
};

// (1, s e^{i phi}) for wavevector (kx, ky) with |k| = k_mag.
template <typename Scalar>
Spinor2<Scalar> graphene_spinor(Complex<Scalar> kx, Scalar ky, Scalar k_mag, int band)
{
    using C = Complex<Scalar>;
    const C phase = (kx + C(0, 1) * ky) / k_mag;
    return Spinor2<Scalar>(C(1), Scalar(band) * phase);
}

} // namespace detail

/// Two-interface transmission through a barrier of height V0 on 0 < x < D.
/// The region-II wave pair follows the chosen convention: exp(+i k_x x) as the
/// forward wave for the common convention, exp(-i k_x x) for the paper
/// convention. Both pairs span the same solution space, so T agrees.
template <typename Scalar>
BarrierResult<Scalar> barrier_transmission(Scalar energy, Scalar height, Scalar width, Scalar theta,
                                           Convention convention,
                                           const GrapheneMaterial<Scalar>& material = {})
{
    using C = Complex<Scalar>;
    if (!(width > Scalar(0)))
        throw std::invalid_argument("barrier_transmission: width must be positive");
    const auto ak = angle_kinematics(energy, height, theta, material);
    if (ak.band_region2 == 0)
        throw std::domain_error("barrier_transmission: E = V0, region II spinor is undefined");
    if (std::abs(ak.kx_region2) <= Scalar(1e-12) * ak.k_region2)
        throw std::domain_error("barrier_transmission: critical angle, region II waves are degenerate");

    const C i{0, 1};
    const Scalar kx1 = ak.kx_incident();
    const Scalar kf = ak.fermi_wavevector;
    const int s1 = ak.band_incident;
    const int s2 = ak.band_region2;
    const C kx2 = ak.kx_region2;

    const Spinor2<Scalar> incident = detail::graphene_spinor(C(kx1), ak.ky, kf, s1);
    const Spinor2<Scalar> reflected = detail::graphene_spinor(C(-kx1), ak.ky, kf, s1);

    const Scalar dir = convention == Convention::paper_kappa ? Scalar(-1) : Scalar(1);
    const std::array<detail::GrapheneWave<Scalar>, 2> inside{{
        {detail::graphene_spinor(dir * kx2, ak.ky, ak.k_region2, s2), dir * kx2},
        {detail::graphene_spinor(-dir * kx2, ak.ky, ak.k_region2, s2), -dir * kx2},
    }};

    // anchor each interior wave where it is largest so that exp(i kx (x - x_ref))
    // stays bounded by 1 on [0, D]
    const auto wave_at = [&](const detail::GrapheneWave<Scalar>& w, Scalar x) -> Spinor2<Scalar> {
        const Scalar x_ref = std::imag(w.kx) >= Scalar(0) ? Scalar(0) : width;
        return std::exp(i * w.kx * (x - x_ref)) * w.spinor;
    };

    // unknowns: r, A, B, t
    Eigen::Matrix<C, 4, 4> system = Eigen::Matrix<C, 4, 4>::Zero();
    Eigen::Matrix<C, 4, 1> rhs = Eigen::Matrix<C, 4, 1>::Zero();
    system.template block<2, 1>(0, 0) = reflected;
    system.template block<2, 1>(0, 1) = -wave_at(inside[0], Scalar(0));
    system.template block<2, 1>(0, 2) = -wave_at(inside[1], Scalar(0));
    rhs.template head<2>() = -incident;
    system.template block<2, 1>(2, 1) = wave_at(inside[0], width);
    system.template block<2, 1>(2, 2) = wave_at(inside[1], width);
    system.template block<2, 1>(2, 3) = -incident;

    const Eigen::FullPivLU<Eigen::Matrix<C, 4, 4>> lu(system);
    if (!lu.isInvertible())
        throw singularity_error("barrier_transmission: matching system is singular");
    const Eigen::Matrix<C, 4, 1> x = lu.solve(rhs);

    BarrierResult<Scalar> out;
    out.r = x(0);
    out.t = x(3);
    out.R = std::norm(out.r);
    out.T = std::norm(out.t);
    return out;
}

} // namespace klein

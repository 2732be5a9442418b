#pragma once

// One-dimensional Dirac scattering on a potential step of height V0 at z = 0.
// Region I (z < 0) is free; region II (z > 0) sits at potential V0.
//
// Two conventions for the transmitted wave in the Klein interval
// (E + m < V0) are supported:
//   paper_kappa         negative-energy spinor (-q, eps - m) with phase exp(+iqz),
//                       giving kappa in [0, 1] and 0 <= R, T <= 1;
//   common_kappa_prime  spinor (q, eps - m) with phase exp(+iqz), giving
//                       kappa' = -1/kappa, T < 0 and R > 1.

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "klein/dirac_core.hpp"

namespace klein {

enum class Regime { above_barrier, evanescent, klein, threshold_upper, threshold_lower };
enum class Convention { paper_kappa, common_kappa_prime };
enum class SolveStatus { ok, threshold };

inline std::string_view to_string(Regime regime)
{
    switch (regime) {
    case Regime::above_barrier: return "above_barrier";
    case Regime::evanescent: return "evanescent";
    case Regime::klein: return "klein";
    case Regime::threshold_upper: return "threshold_upper";
    case Regime::threshold_lower: return "threshold_lower";
    }
    return "unknown";
}

inline std::string_view to_string(Convention convention)
{
    return convention == Convention::paper_kappa ? "paper" : "common";
}

template <typename Scalar>
struct StepProblem {
    Scalar energy{};
    Scalar mass{};
    Scalar height{};

    void validate() const
    {
        if (!(mass >= Scalar(0)))
            throw std::invalid_argument("StepProblem: mass must be >= 0");
        if (!(height > Scalar(0)))
            throw std::invalid_argument("StepProblem: step height must be > 0");
        if (!(energy > mass))
            throw std::invalid_argument("StepProblem: incident energy must exceed the mass");
    }

    Scalar incident_momentum() const { return momentum(energy, mass); }
    Scalar local_energy() const { return energy - height; }
};

template <typename Scalar>
struct ReflectionTransmission {
    Scalar R{};
    Scalar T{};
};

template <typename Scalar>
struct StepScatteringSolution {
    Convention convention{};
    Regime regime{};
    SolveStatus status{SolveStatus::ok};
    std::optional<Scalar> kappa_value;
    Complex<Scalar> r{};
    Complex<Scalar> t{};
    Scalar R{};
    Scalar T{};
    // currents carried by the incident, reflected and transmitted waves
    Scalar j_incident{};
    Scalar j_reflected{};
    Scalar j_transmitted{};
};

inline constexpr double threshold_tolerance = 1e-12;

template <typename Scalar>
Regime classify_regime(const StepProblem<Scalar>& problem)
{
    problem.validate();
    const Scalar e = problem.energy;
    const Scalar upper = problem.height + problem.mass;
    const Scalar lower = problem.height - problem.mass;
    if (std::abs(e - upper) < Scalar(threshold_tolerance))
        return Regime::threshold_upper;
    if (std::abs(e - lower) < Scalar(threshold_tolerance))
        return Regime::threshold_lower;
    if (e > upper)
        return Regime::above_barrier;
    if (e < lower)
        return Regime::klein;
    return Regime::evanescent;
}

/// kappa = sqrt[(V0 - E - m)(E - m) / ((V0 - E + m)(E + m))], defined in the
/// Klein interval and equal to 0 at its upper edge E = V0 - m.
template <typename Scalar>
Scalar kappa(const StepProblem<Scalar>& problem)
{
    const Regime regime = classify_regime(problem);
    if (regime == Regime::threshold_lower)
        return Scalar(0);
    if (regime != Regime::klein)
        throw std::domain_error("kappa: defined only in the Klein interval");
    const Scalar e = problem.energy, m = problem.mass, v = problem.height;
    return std::sqrt((v - e - m) * (e - m) / ((v - e + m) * (e + m)));
}

/// The same kappa through the momentum form -q/p (E - m)/(E - V0 - m).
template <typename Scalar>
Scalar kappa_momentum_form(const StepProblem<Scalar>& problem)
{
    if (classify_regime(problem) != Regime::klein)
        throw std::domain_error("kappa: defined only in the Klein interval");
    const Scalar e = problem.energy, m = problem.mass, v = problem.height;
    const Scalar p = problem.incident_momentum();
    const Scalar q = local_wavevector(e, v, m).wavevector;
    return -q / p * (e - m) / (e - v - m);
}

/// kappa' = q(E + m) / [p(E + m - V0)], negative in the Klein interval.
template <typename Scalar>
Scalar kappa_prime(const StepProblem<Scalar>& problem)
{
    if (classify_regime(problem) != Regime::klein)
        throw std::domain_error("kappa_prime: defined only in the Klein interval");
    const Scalar e = problem.energy, m = problem.mass, v = problem.height;
    const Scalar p = problem.incident_momentum();
    const Scalar q = local_wavevector(e, v, m).wavevector;
    return q * (e + m) / (p * (e + m - v));
}

/// R = ((1 - x)/(1 + x))^2, T = 4x/(1 + x)^2. Singular at x = -1.
template <typename Scalar>
ReflectionTransmission<Scalar> rt_from_kappa(Scalar x)
{
    const Scalar denom = Scalar(1) + x;
    if (!(std::abs(denom) >= Scalar(1e-14)))
        throw singularity_error("rt_from_kappa: 1 + kappa vanishes (kappa = -1)");
    const Scalar ratio = (Scalar(1) - x) / denom;
    return {ratio * ratio, Scalar(4) * x / (denom * denom)};
}

namespace detail {

template <typename Scalar>
struct TransmittedWave {
    Spinor2<Scalar> spinor;
    Complex<Scalar> wavevector;
};

template <typename Scalar>
TransmittedWave<Scalar> transmitted_wave(const StepProblem<Scalar>& problem, Regime regime,
                                         Convention convention)
{
    using C = Complex<Scalar>;
    const Scalar m = problem.mass;
    const Scalar eps = problem.local_energy();
    const auto kin = local_wavevector(problem.energy, problem.height, m);
    switch (regime) {
    case Regime::klein: {
        const Scalar q = kin.wavevector;
        const Scalar spinor_k = convention == Convention::paper_kappa ? -q : q;
        return {make_spinor2(eps, C(spinor_k), m), C(q)};
    }
    case Regime::above_barrier:
        return {make_spinor2(eps, C(kin.wavevector), m), C(kin.wavevector)};
    case Regime::evanescent: {
        const C k{0, kin.wavevector};
        return {make_spinor2(eps, k, m), k};
    }
    default:
        // thresholds: q = 0
        return {make_spinor2(eps, C(0), m), C(0)};
    }
}

} // namespace detail

/// Solves the continuity condition
///   psi_inc(0) + r psi_refl(0) = t psi_trans(0)
/// and forms R, T from current ratios of the unnormalized plane waves.
template <typename Scalar>
StepScatteringSolution<Scalar> solve_step_numeric(const StepProblem<Scalar>& problem,
                                                  Convention convention)
{
    using C = Complex<Scalar>;
    const Regime regime = classify_regime(problem);
    const Scalar e = problem.energy, m = problem.mass;
    const Scalar p = problem.incident_momentum();

    StepScatteringSolution<Scalar> sol;
    sol.convention = convention;
    sol.regime = regime;
    if (regime == Regime::klein)
        sol.kappa_value = convention == Convention::paper_kappa ? kappa(problem) : kappa_prime(problem);

    const bool threshold = regime == Regime::threshold_upper || regime == Regime::threshold_lower;
    if (threshold && m == Scalar(0)) {
        const Scalar nan = std::numeric_limits<Scalar>::quiet_NaN();
        sol.status = SolveStatus::threshold;
        sol.r = sol.t = C(nan, nan);
        sol.R = Scalar(1);
        sol.T = Scalar(0);
        sol.j_incident = current_density(make_spinor2(e, C(p), m));
        sol.j_reflected = -sol.j_incident;
        return sol;
    }

    const Spinor2<Scalar> incident = make_spinor2(e, C(p), m);
    const Spinor2<Scalar> reflected = make_spinor2(e, C(-p), m);
    const auto transmitted = detail::transmitted_wave(problem, regime, convention);

    Matrix2c<Scalar> system;
    system.col(0) = reflected;
    system.col(1) = -transmitted.spinor;
    const C det = system.determinant();
    if (std::abs(det) <= Scalar(1e-13) * reflected.norm() * transmitted.spinor.norm())
        throw singularity_error("solve_step_numeric: continuity system is singular");
    const Eigen::Matrix<C, 2, 1> amplitudes = system.partialPivLu().solve(-incident);
    sol.r = amplitudes(0);
    sol.t = amplitudes(1);

    const Scalar j_inc = current_density(incident);
    sol.j_incident = j_inc;
    sol.j_reflected = std::norm(sol.r) * current_density(reflected);
    sol.j_transmitted = std::norm(sol.t) * current_density(transmitted.spinor);
    sol.R = std::abs(sol.j_reflected / j_inc);
    sol.T = sol.j_transmitted / j_inc;

    if (threshold) {
        sol.status = SolveStatus::threshold;
        sol.R = Scalar(1);
        sol.T = Scalar(0);
    }
    return sol;
}

enum class BasisKind { u_plus, u_minus, v_plus, v_minus };

inline std::string_view to_string(BasisKind kind)
{
    switch (kind) {
    case BasisKind::u_plus: return "u+z";
    case BasisKind::u_minus: return "u-z";
    case BasisKind::v_plus: return "v+z";
    case BasisKind::v_minus: return "v-z";
    }
    return "unknown";
}

template <typename Scalar>
struct PlaneWave {
    Complex<Scalar> amplitude;
    Spinor2<Scalar> spinor;
    Complex<Scalar> wavevector;

    Spinor2<Scalar> value(Scalar z) const
    {
        return amplitude * std::exp(Complex<Scalar>(0, 1) * wavevector * z) * spinor;
    }
};

/// Piecewise plane-wave sum: `left` for z < 0, `right` for z >= 0.
template <typename Scalar>
struct PiecewiseState {
    BasisKind kind{};
    std::vector<PlaneWave<Scalar>> left;
    std::vector<PlaneWave<Scalar>> right;
    // overall sign applied to the printed region-II piece to make the state
    // continuous at z = 0
    int region2_sign{1};

    Spinor2<Scalar> evaluate(Scalar z) const
    {
        const auto& waves = z < Scalar(0) ? left : right;
        Spinor2<Scalar> sum = Spinor2<Scalar>::Zero();
        for (const auto& w : waves)
            sum += w.value(z);
        return sum;
    }

    Spinor2<Scalar> left_limit() const
    {
        Spinor2<Scalar> sum = Spinor2<Scalar>::Zero();
        for (const auto& w : left)
            sum += w.value(Scalar(0));
        return sum;
    }

    Spinor2<Scalar> right_limit() const { return evaluate(Scalar(0)); }
};

/// Scattering-basis states u(+-z) (particle) and v(+-z) (antiparticle) in the
/// Klein interval. Region-I waves use momentum p, region-II waves use q.
template <typename Scalar>
PiecewiseState<Scalar> scattering_basis_state(BasisKind kind, const StepProblem<Scalar>& problem)
{
    using C = Complex<Scalar>;
    if (classify_regime(problem) != Regime::klein)
        throw std::domain_error("scattering_basis_state: defined only in the Klein interval");

    const Scalar e = problem.energy, m = problem.mass, v0 = problem.height;
    const Scalar p = problem.incident_momentum();
    const Scalar q = local_wavevector(e, v0, m).wavevector;
    const Scalar eps = e - v0;
    const Scalar k = kappa(problem);
    const Scalar n1 = normalization_factor(Region::I, e, m);
    const Scalar n2 = normalization_factor(Region::II, e, m, v0);

    const Scalar transmitted = Scalar(2) * std::sqrt(k) / (k + Scalar(1));
    const auto s1 = [&](Scalar pz) { return Spinor2<Scalar>(C(pz), C(e - m)); };
    const auto s2 = [&](Scalar qz) { return Spinor2<Scalar>(C(qz), C(eps - m)); };

    PiecewiseState<Scalar> state;
    state.kind = kind;
    const Scalar sgn = (kind == BasisKind::u_plus || kind == BasisKind::v_plus) ? Scalar(1) : Scalar(-1);
    if (kind == BasisKind::u_plus || kind == BasisKind::u_minus) {
        const Scalar partner = (k - Scalar(1)) / (k + Scalar(1));
        state.left.push_back({C(n1 * transmitted), s1(sgn * p), C(sgn * p)});
        state.right.push_back({C(n2 * partner), s2(sgn * q), C(-sgn * q)});
        state.right.push_back({C(n2), s2(-sgn * q), C(sgn * q)});
    } else {
        const Scalar partner = (Scalar(1) - k) / (k + Scalar(1));
        state.left.push_back({C(n1 * partner), s1(-sgn * p), C(-sgn * p)});
        state.left.push_back({C(n1), s1(sgn * p), C(sgn * p)});
        state.right.push_back({C(n2 * transmitted), s2(-sgn * q), C(sgn * q)});
    }

    // Fix the relative sign of the two pieces from the z = 0 overlap.
    const Spinor2<Scalar> a = state.left_limit();
    const Spinor2<Scalar> b = state.right_limit();
    const int sign = std::real(b.dot(a)) >= Scalar(0) ? 1 : -1;
    if ((a - Scalar(sign) * b).norm() > Scalar(1e-12) * std::max(a.norm(), Scalar(1)))
        throw std::logic_error("scattering_basis_state: pieces cannot be matched at z = 0");
    state.region2_sign = sign;
    for (auto& w : state.right)
        w.amplitude *= Scalar(sign);
    return state;
}

/// +-(2 kappa / pi) / (kappa + 1)^2
template <typename Scalar>
Scalar mode_current_closed_form(BasisKind kind, Scalar k)
{
    const Scalar mag = (Scalar(2) * k / std::numbers::pi_v<Scalar>) / ((k + Scalar(1)) * (k + Scalar(1)));
    return (kind == BasisKind::u_plus || kind == BasisKind::v_plus) ? mag : -mag;
}

template <typename Scalar>
struct ModeCurrent {
    Scalar value{};
    Scalar spread{}; // max - min over the sample points
};

/// Current of a scattering-basis state sampled at three points on each side
/// of the step.
template <typename Scalar>
ModeCurrent<Scalar> mode_current(BasisKind kind, const StepProblem<Scalar>& problem)
{
    const auto state = scattering_basis_state(kind, problem);
    const Scalar p = problem.incident_momentum();
    const Scalar q = local_wavevector(problem.energy, problem.height, problem.mass).wavevector;
    const Scalar scale_left = Scalar(1) / p;
    const Scalar scale_right = Scalar(1) / q;
    constexpr std::array<double, 3> offsets{0.37, 1.3, 4.1};

    Scalar lo = std::numeric_limits<Scalar>::infinity();
    Scalar hi = -lo;
    Scalar sum{};
    int n = 0;
    for (double off : offsets) {
        for (Scalar z : {-Scalar(off) * scale_left, Scalar(off) * scale_right}) {
            const Scalar j = current_density(state.evaluate(z));
            lo = std::min(lo, j);
            hi = std::max(hi, j);
            sum += j;
            ++n;
        }
    }
    return {sum / Scalar(n), hi - lo};
}

/// Group velocity of the negative-energy wave in region II, q / (V0 - E).
template <typename Scalar>
Scalar group_velocity_region2(const StepProblem<Scalar>& problem)
{
    if (classify_regime(problem) != Regime::klein)
        throw std::domain_error("group_velocity_region2: defined only in the Klein interval");
    const Scalar q = local_wavevector(problem.energy, problem.height, problem.mass).wavevector;
    return q / (problem.height - problem.energy);
}

} // namespace klein

#pragma once

// Gated graphene test device: ohmic sheet I-V families versus back-gate
// voltage and the angular dependence of the current through the gate-induced
// potential step.

#include <span>
#include <string_view>
#include <vector>

#include "klein/graphene_junction.hpp"

namespace klein {

/// Device parameters in laboratory units (cm, V, s, C).
struct DeviceParams {
    double mobility = 15000.0;          // cm^2 V^-1 s^-1
    double gate_coefficient = 7.3e10;   // cm^-2 V^-1, n = alpha * V_b
    double back_gate = 0.0;             // V
    double aspect_ratio = 1.0;          // W / L
    double elementary_charge = 1.602176634e-19; // C

    void validate() const;
};

enum class CarrierType { none, electron, hole };

std::string_view to_string(CarrierType carriers);

struct SheetConductivity {
    double siemens{};          // per square
    double density{};          // cm^-2
    CarrierType carriers{CarrierType::none};
};

struct IVPoint {
    double bias{};    // V
    double current{}; // A
};

struct AngularProfilePoint {
    double theta{};              // rad
    double transmission{};       // T(theta)
    double relative_current{};   // I(theta) / I(0)
};

/// Drude sheet conductivity sigma = |alpha V_b| e mu. Positive V_b gives
/// electrons, negative V_b holes.
SheetConductivity sheet_conductivity(const DeviceParams& params);

/// Ohmic low-bias characteristic I = sigma (W/L) V at normal incidence.
std::vector<IVPoint> iv_curve(const DeviceParams& params, std::span<const double> bias_grid);

/// I(theta)/I0 through a step of height V0 for carriers of energy E (eV),
/// using the exp(-i k_x x) region-II wave.
std::vector<AngularProfilePoint> angular_current_profile(double energy, double height,
                                                         std::span<const double> theta_grid,
                                                         const GrapheneMaterial<double>& material = {});

std::vector<AngularProfilePoint> angular_current_profile_from_wavelength(
    double fermi_wavelength, double height, std::span<const double> theta_grid,
    const GrapheneMaterial<double>& material = {});

} // namespace klein

#include "klein/device_sim.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace klein {

void DeviceParams::validate() const
{
    if (!(mobility > 0.0))
        throw std::invalid_argument("DeviceParams: mobility must be positive");
    if (!(gate_coefficient > 0.0))
        throw std::invalid_argument("DeviceParams: gate coefficient must be positive");
    if (!(aspect_ratio > 0.0))
        throw std::invalid_argument("DeviceParams: aspect ratio must be positive");
    if (!(elementary_charge > 0.0))
        throw std::invalid_argument("DeviceParams: elementary charge must be positive");
    if (!std::isfinite(back_gate))
        throw std::invalid_argument("DeviceParams: back-gate voltage must be finite");
}

std::string_view to_string(CarrierType carriers)
{
    switch (carriers) {
    case CarrierType::electron: return "electron";
    case CarrierType::hole: return "hole";
    case CarrierType::none: break;
    }
    return "none";
}

SheetConductivity sheet_conductivity(const DeviceParams& params)
{
    params.validate();
    SheetConductivity out;
    out.density = std::abs(params.gate_coefficient * params.back_gate);
    out.siemens = out.density * params.elementary_charge * params.mobility;
    if (params.back_gate > 0.0)
        out.carriers = CarrierType::electron;
    else if (params.back_gate < 0.0)
        out.carriers = CarrierType::hole;
    return out;
}

std::vector<IVPoint> iv_curve(const DeviceParams& params, std::span<const double> bias_grid)
{
    const double conductance = sheet_conductivity(params).siemens * params.aspect_ratio;
    std::vector<IVPoint> out;
    out.reserve(bias_grid.size());
    for (double v : bias_grid)
        out.push_back({v, conductance * v});
    return out;
}

std::vector<AngularProfilePoint> angular_current_profile(double energy, double height,
                                                         std::span<const double> theta_grid,
                                                         const GrapheneMaterial<double>& material)
{
    const auto normal = angle_kinematics(energy, height, 0.0, material);
    const double t0 = transmission_probability(t_paper(normal), normal);

    std::vector<AngularProfilePoint> out;
    out.reserve(theta_grid.size());
    for (double theta : theta_grid) {
        const auto ak = angle_kinematics(energy, height, theta, material);
        if (!ak.propagating)
            throw std::domain_error("angular_current_profile: theta = " + std::to_string(theta) +
                                    " rad is beyond the critical angle");
        const double t = transmission_probability(t_paper(ak), ak);
        out.push_back({theta, t, t / t0});
    }
    return out;
}

std::vector<AngularProfilePoint> angular_current_profile_from_wavelength(
    double fermi_wavelength, double height, std::span<const double> theta_grid,
    const GrapheneMaterial<double>& material)
{
    return angular_current_profile(energy_from_wavelength(fermi_wavelength, material), height,
                                   theta_grid, material);
}

} // namespace klein

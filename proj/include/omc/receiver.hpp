#ifndef OMC_RECEIVER_HPP
#define OMC_RECEIVER_HPP

/**
 * @file receiver.hpp
 * @brief MOX gas sensor receiver: static power-law sensitivity, voltage
 *        divider readout, first-order adsorption/desorption kinetics and
 *        signal-proportional Gaussian noise.
 */

#include <cstdint>

#include "omc/trace.hpp"

namespace omc {

/// MOX sensor and conditioning-circuit parameters.
struct ReceiverParams {
    double reference_resistance = 0.0;   // R0 [Ohm]
    double sensitivity_slope = 0.0;      // m (dimensionless), < 0
    double sensitivity_intercept = 0.0;  // b (dimensionless)
    double circuit_voltage = 0.0;        // V_c [V]
    double load_resistance = 0.0;        // R_L [Ohm]
    double tau_rise = 0.0;               // [s]
    double tau_decay = 0.0;              // [s]
    double noise_kappa = 0.0;            // kappa (dimensionless), >= 0
    double clean_air_ratio = 0.0;        // Gamma = R_air / R0 (dimensionless)
    double molar_mass = 0.0;             // [g/mol], converts mol/m^3 -> mg/L
    double concentration_floor = 1e-6;   // [mg/L], guards the c -> 0 power law
};

/// Sensing-layer resistance R0 * 10^b * c^m, floored at concentration_floor
/// and capped above at the clean-air resistance Gamma * R0.
double static_resistance(const ReceiverParams& params, double c_mg_per_l);

/// Voltage-divider output V_c * R_L / (R_L + R_static(c)); rises with c.
double static_voltage(const ReceiverParams& params, double c_mg_per_l);

/// Divider output in clean air (c = 0); the usual initial condition.
double baseline_voltage(const ReceiverParams& params);

/**
 * @brief First-order sensor kinetics driven by a concentration trace.
 *
 * dV/dt = (V_static(c(t)) - V) / tau with tau = tau_rise while the target is
 * above V and tau_decay otherwise. Each step applies the exact exponential
 * update for a zero-order-held input:
 *   V_{k+1} = V_s,k + (V_k - V_s,k) * exp(-dt / tau_k)
 * which is unconditionally stable and exact for piecewise-constant input.
 * The time constant is selected from the comparison at the step start.
 *
 * @param v0  Initial voltage [V], within [0, V_c]
 */
VoltageTrace integrate_kinetics(const ReceiverParams& params, const ConcentrationTrace& c,
                                double v0);

struct NoisyTrace {
    VoltageTrace trace;
    std::uint64_t clipped = 0;  // samples pushed back into [0, V_c]
};

/// Adds an independent N(0, (kappa*V)^2) draw to every sample and clips to
/// [0, V_c]. Deterministic for a fixed seed; kappa = 0 returns the input
/// unchanged.
NoisyTrace add_noise(const ReceiverParams& params, const VoltageTrace& v, std::uint64_t seed);

/// Intercept that makes the power law hit a datasheet anchor point:
/// b = log10(anchor_ratio) - m * log10(anchor_concentration).
double calibrate_intercept(double anchor_concentration_mg_per_l, double anchor_ratio,
                           double slope);

/// R0 recovered from the measured clean-air resistance: R0 = R_air / Gamma.
double reference_resistance(double clean_air_resistance, double gamma);

/// Unit bridge: 1 mol/m^3 of a species with molar mass M g/mol is M mg/L.
double mol_per_m3_to_mg_per_l(double c_mol_per_m3, double molar_mass);

/// Converts a whole concentration trace from mol/m^3 to mg/L.
ConcentrationTrace to_mg_per_l(const ConcentrationTrace& mol_per_m3, double molar_mass);

/// Throws std::invalid_argument naming the offending field on violation.
void validate(const ReceiverParams& params);

}  // namespace omc

#endif  // OMC_RECEIVER_HPP

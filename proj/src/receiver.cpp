#include "omc/receiver.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace omc {

double static_resistance(const ReceiverParams& params, double c_mg_per_l) {
    // Clamping handles degenerate inputs: the floor keeps the power law off
    // its c = 0 singularity, the cap keeps clean air at a finite resistance.
    const double c = std::max(c_mg_per_l, params.concentration_floor);
    const double rs = params.reference_resistance * std::pow(10.0, params.sensitivity_intercept) *
                      std::pow(c, params.sensitivity_slope);
    return std::min(rs, params.clean_air_ratio * params.reference_resistance);
}

double static_voltage(const ReceiverParams& params, double c_mg_per_l) {
    const double rs = static_resistance(params, c_mg_per_l);
    return params.circuit_voltage * params.load_resistance / (params.load_resistance + rs);
}

double baseline_voltage(const ReceiverParams& params) {
    return static_voltage(params, 0.0);
}

VoltageTrace integrate_kinetics(const ReceiverParams& params, const ConcentrationTrace& c,
                                double v0) {
    if (!(c.dt > 0.0)) {
        throw std::domain_error("integrate_kinetics: dt must be > 0");
    }
    if (v0 < 0.0 || v0 > params.circuit_voltage) {
        throw std::domain_error("integrate_kinetics: v0 outside [0, V_c]");
    }

    VoltageTrace out;
    out.t0 = c.t0;
    out.dt = c.dt;
    out.samples.resize(c.size());
    if (c.samples.empty()) {
        return out;
    }

    const double decay_rise = std::exp(-c.dt / params.tau_rise);
    const double decay_fall = std::exp(-c.dt / params.tau_decay);

    double v = v0;
    out.samples[0] = v;
    for (std::size_t k = 0; k + 1 < c.size(); ++k) {
        const double vs = static_voltage(params, c.samples[k]);
        const double decay = (vs > v) ? decay_rise : decay_fall;
        v = vs + (v - vs) * decay;
        out.samples[k + 1] = v;
    }
    return out;
}

NoisyTrace add_noise(const ReceiverParams& params, const VoltageTrace& v, std::uint64_t seed) {
    if (params.noise_kappa < 0.0) {
        throw std::invalid_argument("add_noise: kappa must be >= 0");
    }
    NoisyTrace out;
    out.trace = v;
    if (params.noise_kappa == 0.0) {
        return out;  // identity, bit for bit
    }

    std::mt19937_64 engine(seed);
    std::normal_distribution<double> unit(0.0, 1.0);
    for (double& s : out.trace.samples) {
        s += params.noise_kappa * s * unit(engine);
        if (s < 0.0) {
            s = 0.0;
            ++out.clipped;
        } else if (s > params.circuit_voltage) {
            s = params.circuit_voltage;
            ++out.clipped;
        }
    }
    return out;
}

double calibrate_intercept(double anchor_concentration_mg_per_l, double anchor_ratio,
                           double slope) {
    if (!(anchor_concentration_mg_per_l > 0.0) || !(anchor_ratio > 0.0)) {
        throw std::domain_error("calibrate_intercept: anchors must be > 0");
    }
    return std::log10(anchor_ratio) - slope * std::log10(anchor_concentration_mg_per_l);
}

double reference_resistance(double clean_air_resistance, double gamma) {
    if (!(clean_air_resistance > 0.0) || !(gamma > 0.0)) {
        throw std::domain_error("reference_resistance: inputs must be > 0");
    }
    return clean_air_resistance / gamma;
}

double mol_per_m3_to_mg_per_l(double c_mol_per_m3, double molar_mass) {
    if (c_mol_per_m3 < 0.0 || molar_mass < 0.0) {
        throw std::domain_error("mol_per_m3_to_mg_per_l: inputs must be >= 0");
    }
    // 1 mol/m^3 * M g/mol = M g/m^3 = M mg/L
    return c_mol_per_m3 * molar_mass;
}

ConcentrationTrace to_mg_per_l(const ConcentrationTrace& mol_per_m3, double molar_mass) {
    ConcentrationTrace out = mol_per_m3;
    for (double& s : out.samples) {
        s = mol_per_m3_to_mg_per_l(s, molar_mass);
    }
    return out;
}

void validate(const ReceiverParams& p) {
    if (!(p.reference_resistance > 0.0)) {
        throw std::invalid_argument("receiver.reference_resistance_ohm: must be > 0");
    }
    if (!(p.sensitivity_slope < 0.0)) {
        throw std::invalid_argument("receiver.sensitivity_slope: must be < 0");
    }
    if (!(p.circuit_voltage > 0.0)) {
        throw std::invalid_argument("receiver.circuit_voltage_v: must be > 0");
    }
    if (!(p.load_resistance > 0.0)) {
        throw std::invalid_argument("receiver.load_resistance_ohm: must be > 0");
    }
    if (!(p.tau_rise > 0.0)) {
        throw std::invalid_argument("receiver.tau_rise_s: must be > 0");
    }
    if (!(p.tau_decay > 0.0)) {
        throw std::invalid_argument("receiver.tau_decay_s: must be > 0");
    }
    if (!(p.noise_kappa >= 0.0)) {
        throw std::invalid_argument("receiver.noise_kappa: must be >= 0");
    }
    if (!(p.clean_air_ratio > 0.0)) {
        throw std::invalid_argument("receiver.clean_air_ratio: must be > 0");
    }
    if (!(p.molar_mass > 0.0)) {
        throw std::invalid_argument("receiver.molar_mass_g_per_mol: must be > 0");
    }
    if (!(p.concentration_floor > 0.0)) {
        throw std::invalid_argument("receiver.concentration_floor_mg_per_l: must be > 0");
    }
}

}  // namespace omc

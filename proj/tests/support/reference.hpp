#ifndef OMC_TESTS_REFERENCE_HPP
#define OMC_TESTS_REFERENCE_HPP

// Closed-form reference models written independently of the library code.

#include <cmath>

#include "omc/channel.hpp"

namespace omc_test {

inline constexpr double kPi = 3.14159265358979323846;

/// Free-space Gaussian puff (no ground image) with the same travel-parameter
/// spreading convention as the library.
inline double free_space_puff(const omc::ChannelParams& ch, const omc::SpacePoint& p, double t) {
    const double r = ch.diffusivity * p.x / ch.flow_speed;
    const double dx = p.x - ch.flow_speed * t;
    return ch.released_mol / (8.0 * std::pow(kPi * r, 1.5)) *
           std::exp(-(dx * dx + p.y * p.y + p.z * p.z) / (4.0 * r));
}

/// Exact Green's function of the advection-diffusion equation (spreading
/// grows with time, sigma^2 = 2Kt) with a reflecting ground plane at z = -h.
/// This is what the random-walk particles actually sample.
inline double green_function(const omc::ChannelParams& ch, const omc::SpacePoint& p, double t) {
    const double kt = ch.diffusivity * t;
    const double dx = p.x - ch.flow_speed * t;
    const double zi = p.z + 2.0 * ch.source_height;
    return ch.released_mol / std::pow(4.0 * kPi * kt, 1.5) *
           std::exp(-(dx * dx + p.y * p.y) / (4.0 * kt)) *
           (std::exp(-p.z * p.z / (4.0 * kt)) + std::exp(-zi * zi / (4.0 * kt)));
}

/// Brute-force cosine series for the transverse duct profile with a fixed
/// large term count; used as an independent route against the library's
/// tolerance-truncated evaluation.
inline double brute_force_profile(double r, double y, double l, int terms = 400) {
    double sum = 1.0 / (2.0 * l);
    for (int n = 1; n <= terms; ++n) {
        const double k = n * kPi / l;
        sum += std::exp(-k * k * r) * std::cos(n * kPi * y / l) / l;
    }
    return sum;
}

/// Mass of the puff over the half-space z >= -h by nested adaptive Simpson.
inline double puff_mass(const omc::ChannelParams& ch, double t) {
    // The bump is centered at x = u t with spread sqrt(2 r(x)); walk the upper
    // bound out until 10 standard deviations fit.
    double x_max = ch.flow_speed * t + 1.0;
    for (int i = 0; i < 20; ++i) {
        x_max = ch.flow_speed * t +
                10.0 * std::sqrt(2.0 * ch.diffusivity * x_max / ch.flow_speed);
    }
    const double sigma = std::sqrt(2.0 * ch.diffusivity * x_max / ch.flow_speed);
    const double y_max = 10.0 * sigma;
    const double z_max = 10.0 * sigma + 2.0 * ch.source_height;

    const auto f_x = [&](double x) {
        const auto f_y = [&](double y) {
            const auto f_z = [&](double z) {
                return omc::unbounded_impulse(ch, omc::SpacePoint{x, y, z}, t);
            };
            return adaptive_simpson(f_z, -ch.source_height, z_max, 3e-8, 1e-14);
        };
        // y-symmetry of the integrand halves the work.
        return 2.0 * adaptive_simpson(f_y, 0.0, y_max, 3e-8, 1e-13);
    };
    return adaptive_simpson(f_x, 1e-9, x_max, 1e-7, 1e-12);
}

}  // namespace omc_test

#endif  // OMC_TESTS_REFERENCE_HPP

#ifndef OMC_CHANNEL_HPP
#define OMC_CHANNEL_HPP

/**
 * @file channel.hpp
 * @brief Closed-form concentration fields for odor transport in uniform flow.
 *
 * Two geometries are covered:
 *  - Unbounded: infinite medium with a perfectly reflecting ground plane at
 *    z = -h, instantaneous point release at the origin, constant wind u along
 *    +x. The response is a Gaussian puff with a mirror image below the ground.
 *  - BoundedSquare: a duct of square cross-section (|y|,|z| <= l) with
 *    reflecting walls. Longitudinal diffusion is neglected (advection
 *    dominated), so the impulse response is an advected Dirac sheet scaled by
 *    transverse Neumann-series profiles.
 *
 * All spreading is expressed through the travel parameter r(x) = K*x/u [m^2],
 * the accumulated transverse diffusion "time" of a parcel advected to x.
 */

#include <cstdint>
#include <span>
#include <vector>

#include "omc/quadrature.hpp"

namespace omc {

enum class Geometry { Unbounded, BoundedSquare };

/// Physical description of the propagation channel.
struct ChannelParams {
    double released_mol = 0.0;   // M, amount released per pulse [mol]
    double diffusivity = 0.0;    // K, effective (turbulent) diffusivity [m^2/s]
    double flow_speed = 0.0;     // u, wind speed along +x [m/s]
    double source_height = 0.0;  // h, source height above ground [m] (Unbounded)
    double half_width = 0.0;     // l, duct half-width [m] (BoundedSquare)
    Geometry geometry = Geometry::Unbounded;
};

/// Evaluation point. x is downwind distance from the source (must be > 0 for
/// field evaluations); y, z are transverse offsets from the duct/plume axis.
struct SpacePoint {
    double x = 0.0;  // [m]
    double y = 0.0;  // [m]
    double z = 0.0;  // [m]
};

/// Accumulated transverse diffusion measure r = (1/u) * Int_0^x K(s) ds [m^2].
struct TravelParameter {
    double r = 0.0;  // [m^2], >= 0
};

/// Finite release window of duration T_p starting at the pulse origin.
struct PulseShape {
    double duration = 0.0;  // T_p [s], > 0
};

/// One segment of a piecewise-constant diffusivity profile K(x): the given
/// diffusivity applies up to x_end (segments are listed in ascending x_end).
struct DiffusivitySegment {
    double x_end = 0.0;        // [m]
    double diffusivity = 0.0;  // [m^2/s]
};

/// Advected-Dirac impulse response of the bounded duct: the concentration is
/// amplitude * delta(t - arrival_time). The Dirac factor is kept symbolic;
/// only finite-pulse responses are sampled in time.
struct BoundedImpulse {
    double arrival_time = 0.0;  // t_a = x/u [s]
    double amplitude = 0.0;     // (M/u) * a(r,y) * b(r,z) [mol*s/m^3]
};

/**
 * @brief Travel parameter for constant diffusivity, r = K*x/u.
 *
 * @param params  Channel description (K and u are used)
 * @param x       Downwind distance [m], >= 0
 * @return r [m^2]
 */
double travel_parameter(const ChannelParams& params, double x);

/**
 * @brief Travel parameter for a piecewise-constant diffusivity profile.
 *
 * Integrates K(s) segment by segment up to x and divides by u. The final
 * segment extends beyond its x_end if x lies past the profile.
 *
 * @param profile     Segments in ascending x_end order, all diffusivities > 0
 * @param flow_speed  u [m/s], > 0
 * @param x           Downwind distance [m], >= 0
 */
double travel_parameter(std::span<const DiffusivitySegment> profile, double flow_speed,
                        double x);

/**
 * @brief Unbounded puff concentration with a reflecting ground plane.
 *
 * C(x,y,z,t) = M / (8 (pi r)^{3/2})
 *              * exp(-((x - u t)^2 + y^2) / (4 r))
 *              * [exp(-z^2 / (4 r)) + exp(-(z + 2h)^2 / (4 r))]
 *
 * with r = r(x). The image term enforces zero flux through z = -h, so the
 * total mass over the half-space z >= -h is conserved. t <= 0 returns 0
 * (causality). Evaluation requires x > 0; the r -> 0 limit is singular and is
 * refused rather than approximated.
 *
 * @return concentration [mol/m^3], nonnegative and finite
 */
double unbounded_impulse(const ChannelParams& params, const SpacePoint& p, double t);

/**
 * @brief Transverse profile a(r,y) of the bounded duct (and b(r,z) by symmetry).
 *
 * Cosine series form:
 *   a(r,y) = 1/(2l) + (1/l) * Sum_{n>=1} exp(-(n pi / l)^2 r) cos(n pi y / l)
 *
 * For small r the series converges slowly and the evaluation switches to the
 * equivalent method-of-images sum over mirror sources at y = 2 m l:
 *   a(r,y) = (4 pi r)^{-1/2} * Sum_m exp(-(y - 2 m l)^2 / (4 r))
 *
 * The crossover is at r* = (l/pi)^2 * 1e-2 (see transverse_crossover). The
 * profile is a probability density in y: Int_{-l}^{l} a(r,y) dy = 1.
 *
 * @param r  Travel parameter [m^2], > 0 (r = 0 is a Dirac and is refused)
 * @param y  Transverse offset [m], |y| <= l
 * @param l  Duct half-width [m], > 0
 * @return a(r,y) [1/m], >= 0
 */
double transverse_profile(double r, double y, double l);

/// Cosine-series evaluation of a(r,y); accurate for r >= transverse_crossover(l).
double transverse_profile_series(double r, double y, double l);

/// Method-of-images evaluation of a(r,y); accurate for small r.
double transverse_profile_images(double r, double y, double l);

/// Switch point between series and image-sum forms: r* = (l/pi)^2 * 1e-2.
double transverse_crossover(double l);

/**
 * @brief Bounded-duct impulse response as (arrival time, Dirac amplitude).
 *
 * The neglected longitudinal diffusion makes the arrival purely advective:
 * t_a = x/u. The amplitude is (M/u) * a(r,y) * b(r,z) with r = r(x).
 */
BoundedImpulse bounded_impulse(const ChannelParams& params, const SpacePoint& p);

/**
 * @brief Finite-pulse response of the unbounded channel.
 *
 * C_Tp(t) = (1/T_p) * Int_0^{min(t, T_p)} C(t - tau) dtau, evaluated with
 * adaptive interval-halving trapezoid quadrature. Converges to the impulse
 * response as T_p -> 0.
 *
 * @throws NumericalError if the quadrature cannot reach its tolerance
 */
double pulse_response_unbounded(const ChannelParams& params, const SpacePoint& p,
                                const PulseShape& pulse, double t,
                                const QuadratureOptions& opts = {});

/**
 * @brief Finite-pulse response of the bounded duct.
 *
 * The Dirac in the impulse response collapses the convolution to a rectangular
 * window: M/(u T_p) * a(r,y) * b(r,z) for t in [t_a, t_a + T_p], else 0.
 */
double pulse_response_bounded(const ChannelParams& params, const SpacePoint& p,
                              const PulseShape& pulse, double t);

/// Count of series/quadrature results that were clamped from a tiny negative
/// value (magnitude < 1e-12) to zero. Larger negatives throw NumericalError.
std::uint64_t clamped_negative_count();
void reset_clamped_negative_count();

/// Throws std::invalid_argument naming the offending field if the parameter
/// set violates an invariant for its geometry.
void validate(const ChannelParams& params);

}  // namespace omc

#endif  // OMC_CHANNEL_HPP

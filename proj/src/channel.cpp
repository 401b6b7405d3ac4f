#include "omc/channel.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "omc/errors.hpp"

namespace omc {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Series/image terms below 1e-14 of the uniform level 1/l are dropped.
constexpr double kTermTolOverL = 1e-14;
constexpr std::size_t kMaxSeriesTerms = 100000;

// Tolerated truncation undershoot; anything more negative is a genuine error.
constexpr double kNegativeTol = 1e-12;

std::atomic<std::uint64_t> g_clamped_negatives{0};

double clamp_nonnegative(double v, const char* what) {
    if (v >= 0.0) {
        return v;
    }
    if (v < -kNegativeTol) {
        std::ostringstream msg;
        msg << what << ": value " << v << " below the -1e-12 truncation tolerance";
        throw NumericalError(msg.str());
    }
    g_clamped_negatives.fetch_add(1, std::memory_order_relaxed);
    return 0.0;
}

void require_geometry(const ChannelParams& params, Geometry expected, const char* op) {
    if (params.geometry != expected) {
        throw std::invalid_argument(std::string(op) + ": wrong geometry for this operation");
    }
}

}  // namespace

double travel_parameter(const ChannelParams& params, double x) {
    if (x < 0.0) {
        throw std::domain_error("travel_parameter: x must be >= 0");
    }
    return params.diffusivity * x / params.flow_speed;
}

double travel_parameter(std::span<const DiffusivitySegment> profile, double flow_speed,
                        double x) {
    if (x < 0.0) {
        throw std::domain_error("travel_parameter: x must be >= 0");
    }
    if (profile.empty()) {
        throw std::invalid_argument("travel_parameter: empty diffusivity profile");
    }
    if (flow_speed <= 0.0) {
        throw std::invalid_argument("travel_parameter: flow speed must be > 0");
    }

    double integral = 0.0;
    double x_prev = 0.0;
    for (std::size_t i = 0; i < profile.size(); ++i) {
        const auto& seg = profile[i];
        if (seg.diffusivity <= 0.0) {
            throw std::invalid_argument("travel_parameter: diffusivity must be > 0");
        }
        if (seg.x_end <= x_prev) {
            throw std::invalid_argument("travel_parameter: segment ends must be ascending");
        }
        const bool last = (i + 1 == profile.size());
        const double x_hi = last ? std::max(seg.x_end, x) : seg.x_end;  // last segment extends
        if (x <= x_hi) {
            integral += seg.diffusivity * (x - x_prev);
            return integral / flow_speed;
        }
        integral += seg.diffusivity * (x_hi - x_prev);
        x_prev = x_hi;
    }
    return integral / flow_speed;
}

double unbounded_impulse(const ChannelParams& params, const SpacePoint& p, double t) {
    require_geometry(params, Geometry::Unbounded, "unbounded_impulse");
    if (t <= 0.0) {
        return 0.0;  // nothing released yet
    }
    const double r = travel_parameter(params, p.x);
    if (r <= 0.0) {
        throw std::domain_error("unbounded_impulse: singular at r = 0 (x must be > 0)");
    }

    const double inv4r = 1.0 / (4.0 * r);
    const double dx = p.x - params.flow_speed * t;
    const double moving = std::exp(-(dx * dx + p.y * p.y) * inv4r);
    const double z_img = p.z + 2.0 * params.source_height;
    const double vertical = std::exp(-p.z * p.z * inv4r) + std::exp(-z_img * z_img * inv4r);
    const double prefactor = params.released_mol / (8.0 * std::pow(kPi * r, 1.5));
    return clamp_nonnegative(prefactor * moving * vertical, "unbounded_impulse");
}

double transverse_crossover(double l) {
    return (l / kPi) * (l / kPi) * 1e-2;
}

double transverse_profile_series(double r, double y, double l) {
    const double inv_l = 1.0 / l;
    const double base = kPi * kPi * inv_l * inv_l * r;  // (n pi / l)^2 r at n = 1
    double sum = 0.5 * inv_l;
    for (std::size_t n = 1; n <= kMaxSeriesTerms; ++n) {
        const double damp = std::exp(-base * static_cast<double>(n) * static_cast<double>(n));
        if (damp < kTermTolOverL) {
            return clamp_nonnegative(sum, "transverse_profile_series");
        }
        sum += inv_l * damp * std::cos(static_cast<double>(n) * kPi * y * inv_l);
    }
    throw NumericalError("transverse_profile_series: term cap reached; use the image form");
}

double transverse_profile_images(double r, double y, double l) {
    const double inv_norm = 1.0 / std::sqrt(4.0 * kPi * r);
    const double inv4r = 1.0 / (4.0 * r);
    const double tol = kTermTolOverL / l / inv_norm;  // contribution threshold pre-prefactor

    // Mirror sources sit at every y_m = 2 m l; walk outward from the center
    // image in both directions until the next omitted image is negligible.
    double sum = std::exp(-y * y * inv4r);
    for (int dir : {+1, -1}) {
        for (std::size_t m = 1; m <= kMaxSeriesTerms; ++m) {
            const double d = y - 2.0 * static_cast<double>(dir * static_cast<int>(m)) * l;
            const double term = std::exp(-d * d * inv4r);
            if (term < tol) {
                break;
            }
            sum += term;
        }
    }
    return inv_norm * sum;
}

double transverse_profile(double r, double y, double l) {
    if (l <= 0.0) {
        throw std::invalid_argument("transverse_profile: half-width must be > 0");
    }
    if (std::abs(y) > l * (1.0 + 1e-12)) {
        throw std::domain_error("transverse_profile: |y| must be <= l");
    }
    if (r < 0.0) {
        throw std::domain_error("transverse_profile: r must be >= 0");
    }
    if (r == 0.0) {
        throw std::domain_error("transverse_profile: r = 0 is a Dirac profile; refusing");
    }
    return r < transverse_crossover(l) ? transverse_profile_images(r, y, l)
                                       : transverse_profile_series(r, y, l);
}

BoundedImpulse bounded_impulse(const ChannelParams& params, const SpacePoint& p) {
    require_geometry(params, Geometry::BoundedSquare, "bounded_impulse");
    if (p.x <= 0.0) {
        throw std::domain_error("bounded_impulse: x must be > 0");
    }
    const double l = params.half_width;
    if (std::abs(p.y) > l * (1.0 + 1e-12) || std::abs(p.z) > l * (1.0 + 1e-12)) {
        throw std::domain_error("bounded_impulse: evaluation point outside the duct");
    }
    const double r = travel_parameter(params, p.x);
    BoundedImpulse out;
    out.arrival_time = p.x / params.flow_speed;
    out.amplitude = params.released_mol / params.flow_speed * transverse_profile(r, p.y, l) *
                    transverse_profile(r, p.z, l);
    return out;
}

double pulse_response_unbounded(const ChannelParams& params, const SpacePoint& p,
                                const PulseShape& pulse, double t,
                                const QuadratureOptions& opts) {
    if (pulse.duration <= 0.0) {
        throw std::invalid_argument("pulse_response_unbounded: pulse duration must be > 0");
    }
    if (t < 0.0) {
        throw std::domain_error("pulse_response_unbounded: t must be >= 0");
    }
    const double upper = std::min(t, pulse.duration);
    if (upper <= 0.0) {
        return 0.0;
    }
    const double integral = integrate_adaptive(
        [&](double tau) { return unbounded_impulse(params, p, t - tau); }, 0.0, upper, opts);
    return clamp_nonnegative(integral / pulse.duration, "pulse_response_unbounded");
}

double pulse_response_bounded(const ChannelParams& params, const SpacePoint& p,
                              const PulseShape& pulse, double t) {
    if (pulse.duration <= 0.0) {
        throw std::invalid_argument("pulse_response_bounded: pulse duration must be > 0");
    }
    const BoundedImpulse imp = bounded_impulse(params, p);
    // Closed window [t_a, t_a + T_p] with a rounding-level edge allowance so
    // grid samples landing exactly on the arrival time are included.
    const double edge = 1e-12 * (imp.arrival_time + pulse.duration + 1.0);
    if (t < imp.arrival_time - edge || t > imp.arrival_time + pulse.duration + edge) {
        return 0.0;
    }
    return imp.amplitude / pulse.duration;
}

std::uint64_t clamped_negative_count() {
    return g_clamped_negatives.load(std::memory_order_relaxed);
}

void reset_clamped_negative_count() {
    g_clamped_negatives.store(0, std::memory_order_relaxed);
}

void validate(const ChannelParams& params) {
    if (!(params.released_mol > 0.0)) {
        throw std::invalid_argument("channel.released_amount_mol: must be > 0");
    }
    if (!(params.diffusivity > 0.0)) {
        throw std::invalid_argument("channel.diffusivity_m2_per_s: must be > 0");
    }
    if (!(params.flow_speed > 0.0)) {
        throw std::invalid_argument("channel.flow_speed_m_per_s: must be > 0");
    }
    if (params.geometry == Geometry::Unbounded) {
        if (!(params.source_height >= 0.0)) {
            throw std::invalid_argument("channel.source_height_m: must be >= 0");
        }
    } else {
        if (!(params.half_width > 0.0)) {
            throw std::invalid_argument("channel.half_width_m: must be > 0");
        }
    }
}

}  // namespace omc

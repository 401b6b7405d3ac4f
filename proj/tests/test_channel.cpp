#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"

#include "omc/channel.hpp"
#include "omc/errors.hpp"
#include "support/quadrature_ref.hpp"
#include "support/reference.hpp"

using namespace omc;
using omc_test::adaptive_simpson;
using omc_test::brute_force_profile;
using omc_test::free_space_puff;

namespace {

ChannelParams table1_unbounded() {
    ChannelParams ch;
    ch.released_mol = 0.32;
    ch.diffusivity = 0.05;
    ch.flow_speed = 5.0;
    ch.source_height = 0.125;
    ch.geometry = Geometry::Unbounded;
    return ch;
}

ChannelParams table1_bounded() {
    ChannelParams ch = table1_unbounded();
    ch.geometry = Geometry::BoundedSquare;
    ch.half_width = 0.125;
    return ch;
}

const SpacePoint kReceiver{1.10, 0.0, 0.0};


}  // namespace

TEST_SUITE_BEGIN("channel");

TEST_CASE("travel parameter is K x / u for constant diffusivity") {
    const ChannelParams ch = table1_unbounded();
    CHECK(travel_parameter(ch, 1.10) == doctest::Approx(0.011).epsilon(1e-14));
    CHECK(travel_parameter(ch, 0.0) == 0.0);
    CHECK_THROWS_AS(travel_parameter(ch, -0.1), std::domain_error);
}

TEST_CASE("piecewise travel parameter matches a segment-sum oracle") {
    const std::vector<DiffusivitySegment> profile{{0.5, 0.05}, {1.0, 0.1}};
    CHECK(travel_parameter(profile, 5.0, 1.0) == doctest::Approx(0.015).epsilon(1e-14));

    // Independent oracle: accumulate K * overlap over a fine partition.
    const auto oracle = [&](double x) {
        double integral = 0.0;
        const int n = 100000;
        const double h = x / n;
        for (int i = 0; i < n; ++i) {
            const double mid = (i + 0.5) * h;
            integral += (mid < 0.5 ? 0.05 : 0.1) * h;
        }
        return integral / 5.0;
    };
    for (double x : {0.2, 0.5, 0.77, 1.0, 1.6}) {
        CHECK(travel_parameter(profile, 5.0, x) == doctest::Approx(oracle(x)).epsilon(1e-4));
    }
    // Past the profile the last diffusivity extends.
    CHECK(travel_parameter(profile, 5.0, 2.0) ==
          doctest::Approx((0.05 * 0.5 + 0.1 * 1.5) / 5.0).epsilon(1e-14));

    CHECK_THROWS_AS(travel_parameter(std::vector<DiffusivitySegment>{}, 5.0, 1.0),
                    std::invalid_argument);
    const std::vector<DiffusivitySegment> bad{{1.0, 0.05}, {0.5, 0.1}};
    CHECK_THROWS_AS(travel_parameter(bad, 5.0, 2.0), std::invalid_argument);
}

TEST_CASE("unbounded impulse peaks at the advective arrival time") {
    const ChannelParams ch = table1_unbounded();
    double best_t = 0.0;
    double best_c = -1.0;
    for (double t = 1e-4; t <= 0.6; t += 1e-4) {
        const double c = unbounded_impulse(ch, kReceiver, t);
        if (c > best_c) {
            best_c = c;
            best_t = t;
        }
    }
    CHECK(best_t == doctest::Approx(0.22).epsilon(1e-3));
    CHECK(best_c > 0.0);
}

TEST_CASE("distant ground plane reduces to the free-space puff") {
    ChannelParams ch = table1_unbounded();
    ch.source_height = 1e3;
    for (double t : {0.1, 0.22, 0.4}) {
        for (double z : {-0.1, 0.0, 0.2}) {
            const SpacePoint p{1.10, 0.05, z};
            CHECK(unbounded_impulse(ch, p, t) ==
                  doctest::Approx(free_space_puff(ch, p, t)).epsilon(1e-12));
        }
    }
}

TEST_CASE("unbounded impulse conserves mass over the half-space") {
    const ChannelParams ch = table1_unbounded();
    const double mass = puff_mass(ch, 0.22);
    CHECK(mass == doctest::Approx(ch.released_mol).epsilon(1e-6));
}

TEST_CASE("unbounded impulse causality and domain errors") {
    const ChannelParams ch = table1_unbounded();
    CHECK(unbounded_impulse(ch, kReceiver, 0.0) == 0.0);
    CHECK(unbounded_impulse(ch, kReceiver, -1.0) == 0.0);
    CHECK_THROWS_AS(unbounded_impulse(ch, SpacePoint{0.0, 0.0, 0.0}, 0.1), std::domain_error);
    CHECK_THROWS_AS(unbounded_impulse(table1_bounded(), kReceiver, 0.1), std::invalid_argument);
}

TEST_CASE("unbounded impulse is symmetric in y") {
    const ChannelParams ch = table1_unbounded();
    for (double y : {0.01, 0.07, 0.2}) {
        const double plus = unbounded_impulse(ch, SpacePoint{1.10, y, 0.03}, 0.2);
        const double minus = unbounded_impulse(ch, SpacePoint{1.10, -y, 0.03}, 0.2);
        CHECK(plus == minus);
        CHECK(plus >= 0.0);
    }
}

TEST_CASE("well-mixed duct profile is uniform") {
    // r >> l^2: every series term is extinct, only 1/(2l) remains.
    CHECK(transverse_profile(1.0, 0.0, 0.125) == 4.0);
    CHECK(transverse_profile(1.0, 0.1, 0.125) == 4.0);
    CHECK(transverse_profile(1.0, -0.125, 0.125) == 4.0);
}

TEST_CASE("transverse profile integrates to one") {
    const double l = 0.125;
    for (double r : {1e-5, 1e-4, 1e-2, 1.0}) {
        const double integral = adaptive_simpson(
            [&](double y) { return transverse_profile(r, y, l); }, -l, l, 1e-11, 1e-18);
        CHECK(integral == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("series and image forms agree at the crossover") {
    const double l = 0.125;
    const double r_star = transverse_crossover(l);
    CHECK(r_star == doctest::Approx((l / 3.14159265358979323846) *
                                    (l / 3.14159265358979323846) * 1e-2));
    for (int i = 0; i <= 40; ++i) {
        const double y = -l + 2.0 * l * i / 40.0;
        const double series = transverse_profile_series(r_star, y, l);
        const double images = transverse_profile_images(r_star, y, l);
        CHECK(std::abs(series - images) < 1e-9);
    }
}

TEST_CASE("transverse profile matches a brute-force series") {
    const double l = 0.125;
    for (double r : {5e-4, 0.011, 0.05}) {
        for (double y : {0.0, 0.03, 0.125}) {
            CHECK(transverse_profile(r, y, l) ==
                  doctest::Approx(brute_force_profile(r, y, l)).epsilon(1e-12));
        }
    }
}

TEST_CASE("small-r profile approaches the Dirac limit at the center") {
    const double l = 0.125;
    const double a7 = transverse_profile(1e-7, 0.0, l);
    const double a8 = transverse_profile(1e-8, 0.0, l);
    const double a9 = transverse_profile(1e-9, 0.0, l);
    CHECK(a7 > 100.0);
    CHECK(a8 > a7);
    CHECK(a9 > a8);
    // Away from the source the same limit collapses to zero.
    CHECK(transverse_profile(1e-8, 0.06, l) == 0.0);
}

TEST_CASE("transverse profile domain errors") {
    const double l = 0.125;
    CHECK_THROWS_AS(transverse_profile(-1e-3, 0.0, l), std::domain_error);
    CHECK_THROWS_AS(transverse_profile(0.0, 0.0, l), std::domain_error);
    CHECK_THROWS_AS(transverse_profile(0.01, 0.2, l), std::domain_error);
    CHECK_THROWS_AS(transverse_profile(0.01, 0.0, 0.0), std::invalid_argument);
}

TEST_CASE("transverse profile stays nonnegative within truncation tolerance") {
    const double l = 0.125;
    reset_clamped_negative_count();
    for (double r : {1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 0.1}) {
        for (int i = 0; i <= 100; ++i) {
            const double y = -l + 2.0 * l * i / 100.0;
            CHECK(transverse_profile(r, y, l) >= 0.0);
        }
    }
}

TEST_CASE("bounded impulse arrival and amplitude") {
    const ChannelParams ch = table1_bounded();
    const BoundedImpulse imp = bounded_impulse(ch, kReceiver);
    CHECK(imp.arrival_time == doctest::Approx(0.22).epsilon(1e-14));

    const double r = travel_parameter(ch, kReceiver.x);
    const double expected = ch.released_mol / ch.flow_speed * brute_force_profile(r, 0.0, 0.125) *
                            brute_force_profile(r, 0.0, 0.125);
    CHECK(imp.amplitude == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("bounded impulse at the walls uses the reflected profile") {
    const ChannelParams ch = table1_bounded();
    const double r = travel_parameter(ch, kReceiver.x);
    const BoundedImpulse imp = bounded_impulse(ch, SpacePoint{1.10, 0.125, -0.125});
    const double a_wall = brute_force_profile(r, 0.125, 0.125);
    CHECK(std::isfinite(imp.amplitude));
    CHECK(imp.amplitude == doctest::Approx(ch.released_mol / ch.flow_speed * a_wall * a_wall)
                               .epsilon(1e-12));
}

TEST_CASE("fully mixed duct amplitude is M/u divided by the cross-section") {
    ChannelParams ch = table1_bounded();
    const BoundedImpulse imp = bounded_impulse(ch, SpacePoint{1e4, 0.01, -0.05});
    CHECK(imp.amplitude ==
          doctest::Approx(ch.released_mol / ch.flow_speed / (0.25 * 0.25)).epsilon(1e-12));
}

TEST_CASE("bounded impulse domain errors") {
    const ChannelParams ch = table1_bounded();
    CHECK_THROWS_AS(bounded_impulse(ch, SpacePoint{0.0, 0.0, 0.0}), std::domain_error);
    CHECK_THROWS_AS(bounded_impulse(ch, SpacePoint{-1.0, 0.0, 0.0}), std::domain_error);
    CHECK_THROWS_AS(bounded_impulse(ch, SpacePoint{1.10, 0.2, 0.0}), std::domain_error);
    CHECK_THROWS_AS(bounded_impulse(table1_unbounded(), kReceiver), std::invalid_argument);
}

TEST_CASE("bounded symmetry in both transverse axes") {
    const ChannelParams ch = table1_bounded();
    for (double y : {0.02, 0.09}) {
        for (double z : {0.05, 0.11}) {
            const double base = bounded_impulse(ch, SpacePoint{1.10, y, z}).amplitude;
            CHECK(base == bounded_impulse(ch, SpacePoint{1.10, -y, z}).amplitude);
            CHECK(base == bounded_impulse(ch, SpacePoint{1.10, y, -z}).amplitude);
        }
    }
}

TEST_CASE("unbounded pulse response vanishes before the release") {
    const ChannelParams ch = table1_unbounded();
    const PulseShape pulse{1.0};
    CHECK(pulse_response_unbounded(ch, kReceiver, pulse, 0.0) == 0.0);
    CHECK_THROWS_AS(pulse_response_unbounded(ch, kReceiver, pulse, -0.5), std::domain_error);
}

TEST_CASE("short pulses converge to the impulse response") {
    const ChannelParams ch = table1_unbounded();
    const double t_probe = 0.22;
    const double impulse = unbounded_impulse(ch, kReceiver, t_probe);

    // At the arrival time the response is flat in t, so the trailing-window
    // average differs only at second order in T_p.
    const double narrow = pulse_response_unbounded(ch, kReceiver, PulseShape{1e-3}, t_probe);
    CHECK(std::abs(narrow - impulse) / impulse < 1e-3);

    // Over the rest of the transit the trailing window lags by T_p/2, leaving
    // a first-order gap bounded by (T_p/2) * max|dC/dt|. sup-norm gap must
    // shrink monotonically with the pulse duration and respect that bound.
    const double sigma_t = std::sqrt(2.0 * travel_parameter(ch, kReceiver.x)) / ch.flow_speed;
    const double max_slope = impulse * std::exp(-0.5) / sigma_t;
    std::vector<double> gaps;
    for (double tp : {1e-1, 1e-2, 1e-3}) {
        double gap = 0.0;
        for (double t = 0.05; t <= 0.62; t += 2e-3) {
            const double diff =
                std::abs(pulse_response_unbounded(ch, kReceiver, PulseShape{tp}, t) -
                         unbounded_impulse(ch, kReceiver, t));
            gap = std::max(gap, diff);
        }
        gaps.push_back(gap);
    }
    CHECK(gaps[0] > gaps[1]);
    CHECK(gaps[1] > gaps[2]);
    CHECK(gaps[2] < 1.2 * (1e-3 / 2.0) * max_slope);
    CHECK(gaps[2] > 0.0);
}

TEST_CASE("pulse and impulse responses carry the same time integral") {
    const ChannelParams ch = table1_unbounded();
    const PulseShape pulse{0.2};
    const double area_impulse = adaptive_simpson(
        [&](double t) { return unbounded_impulse(ch, kReceiver, t); }, 0.0, 2.0, 1e-9, 1e-18);
    const double area_pulse = adaptive_simpson(
        [&](double t) { return pulse_response_unbounded(ch, kReceiver, pulse, t); }, 0.0, 2.2,
        1e-7, 1e-16);
    CHECK(area_pulse == doctest::Approx(area_impulse).epsilon(1e-5));
}

TEST_CASE("bounded pulse response is a rectangular window") {
    const ChannelParams ch = table1_bounded();
    const PulseShape pulse{1.0};
    const double r = travel_parameter(ch, kReceiver.x);
    const double a0 = brute_force_profile(r, 0.0, 0.125);
    const double plateau = ch.released_mol / (ch.flow_speed * pulse.duration) * a0 * a0;

    CHECK(pulse_response_bounded(ch, kReceiver, pulse, 0.2199) == 0.0);
    CHECK(pulse_response_bounded(ch, kReceiver, pulse, 0.22) ==
          doctest::Approx(plateau).epsilon(1e-12));
    CHECK(pulse_response_bounded(ch, kReceiver, pulse, 0.7) ==
          doctest::Approx(plateau).epsilon(1e-12));
    CHECK(pulse_response_bounded(ch, kReceiver, pulse, 1.22) ==
          doctest::Approx(plateau).epsilon(1e-12));
    CHECK(pulse_response_bounded(ch, kReceiver, pulse, 1.2201) == 0.0);
}

TEST_CASE("bounded pulse area is duration-independent") {
    const ChannelParams ch = table1_bounded();
    const double r = travel_parameter(ch, kReceiver.x);
    const double expected_area = ch.released_mol / ch.flow_speed *
                                 brute_force_profile(r, 0.0, 0.125) *
                                 brute_force_profile(r, 0.0, 0.125);
    for (double tp : {0.3, 1.0, 2.0}) {
        const PulseShape pulse{tp};
        const double plateau = pulse_response_bounded(ch, kReceiver, pulse, 0.22 + 0.5 * tp);
        CHECK(plateau * tp == doctest::Approx(expected_area).epsilon(1e-12));
    }
}

TEST_CASE("responses are linear in the released amount") {
    ChannelParams ch = table1_unbounded();
    ChannelParams doubled = ch;
    doubled.released_mol *= 2.0;
    CHECK(unbounded_impulse(doubled, kReceiver, 0.2) ==
          2.0 * unbounded_impulse(ch, kReceiver, 0.2));
    CHECK(pulse_response_unbounded(doubled, kReceiver, PulseShape{1.0}, 0.7) ==
          doctest::Approx(2.0 * pulse_response_unbounded(ch, kReceiver, PulseShape{1.0}, 0.7))
              .epsilon(1e-12));

    ChannelParams chb = table1_bounded();
    ChannelParams doubled_b = chb;
    doubled_b.released_mol *= 2.0;
    CHECK(bounded_impulse(doubled_b, kReceiver).amplitude ==
          2.0 * bounded_impulse(chb, kReceiver).amplitude);
}

TEST_CASE("channel parameter validation names the offending field") {
    ChannelParams ch = table1_bounded();
    ch.half_width = 0.0;
    CHECK_THROWS_WITH_AS(validate(ch), "channel.half_width_m: must be > 0",
                         std::invalid_argument);
    ch = table1_unbounded();
    ch.diffusivity = -1.0;
    CHECK_THROWS_WITH_AS(validate(ch), "channel.diffusivity_m2_per_s: must be > 0",
                         std::invalid_argument);
}

TEST_SUITE_END();

#include "omc/sequence.hpp"

#include <cmath>
#include <stdexcept>

namespace omc {

TransmissionSchedule make_regular_schedule(std::size_t count, double symbol_period,
                                           const PulseShape& pulse) {
    if (count == 0) {
        return TransmissionSchedule{{}, pulse, symbol_period};
    }
    if (count > 1 && !(symbol_period > 0.0)) {
        throw std::invalid_argument("make_regular_schedule: symbol period must be > 0");
    }
    TransmissionSchedule sched;
    sched.pulse = pulse;
    sched.symbol_period = symbol_period;
    sched.starts.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        sched.starts.push_back(static_cast<double>(k) * symbol_period);
    }
    return sched;
}

ConcentrationTrace superpose(const ChannelParams& params, const SpacePoint& p,
                             const TransmissionSchedule& schedule, const SimulationGrid& grid) {
    validate(schedule);
    validate(grid, schedule);

    ConcentrationTrace out;
    out.t0 = 0.0;
    out.dt = grid.dt;
    out.samples.assign(grid.size(), 0.0);

    for (double start : schedule.starts) {
        for (std::size_t k = 0; k < out.samples.size(); ++k) {
            const double t = out.time(k) - start;
            if (t <= 0.0) {
                continue;
            }
            if (params.geometry == Geometry::BoundedSquare) {
                out.samples[k] += pulse_response_bounded(params, p, schedule.pulse, t);
            } else {
                out.samples[k] += pulse_response_unbounded(params, p, schedule.pulse, t);
            }
        }
    }
    return out;
}

VoltageTrace end_to_end(const ChannelParams& params, const ReceiverParams& rx,
                        const SpacePoint& p, const TransmissionSchedule& schedule,
                        const SimulationGrid& grid, std::optional<std::uint64_t> seed) {
    const ConcentrationTrace c_mol = superpose(params, p, schedule, grid);
    const ConcentrationTrace c = to_mg_per_l(c_mol, rx.molar_mass);
    VoltageTrace v = integrate_kinetics(rx, c, baseline_voltage(rx));
    if (seed) {
        v = add_noise(rx, v, *seed).trace;
    }
    return v;
}

void validate(const TransmissionSchedule& schedule) {
    if (!(schedule.pulse.duration > 0.0)) {
        throw std::invalid_argument("schedule.pulse_duration_s: must be > 0");
    }
    for (std::size_t k = 1; k < schedule.starts.size(); ++k) {
        if (!(schedule.starts[k] > schedule.starts[k - 1])) {
            throw std::invalid_argument("schedule.starts_s: must be strictly increasing");
        }
    }
}

void validate(const SimulationGrid& grid, const TransmissionSchedule& schedule) {
    if (!(grid.dt > 0.0)) {
        throw std::invalid_argument("grid.dt_s: must be > 0");
    }
    if (grid.dt > schedule.pulse.duration / 10.0) {
        throw std::invalid_argument("grid.dt_s: must be <= pulse_duration_s / 10");
    }
    if (!schedule.starts.empty() && !(grid.t_end > schedule.starts.back())) {
        throw std::invalid_argument("grid.t_end_s: must exceed the last pulse start");
    }
}

}  // namespace omc

#ifndef OMC_SEQUENCE_HPP
#define OMC_SEQUENCE_HPP

/**
 * @file sequence.hpp
 * @brief Multi-pulse transmission schedules and LTI superposition of pulse
 *        responses, plus the full channel -> receiver chain.
 */

#include <cstdint>
#include <optional>

#include "omc/channel.hpp"
#include "omc/receiver.hpp"
#include "omc/trace.hpp"

namespace omc {

/// When and how long odor pulses are emitted. Starts are strictly increasing;
/// regular schedules satisfy start_k = k * symbol_period.
struct TransmissionSchedule {
    std::vector<double> starts;  // pulse start times [s]
    PulseShape pulse;            // common pulse duration
    double symbol_period = 0.0;  // T_sym [s]; 0 when the schedule is irregular
};

/// count pulses at k * symbol_period, k = 0..count-1.
TransmissionSchedule make_regular_schedule(std::size_t count, double symbol_period,
                                           const PulseShape& pulse);

/// Uniform output sampling: samples at k * dt for k * dt <= t_end.
struct SimulationGrid {
    double t_end = 0.0;  // [s]
    double dt = 0.0;     // [s]

    std::size_t size() const { return static_cast<std::size_t>(t_end / dt + 1e-9) + 1; }
};

/**
 * @brief Concentration at p from the whole schedule, by LTI superposition.
 *
 * Sums pulse_response(t - start_k) over pulses; exactly linear in the released
 * amount M. Output units are mol/m^3 (convert with to_mg_per_l before feeding
 * the receiver).
 */
ConcentrationTrace superpose(const ChannelParams& params, const SpacePoint& p,
                             const TransmissionSchedule& schedule, const SimulationGrid& grid);

/**
 * @brief Full chain: superpose -> mg/L conversion -> sensor kinetics ->
 *        optional measurement noise.
 *
 * The initial voltage is the clean-air baseline. With a seed the returned
 * trace carries noise and is deterministic in the seed; without one it is the
 * noise-free kinetic response.
 */
VoltageTrace end_to_end(const ChannelParams& params, const ReceiverParams& rx,
                        const SpacePoint& p, const TransmissionSchedule& schedule,
                        const SimulationGrid& grid,
                        std::optional<std::uint64_t> seed = std::nullopt);

/// Throws std::invalid_argument naming the offending field on violation.
void validate(const TransmissionSchedule& schedule);
void validate(const SimulationGrid& grid, const TransmissionSchedule& schedule);

}  // namespace omc

#endif  // OMC_SEQUENCE_HPP

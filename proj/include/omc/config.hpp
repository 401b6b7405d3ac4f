#ifndef OMC_CONFIG_HPP
#define OMC_CONFIG_HPP

/**
 * @file config.hpp
 * @brief Scenario configuration: one JSON document describing channel,
 *        receiver, schedule, grid and seed. Presets expand to the reference
 *        parameter sets used throughout ("table1_bounded" /
 *        "table1_unbounded"); explicit fields override preset values.
 */

#include <cstdint>
#include <iosfwd>
#include <string>

#include "omc/channel.hpp"
#include "omc/receiver.hpp"
#include "omc/sequence.hpp"

namespace omc {

/// Oracle runtime knobs carried in the config's optional "oracle" section.
struct OracleSettings {
    std::size_t n_particles = 1000000;
    double dt = 1e-3;       // [s]
    int y_bins = 20;
    unsigned threads = 0;   // 0: auto
};

struct ScenarioConfig {
    ChannelParams channel;
    ReceiverParams receiver;
    SpacePoint receiver_position;
    TransmissionSchedule schedule;
    SimulationGrid grid;
    std::uint64_t seed = 0;
    double align_max_lag = 2.0;  // [s]; 0 disables alignment
    OracleSettings oracle;
};

/// Reference parameter sets.
ScenarioConfig preset_table1_bounded();
ScenarioConfig preset_table1_unbounded();

/**
 * @brief Parses and validates a scenario from JSON text.
 *
 * Unknown keys and invariant violations raise ParseError with the offending
 * field path (e.g. "channel.diffusivity_m2_per_s: must be > 0"). When
 * "grid.t_end_s" is omitted it defaults to
 * last pulse start + symbol period + 5 * tau_decay.
 */
ScenarioConfig load_scenario(const std::string& json_text);
ScenarioConfig load_scenario_file(const std::string& path);

/// Serializes a scenario back to a JSON document (round-trips through
/// load_scenario).
std::string to_json(const ScenarioConfig& config);

/// Validates every section, throwing std::invalid_argument with a field path.
void validate(const ScenarioConfig& config);

}  // namespace omc

#endif  // OMC_CONFIG_HPP

#ifndef OMC_IO_HPP
#define OMC_IO_HPP

/**
 * @file io.hpp
 * @brief Trace CSV ingestion, resampling, cross-correlation alignment and the
 *        end-to-end validation workflow.
 *
 * Trace CSV schema (fixed): optional "# key: value" metadata comment lines,
 * then the header "time_s,voltage_v", then one "t,v" row per sample with '.'
 * as the decimal separator. LF and CRLF are both accepted. The value column
 * always carries the header name voltage_v; for non-voltage traces the actual
 * quantity is recorded in a "# quantity:" metadata line.
 */

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "omc/config.hpp"
#include "omc/metrics.hpp"
#include "omc/trace.hpp"

namespace omc {

/// A possibly non-uniformly sampled measured trace plus its metadata.
struct RawTrace {
    std::vector<double> timestamps;  // [s], strictly increasing
    std::vector<double> values;      // [V]
    std::map<std::string, std::string> metadata;

    std::size_t size() const { return timestamps.size(); }
};

/// Parses the fixed CSV schema. Throws ParseError (with the 1-based line
/// number) on a missing header, non-numeric cell, or non-increasing time.
RawTrace load_csv(const std::string& path);
RawTrace parse_csv(std::istream& in);

/// Writes the fixed CSV schema with values rendered at 9 significant digits;
/// load_csv(save_csv(x)) reproduces x bit-exactly at that precision.
void save_csv(const std::string& path, const RawTrace& trace);
void write_csv(std::ostream& out, const RawTrace& trace);

RawTrace to_raw(const VoltageTrace& trace,
                const std::map<std::string, std::string>& metadata = {});
RawTrace to_raw(const ConcentrationTrace& trace,
                const std::map<std::string, std::string>& metadata = {});

/// Linear interpolation of a raw trace onto the uniform grid {k * dt}.
/// Requests outside the raw time span throw std::domain_error (no
/// extrapolation).
VoltageTrace resample(const RawTrace& raw, const SimulationGrid& grid);
VoltageTrace resample(const RawTrace& raw, double t0, double dt, std::size_t n);

/**
 * @brief Lag, within +-max_lag, that best aligns a model trace to a measured
 *        one by cross-correlation.
 *
 * The returned lag is the time shift to apply to the model's clock:
 * model(t - lag) ~ exp(t). A model delayed by two samples therefore yields
 * lag = -2*dt. Ties prefer the smallest |lag|. Both traces must share dt and
 * t0; flat traces make the correlation undefined (std::domain_error).
 */
double align(const VoltageTrace& exp_trace, const VoltageTrace& model_trace, double max_lag);

/// Measured and modeled traces on a common clock after resampling,
/// sanitation into [0, V_c] and cross-correlation alignment.
struct AlignedComparison {
    VoltageTrace exp_w;
    VoltageTrace model_w;
    double lag = 0.0;                     // [s] applied to the model trace
    std::uint64_t sanitized_samples = 0;  // measured samples clipped into [0, V_c]
};

/// Runs end_to_end noise-free and aligns the measurement against it.
AlignedComparison aligned_comparison(const RawTrace& exp_trace, const ScenarioConfig& config);

/**
 * @brief Full validation workflow for a measured trace against a scenario.
 *
 * Runs end_to_end noise-free, resamples the measurement onto the scenario
 * grid, optionally aligns (config.align_max_lag), and computes the metric
 * bundle on the overlapping window. NRMSE is normalized by the measured
 * trace's range; peak error by the model's peak.
 */
ValidationReport validate_trace(const RawTrace& exp_trace, const ScenarioConfig& config);

}  // namespace omc

#endif  // OMC_IO_HPP

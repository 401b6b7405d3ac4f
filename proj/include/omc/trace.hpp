#ifndef OMC_TRACE_HPP
#define OMC_TRACE_HPP

#include <cstddef>
#include <vector>

namespace omc {

/// Uniformly sampled concentration time series [mg/L].
/// Sample k sits at t = t0 + k*dt.
struct ConcentrationTrace {
    double t0 = 0.0;              // [s]
    double dt = 0.0;              // [s], > 0
    std::vector<double> samples;  // [mg/L], >= 0

    std::size_t size() const { return samples.size(); }
    double time(std::size_t k) const { return t0 + static_cast<double>(k) * dt; }
};

/// Uniformly sampled sensor output voltage time series [V].
struct VoltageTrace {
    double t0 = 0.0;              // [s]
    double dt = 0.0;              // [s], > 0
    std::vector<double> samples;  // [V], within [0, V_c]

    std::size_t size() const { return samples.size(); }
    double time(std::size_t k) const { return t0 + static_cast<double>(k) * dt; }
};

}  // namespace omc

#endif  // OMC_TRACE_HPP

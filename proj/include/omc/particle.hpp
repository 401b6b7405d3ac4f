#ifndef OMC_PARTICLE_HPP
#define OMC_PARTICLE_HPP

/**
 * @file particle.hpp
 * @brief Monte Carlo particle oracle: advected random walks with reflecting
 *        boundaries, used to cross-check the closed-form channel responses.
 *
 * Particles follow the Euler-Maruyama discretization of
 *   dX = u dt + sqrt(2K) dW_x,   dY = sqrt(2K) dW_y,   dZ = sqrt(2K) dW_z
 * with specular reflection at the domain boundaries (ground plane z = -h in
 * the unbounded geometry, duct walls y,z = +-l in the bounded one).
 *
 * Work is split into fixed-size lanes; every lane draws from its own stream
 * derived from the master seed, and lane results are merged in lane order, so
 * results are identical for any worker-thread count.
 */

#include <cstdint>
#include <vector>

#include "omc/channel.hpp"

namespace omc {

struct OracleConfig {
    std::size_t n_particles = 0;
    double dt = 1e-3;          // [s]
    std::uint64_t seed = 0;
    unsigned threads = 0;      // 0: hardware count, bounded by OMC_SIM_THREADS
};

/// Axis-aligned box used as the concentration estimation cell.
struct ReceiverCell {
    SpacePoint center;
    double half_x = 0.0, half_y = 0.0, half_z = 0.0;  // [m]

    double volume() const { return 8.0 * half_x * half_y * half_z; }
};

/// Uniform 1-D binning of a transverse coordinate.
struct HistogramSpec {
    int bins = 0;
    double min = 0.0, max = 0.0;

    double width() const { return (max - min) / bins; }
};

/// Per-snapshot statistics of the unbounded walk.
struct UnboundedSnapshot {
    double time = 0.0;                      // [s]
    double mean_x = 0.0;                    // [m]
    std::uint64_t cell_count = 0;           // particles inside the receiver cell
    double cell_concentration = 0.0;        // (M/n) * count / volume [mol/m^3]
    std::vector<std::uint64_t> slab_y_counts;  // y histogram inside the x/z slabs
    std::uint64_t slab_total = 0;
};

struct UnboundedOracleResult {
    std::size_t n_particles = 0;
    std::vector<UnboundedSnapshot> snapshots;
};

/// Empirical transverse profile of the bounded walk after transverse
/// diffusion measure r (simulated over physical time r / K).
struct BoundedOracleResult {
    std::size_t n_particles = 0;
    double r = 0.0;                        // [m^2]
    std::vector<std::uint64_t> y_counts;   // histogram of final y
    double max_abs_y = 0.0, max_abs_z = 0.0;  // reflection containment check
};

/**
 * @brief Unbounded random walk with ground reflection.
 *
 * Records, at each requested snapshot time (ascending, multiples of cfg.dt):
 * the mean x position, the particle count and density estimate in the
 * receiver cell, and a y histogram of particles inside the cell's x/z slabs.
 */
UnboundedOracleResult simulate_unbounded(const ChannelParams& params, const OracleConfig& cfg,
                                         const std::vector<double>& snapshot_times,
                                         const ReceiverCell& cell, const HistogramSpec& y_hist);

/**
 * @brief Bounded transverse walk with specular wall reflection.
 *
 * Steps y and z with diffusivity K for a total time r_target / K, so the
 * final y distribution matches the transverse profile a(r_target, y).
 * Requires sqrt(2 K dt) < l / 10 so multiple reflections per step stay rare.
 */
BoundedOracleResult simulate_bounded(const ChannelParams& params, const OracleConfig& cfg,
                                     double r_target, const HistogramSpec& y_hist);

/// Specular fold of v into [lo, hi] (repeated reflection at both ends).
double reflect_into(double v, double lo, double hi);

/// Worker count actually used: `requested`, or the hardware count when 0,
/// both bounded by the OMC_SIM_THREADS environment variable when set.
unsigned resolve_thread_count(unsigned requested);

/// SplitMix64 mix step; used to derive independent per-lane seeds.
std::uint64_t splitmix64(std::uint64_t& state);

}  // namespace omc

#endif  // OMC_PARTICLE_HPP

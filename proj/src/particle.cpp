#include "omc/particle.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <random>
#include <stdexcept>
#include <thread>

namespace omc {

namespace {

constexpr std::size_t kLaneSize = 1 << 16;  // particles per lane

std::uint64_t lane_seed(std::uint64_t master, std::size_t lane) {
    std::uint64_t state = master + 0x9E3779B97F4A7C15ull * (static_cast<std::uint64_t>(lane) + 1);
    return splitmix64(state);
}

void check_common(const OracleConfig& cfg) {
    if (cfg.n_particles == 0) {
        throw std::domain_error("oracle: n_particles must be >= 1");
    }
    if (!(cfg.dt > 0.0)) {
        throw std::domain_error("oracle: dt must be > 0");
    }
}

int bin_index(double v, const HistogramSpec& hist) {
    if (v < hist.min || v >= hist.max) {
        return -1;
    }
    const int idx = static_cast<int>((v - hist.min) / hist.width());
    return idx < hist.bins ? idx : hist.bins - 1;
}

/// Runs fn(lane_index) for each lane on a small worker pool. Lane outputs are
/// written to per-lane slots, keeping the merge order deterministic.
template <typename Fn>
void run_lanes(std::size_t lanes, unsigned threads, Fn&& fn) {
    if (threads <= 1 || lanes <= 1) {
        for (std::size_t lane = 0; lane < lanes; ++lane) {
            fn(lane);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    const unsigned workers = std::min<std::size_t>(threads, lanes);
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t lane = next.fetch_add(1); lane < lanes; lane = next.fetch_add(1)) {
                fn(lane);
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
}

}  // namespace

std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

double reflect_into(double v, double lo, double hi) {
    if (v >= lo && v <= hi) {
        return v;
    }
    // Exact triangle-wave fold with period 2(hi - lo); equivalent to repeated
    // specular reflection at both ends regardless of overshoot size.
    const double span = hi - lo;
    double u = std::fmod(v - lo, 2.0 * span);
    if (u < 0.0) {
        u += 2.0 * span;
    }
    return lo + (u <= span ? u : 2.0 * span - u);
}

unsigned resolve_thread_count(unsigned requested) {
    unsigned n = requested;
    if (n == 0) {
        n = std::thread::hardware_concurrency();
        if (n == 0) {
            n = 1;
        }
    }
    if (const char* env = std::getenv("OMC_SIM_THREADS")) {
        char* end = nullptr;
        const unsigned long cap = std::strtoul(env, &end, 10);
        if (end != env && cap >= 1) {
            n = std::min<unsigned long>(n, cap);
        }
    }
    return std::max(1u, n);
}

UnboundedOracleResult simulate_unbounded(const ChannelParams& params, const OracleConfig& cfg,
                                         const std::vector<double>& snapshot_times,
                                         const ReceiverCell& cell, const HistogramSpec& y_hist) {
    if (params.geometry != Geometry::Unbounded) {
        throw std::invalid_argument("simulate_unbounded: geometry must be Unbounded");
    }
    check_common(cfg);
    if (snapshot_times.empty()) {
        throw std::domain_error("simulate_unbounded: need at least one snapshot time");
    }
    if (y_hist.bins <= 0 || !(y_hist.max > y_hist.min)) {
        throw std::domain_error("simulate_unbounded: invalid histogram spec");
    }

    // Snapshot times must fall on the stepping grid.
    std::vector<std::size_t> steps_to;
    double prev = 0.0;
    for (double ts : snapshot_times) {
        if (!(ts > prev)) {
            throw std::domain_error("simulate_unbounded: snapshot times must be ascending and > 0");
        }
        const double span = ts - prev;
        const auto n = static_cast<std::size_t>(std::llround(span / cfg.dt));
        if (std::abs(static_cast<double>(n) * cfg.dt - span) > 1e-9) {
            throw std::domain_error("simulate_unbounded: snapshot times must be multiples of dt");
        }
        steps_to.push_back(n);
        prev = ts;
    }

    const std::size_t n_snap = snapshot_times.size();
    const std::size_t lanes = (cfg.n_particles + kLaneSize - 1) / kLaneSize;

    struct LaneAcc {
        std::vector<double> sum_x;
        std::vector<std::uint64_t> cell_count;
        std::vector<std::vector<std::uint64_t>> y_counts;
        std::vector<std::uint64_t> slab_total;
    };
    std::vector<LaneAcc> acc(lanes);

    const double u = params.flow_speed;
    const double h = params.source_height;
    const double sd = std::sqrt(2.0 * params.diffusivity * cfg.dt);

    run_lanes(lanes, resolve_thread_count(cfg.threads), [&](std::size_t lane) {
        LaneAcc& a = acc[lane];
        a.sum_x.assign(n_snap, 0.0);
        a.cell_count.assign(n_snap, 0);
        a.y_counts.assign(n_snap, std::vector<std::uint64_t>(y_hist.bins, 0));
        a.slab_total.assign(n_snap, 0);

        const std::size_t begin = lane * kLaneSize;
        const std::size_t end = std::min(begin + kLaneSize, cfg.n_particles);

        std::mt19937_64 engine(lane_seed(cfg.seed, lane));
        std::normal_distribution<double> unit(0.0, 1.0);

        for (std::size_t i = begin; i < end; ++i) {
            double x = 0.0, y = 0.0, z = 0.0;
            for (std::size_t s = 0; s < n_snap; ++s) {
                for (std::size_t k = 0; k < steps_to[s]; ++k) {
                    x += u * cfg.dt;
                    if (sd > 0.0) {
                        x += sd * unit(engine);
                        y += sd * unit(engine);
                        z += sd * unit(engine);
                        if (z < -h) {
                            z = -2.0 * h - z;  // ground is perfectly reflecting
                        }
                    }
                }
                a.sum_x[s] += x;
                const bool in_x = std::abs(x - cell.center.x) <= cell.half_x;
                const bool in_y = std::abs(y - cell.center.y) <= cell.half_y;
                const bool in_z = std::abs(z - cell.center.z) <= cell.half_z;
                if (in_x && in_y && in_z) {
                    ++a.cell_count[s];
                }
                if (in_x && in_z) {
                    ++a.slab_total[s];
                    const int b = bin_index(y, y_hist);
                    if (b >= 0) {
                        ++a.y_counts[s][static_cast<std::size_t>(b)];
                    }
                }
            }
        }
    });

    UnboundedOracleResult out;
    out.n_particles = cfg.n_particles;
    out.snapshots.resize(n_snap);
    const double per_particle =
        params.released_mol / static_cast<double>(cfg.n_particles) / cell.volume();
    for (std::size_t s = 0; s < n_snap; ++s) {
        UnboundedSnapshot& snap = out.snapshots[s];
        snap.time = snapshot_times[s];
        snap.slab_y_counts.assign(y_hist.bins, 0);
        double sum_x = 0.0;
        for (const LaneAcc& a : acc) {
            sum_x += a.sum_x[s];
            snap.cell_count += a.cell_count[s];
            snap.slab_total += a.slab_total[s];
            for (int b = 0; b < y_hist.bins; ++b) {
                snap.slab_y_counts[static_cast<std::size_t>(b)] +=
                    a.y_counts[s][static_cast<std::size_t>(b)];
            }
        }
        snap.mean_x = sum_x / static_cast<double>(cfg.n_particles);
        snap.cell_concentration = per_particle * static_cast<double>(snap.cell_count);
    }
    return out;
}

BoundedOracleResult simulate_bounded(const ChannelParams& params, const OracleConfig& cfg,
                                     double r_target, const HistogramSpec& y_hist) {
    if (params.geometry != Geometry::BoundedSquare) {
        throw std::invalid_argument("simulate_bounded: geometry must be BoundedSquare");
    }
    check_common(cfg);
    if (!(r_target > 0.0)) {
        throw std::domain_error("simulate_bounded: r_target must be > 0");
    }
    if (y_hist.bins <= 0 || !(y_hist.max > y_hist.min)) {
        throw std::domain_error("simulate_bounded: invalid histogram spec");
    }
    const double l = params.half_width;
    const double sd = std::sqrt(2.0 * params.diffusivity * cfg.dt);
    if (!(sd < l / 10.0)) {
        throw std::domain_error("simulate_bounded: dt too large, need sqrt(2 K dt) < l/10");
    }

    const double total_time = r_target / params.diffusivity;
    const auto n_steps = static_cast<std::size_t>(std::llround(total_time / cfg.dt));
    if (n_steps == 0) {
        throw std::domain_error("simulate_bounded: r_target shorter than one step");
    }

    const std::size_t lanes = (cfg.n_particles + kLaneSize - 1) / kLaneSize;

    struct LaneAcc {
        std::vector<std::uint64_t> y_counts;
        double max_abs_y = 0.0, max_abs_z = 0.0;
    };
    std::vector<LaneAcc> acc(lanes);

    run_lanes(lanes, resolve_thread_count(cfg.threads), [&](std::size_t lane) {
        LaneAcc& a = acc[lane];
        a.y_counts.assign(y_hist.bins, 0);

        const std::size_t begin = lane * kLaneSize;
        const std::size_t end = std::min(begin + kLaneSize, cfg.n_particles);

        std::mt19937_64 engine(lane_seed(cfg.seed, lane));
        std::normal_distribution<double> unit(0.0, 1.0);

        for (std::size_t i = begin; i < end; ++i) {
            double y = 0.0, z = 0.0;
            for (std::size_t k = 0; k < n_steps; ++k) {
                if (sd > 0.0) {
                    y = reflect_into(y + sd * unit(engine), -l, l);
                    z = reflect_into(z + sd * unit(engine), -l, l);
                }
                a.max_abs_y = std::max(a.max_abs_y, std::abs(y));
                a.max_abs_z = std::max(a.max_abs_z, std::abs(z));
            }
            const int b = bin_index(y, y_hist);
            if (b >= 0) {
                ++a.y_counts[static_cast<std::size_t>(b)];
            }
        }
    });

    BoundedOracleResult out;
    out.n_particles = cfg.n_particles;
    out.r = static_cast<double>(n_steps) * cfg.dt * params.diffusivity;
    out.y_counts.assign(y_hist.bins, 0);
    for (const LaneAcc& a : acc) {
        out.max_abs_y = std::max(out.max_abs_y, a.max_abs_y);
        out.max_abs_z = std::max(out.max_abs_z, a.max_abs_z);
        for (int b = 0; b < y_hist.bins; ++b) {
            out.y_counts[static_cast<std::size_t>(b)] += a.y_counts[static_cast<std::size_t>(b)];
        }
    }
    return out;
}

}  // namespace omc

// omcsim: odor molecular-communication channel simulator.
//
// Subcommands: simulate | sweep | validate | noise-report | oracle.
// Emits plot-ready CSV traces plus JSON reports; no embedded plotting.
// Exit codes: 0 success, 2 parse/config error, 3 numerical error.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "omc/config.hpp"
#include "omc/errors.hpp"
#include "omc/io.hpp"
#include "omc/metrics.hpp"
#include "omc/particle.hpp"
#include "omc/quadrature.hpp"
#include "omc/sequence.hpp"

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

struct GlobalOptions {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out_dir = ".";
};

omc::ScenarioConfig load_config(const GlobalOptions& opts) {
    if (opts.config_path.empty()) {
        throw omc::ParseError("--config is required");
    }
    omc::ScenarioConfig cfg = omc::load_scenario_file(opts.config_path);
    if (opts.seed) {
        cfg.seed = *opts.seed;
    }
    return cfg;
}

fs::path ensure_out_dir(const GlobalOptions& opts) {
    fs::path dir(opts.out_dir);
    fs::create_directories(dir);
    return dir;
}

std::map<std::string, std::string> trace_metadata(const omc::ScenarioConfig& cfg,
                                                  const std::string& quantity) {
    std::map<std::string, std::string> md;
    md["geometry"] =
        cfg.channel.geometry == omc::Geometry::Unbounded ? "unbounded" : "bounded_square";
    md["quantity"] = quantity;
    if (cfg.schedule.symbol_period > 0.0) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.9g", cfg.schedule.symbol_period);
        md["t_sym"] = buf;
    }
    return md;
}

void write_json(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot open \"" + path.string() + "\" for writing");
    }
    out << text;
}

struct ScenarioTraces {
    omc::ConcentrationTrace concentration;  // [mg/L]
    omc::VoltageTrace clean;
    omc::VoltageTrace noisy;
    std::uint64_t clipped = 0;
};

ScenarioTraces run_scenario(const omc::ScenarioConfig& cfg) {
    ScenarioTraces out;
    const omc::ConcentrationTrace mol =
        omc::superpose(cfg.channel, cfg.receiver_position, cfg.schedule, cfg.grid);
    out.concentration = omc::to_mg_per_l(mol, cfg.receiver.molar_mass);
    out.clean =
        omc::integrate_kinetics(cfg.receiver, out.concentration, omc::baseline_voltage(cfg.receiver));
    const omc::NoisyTrace noisy = omc::add_noise(cfg.receiver, out.clean, cfg.seed);
    out.noisy = noisy.trace;
    out.clipped = noisy.clipped;
    return out;
}

void write_scenario_traces(const fs::path& dir, const omc::ScenarioConfig& cfg,
                           const ScenarioTraces& traces) {
    omc::save_csv((dir / "concentration.csv").string(),
                  omc::to_raw(traces.concentration, trace_metadata(cfg, "concentration_mg_per_l")));
    omc::save_csv((dir / "voltage_clean.csv").string(),
                  omc::to_raw(traces.clean, trace_metadata(cfg, "voltage_v")));
    auto noisy_md = trace_metadata(cfg, "voltage_v_noisy");
    noisy_md["seed"] = std::to_string(cfg.seed);
    omc::save_csv((dir / "voltage_noisy.csv").string(), omc::to_raw(traces.noisy, noisy_md));
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

int cmd_simulate(const GlobalOptions& opts) {
    const omc::ScenarioConfig cfg = load_config(opts);
    const fs::path dir = ensure_out_dir(opts);
    const ScenarioTraces traces = run_scenario(cfg);
    write_scenario_traces(dir, cfg, traces);
    write_json(dir / "scenario.json", omc::to_json(cfg));
    std::cout << "wrote " << (dir / "concentration.csv").string() << ", voltage_clean.csv, "
              << "voltage_noisy.csv (seed " << cfg.seed << ", " << traces.clipped
              << " clipped samples)\n";
    return 0;
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

struct SweepSummary {
    double t_sym = 0.0;
    double baseline = 0.0;
    std::vector<double> peaks;
    std::vector<double> inter_pulse_minima;
    double drift_fraction = 0.0;
};

SweepSummary summarize_sequence(const omc::ScenarioConfig& cfg, const omc::VoltageTrace& v) {
    SweepSummary s;
    s.t_sym = cfg.schedule.symbol_period;
    s.baseline = v.samples.front();

    const double t_a = cfg.receiver_position.x / cfg.channel.flow_speed;
    const double t_p = cfg.schedule.pulse.duration;
    const auto& starts = cfg.schedule.starts;
    const auto index_at = [&](double t) {
        return static_cast<std::size_t>(
            std::clamp<double>(std::floor(t / v.dt), 0.0, static_cast<double>(v.size() - 1)));
    };

    for (std::size_t k = 0; k < starts.size(); ++k) {
        const std::size_t lo = index_at(starts[k] + t_a);
        const std::size_t hi =
            (k + 1 < starts.size()) ? index_at(starts[k + 1] + t_a) : v.size() - 1;
        s.peaks.push_back(*std::max_element(v.samples.begin() + lo, v.samples.begin() + hi + 1));
        if (k > 0) {
            const std::size_t gap_lo = index_at(starts[k - 1] + t_a + t_p);
            const std::size_t gap_hi = index_at(starts[k] + t_a);
            s.inter_pulse_minima.push_back(
                *std::min_element(v.samples.begin() + gap_lo, v.samples.begin() + gap_hi + 1));
        }
    }

    const double peak_max = *std::max_element(s.peaks.begin(), s.peaks.end());
    if (!s.inter_pulse_minima.empty() && peak_max > s.baseline) {
        s.drift_fraction = (s.inter_pulse_minima.back() - s.baseline) / (peak_max - s.baseline);
    }
    return s;
}

int cmd_sweep(const GlobalOptions& opts, const std::vector<double>& periods) {
    omc::ScenarioConfig base = load_config(opts);
    const fs::path dir = ensure_out_dir(opts);

    ordered_json summary = ordered_json::array();
    for (double t_sym : periods) {
        if (!(t_sym > 0.0)) {
            throw omc::ParseError("--tsym: symbol periods must be > 0");
        }
        omc::ScenarioConfig cfg = base;
        cfg.schedule = omc::make_regular_schedule(5, t_sym, base.schedule.pulse);
        cfg.grid.t_end =
            cfg.schedule.starts.back() + t_sym + 5.0 * cfg.receiver.tau_decay;
        omc::validate(cfg);

        char label[32];
        std::snprintf(label, sizeof(label), "tsym_%g", t_sym);
        const fs::path sub = dir / label;
        fs::create_directories(sub);

        const ScenarioTraces traces = run_scenario(cfg);
        write_scenario_traces(sub, cfg, traces);

        const SweepSummary s = summarize_sequence(cfg, traces.clean);
        ordered_json entry;
        entry["t_sym_s"] = s.t_sym;
        entry["baseline_v"] = s.baseline;
        entry["peaks_v"] = s.peaks;
        entry["inter_pulse_minima_v"] = s.inter_pulse_minima;
        entry["drift_fraction"] = s.drift_fraction;
        summary.push_back(entry);
        std::cout << label << ": drift fraction " << s.drift_fraction << "\n";
    }
    write_json(dir / "sweep_summary.json", summary.dump(2) + "\n");
    return 0;
}

// ---------------------------------------------------------------------------
// validate
// ---------------------------------------------------------------------------

int cmd_validate(const GlobalOptions& opts, const std::string& data_path) {
    const omc::ScenarioConfig cfg = load_config(opts);
    const fs::path dir = ensure_out_dir(opts);
    const omc::RawTrace raw = omc::load_csv(data_path);
    const omc::ValidationReport report = omc::validate_trace(raw, cfg);
    write_json(dir / "report.json", report.to_json());
    std::cout << "r = " << report.pearson_r << ", NRMSE = " << 100.0 * report.nrmse
              << "% (of " << report.nrmse_normalizer << "), peak error = "
              << 100.0 * report.peak_error << "% (of " << report.peak_error_normalizer
              << "), lag = " << report.alignment_lag << " s\n"
              << "wrote " << (dir / "report.json").string() << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// noise-report
// ---------------------------------------------------------------------------

int cmd_noise_report(const GlobalOptions& opts, const std::string& data_path) {
    const omc::ScenarioConfig cfg = load_config(opts);
    const fs::path dir = ensure_out_dir(opts);
    const omc::RawTrace raw = omc::load_csv(data_path);

    const omc::AlignedComparison cmp = omc::aligned_comparison(raw, cfg);
    const omc::VoltageTrace res = omc::residuals(cmp.exp_w, cmp.model_w);
    const omc::QQResult qq = omc::qq_against_normal(res.samples);

    // Histogram over the residual range; bin count follows sqrt(n), clamped.
    const auto [lo_it, hi_it] = std::minmax_element(res.samples.begin(), res.samples.end());
    const double lo = *lo_it, hi = *hi_it;
    const int bins = std::clamp<int>(
        static_cast<int>(std::ceil(std::sqrt(static_cast<double>(res.samples.size())))), 10, 200);
    const double width = (hi - lo) / bins;
    std::vector<std::uint64_t> counts(bins, 0);
    for (double x : res.samples) {
        int b = width > 0.0 ? static_cast<int>((x - lo) / width) : 0;
        b = std::clamp(b, 0, bins - 1);
        ++counts[static_cast<std::size_t>(b)];
    }

    {
        std::ofstream out(dir / "residual_hist.csv", std::ios::binary);
        out << "bin_left,bin_center,bin_right,count\n";
        char buf[128];
        for (int b = 0; b < bins; ++b) {
            const double left = lo + b * width;
            std::snprintf(buf, sizeof(buf), "%.9g,%.9g,%.9g,%llu\n", left, left + 0.5 * width,
                          left + width,
                          static_cast<unsigned long long>(counts[static_cast<std::size_t>(b)]));
            out << buf;
        }
    }
    {
        std::ofstream out(dir / "qq.csv", std::ios::binary);
        out << "theoretical_quantile,empirical_quantile\n";
        char buf[96];
        for (const auto& [tq, eq] : qq.points) {
            std::snprintf(buf, sizeof(buf), "%.9g,%.9g\n", tq, eq);
            out << buf;
        }
    }

    ordered_json j;
    j["residual_mean_v"] = omc::mean(res.samples);
    j["residual_std_v"] = omc::sample_std(res.samples);
    j["ks_p"] = qq.ks_p;
    j["qq_slope"] = qq.slope;
    j["qq_intercept"] = qq.intercept;
    j["alignment_lag_s"] = cmp.lag;
    j["n_residuals"] = res.samples.size();
    j["histogram_bins"] = bins;
    write_json(dir / "noise_report.json", j.dump(2) + "\n");
    std::cout << "ks_p = " << qq.ks_p << ", qq slope = " << qq.slope << "\nwrote "
              << (dir / "noise_report.json").string() << ", residual_hist.csv, qq.csv\n";
    return 0;
}

// ---------------------------------------------------------------------------
// oracle
// ---------------------------------------------------------------------------

struct BinComparison {
    double center = 0.0;
    double empirical = 0.0;
    double analytic = 0.0;
    double stderr_est = 0.0;
    bool pass = false;
};

void write_bins_csv(const fs::path& path, const std::vector<BinComparison>& bins) {
    std::ofstream out(path, std::ios::binary);
    out << "bin_center,empirical,analytic,stderr,pass\n";
    char buf[160];
    for (const auto& b : bins) {
        std::snprintf(buf, sizeof(buf), "%.9g,%.9g,%.9g,%.9g,%d\n", b.center, b.empirical,
                      b.analytic, b.stderr_est, b.pass ? 1 : 0);
        out << buf;
    }
}

int cmd_oracle(const GlobalOptions& opts, std::optional<std::size_t> particles,
               bool degenerate_k0) {
    omc::ScenarioConfig cfg = load_config(opts);
    const fs::path dir = ensure_out_dir(opts);

    omc::OracleConfig ocfg;
    ocfg.n_particles = particles.value_or(cfg.oracle.n_particles);
    ocfg.dt = cfg.oracle.dt;
    ocfg.seed = cfg.seed;
    ocfg.threads = cfg.oracle.threads;

    ordered_json j;
    j["n_particles"] = ocfg.n_particles;
    j["seed"] = ocfg.seed;
    const bool insufficient = ocfg.n_particles < 10000;
    j["insufficient_statistics"] = insufficient;
    if (insufficient) {
        std::cerr << "warning: n_particles = " << ocfg.n_particles
                  << " < 10000; statistics are unreliable\n";
    }

    if (degenerate_k0) {
        // Pure-advection self check: with K forced to zero every particle sits
        // at exactly x = u*t, so the receiver cell at that point captures all.
        omc::ChannelParams ch = cfg.channel;
        ch.geometry = omc::Geometry::Unbounded;
        ch.diffusivity = 0.0;
        const double t = 0.2;
        omc::ReceiverCell cell;
        cell.center = {ch.flow_speed * t, 0.0, 0.0};
        cell.half_x = cell.half_y = cell.half_z = 1e-9;
        const omc::HistogramSpec hist{1, -1.0, 1.0};
        const auto res = omc::simulate_unbounded(ch, ocfg, {t}, cell, hist);
        const bool exact = res.snapshots[0].cell_count == res.n_particles &&
                           res.snapshots[0].mean_x == ch.flow_speed * t;
        j["mode"] = "degenerate_k0";
        j["exact_match"] = exact;
        write_json(dir / "oracle_report.json", j.dump(2) + "\n");
        std::cout << "degenerate K=0 run: exact_match = " << (exact ? "true" : "false") << "\n";
        return exact ? 0 : 3;
    }

    std::vector<BinComparison> bins;
    std::size_t within = 0;

    if (cfg.channel.geometry == omc::Geometry::BoundedSquare) {
        const double l = cfg.channel.half_width;
        const double r = omc::travel_parameter(cfg.channel, cfg.receiver_position.x);
        const omc::HistogramSpec hist{cfg.oracle.y_bins, -l, l};
        const auto res = omc::simulate_bounded(cfg.channel, ocfg, r, hist);

        j["mode"] = "bounded_transverse_profile";
        j["r_m2"] = res.r;
        const double n = static_cast<double>(res.n_particles);
        for (int b = 0; b < hist.bins; ++b) {
            const double left = hist.min + b * hist.width();
            const double right = left + hist.width();
            const double p_expect =
                omc::gauss5([&](double y) { return omc::transverse_profile(res.r, y, l); }, left,
                            right);
            const double p_hat = static_cast<double>(res.y_counts[b]) / n;
            BinComparison cmp;
            cmp.center = 0.5 * (left + right);
            cmp.empirical = p_hat;
            cmp.analytic = p_expect;
            cmp.stderr_est = std::sqrt(std::max(p_expect * (1.0 - p_expect), 0.0) / n);
            cmp.pass = std::abs(p_hat - p_expect) <= 3.0 * cmp.stderr_est;
            within += cmp.pass;
            bins.push_back(cmp);
        }
        j["max_abs_y_m"] = res.max_abs_y;
        j["max_abs_z_m"] = res.max_abs_z;
        j["containment_ok"] = res.max_abs_y <= l && res.max_abs_z <= l;
    } else {
        // Transverse comparison at the advective arrival snapshot, where the
        // closed-form puff and the random walk coincide.
        const double u = cfg.channel.flow_speed;
        const double x_rx = cfg.receiver_position.x;
        const double t_snap =
            std::round(x_rx / u / ocfg.dt) * ocfg.dt;
        omc::ReceiverCell cell;
        cell.center = cfg.receiver_position;
        cell.half_x = cell.half_y = cell.half_z = 0.02;
        const double r = omc::travel_parameter(cfg.channel, x_rx);
        const double y_span = 2.0 * std::sqrt(2.0 * r);
        const omc::HistogramSpec hist{cfg.oracle.y_bins, -y_span, y_span};
        const auto res = omc::simulate_unbounded(cfg.channel, ocfg, {t_snap}, cell, hist);
        const auto& snap = res.snapshots[0];

        j["mode"] = "unbounded_arrival_snapshot";
        j["snapshot_time_s"] = t_snap;

        // Expected probability of one particle landing in (x-slab, y-bin,
        // z-slab) from the closed-form concentration / M.
        const double n = static_cast<double>(res.n_particles);
        const auto cell_probability = [&](double y_lo, double y_hi) {
            return omc::gauss5(
                [&](double x) {
                    return omc::gauss5(
                        [&](double y) {
                            return omc::gauss5(
                                [&](double z) {
                                    omc::SpacePoint p{x, y, z};
                                    return omc::unbounded_impulse(cfg.channel, p, t_snap) /
                                           cfg.channel.released_mol;
                                },
                                cell.center.z - cell.half_z, cell.center.z + cell.half_z);
                        },
                        y_lo, y_hi);
                },
                cell.center.x - cell.half_x, cell.center.x + cell.half_x);
        };

        for (int b = 0; b < hist.bins; ++b) {
            const double left = hist.min + b * hist.width();
            const double right = left + hist.width();
            const double p_expect = cell_probability(left, right);
            const double p_hat = static_cast<double>(snap.slab_y_counts[b]) / n;
            BinComparison cmp;
            cmp.center = 0.5 * (left + right);
            cmp.empirical = p_hat;
            cmp.analytic = p_expect;
            cmp.stderr_est = std::sqrt(std::max(p_expect * (1.0 - p_expect), 0.0) / n);
            cmp.pass = std::abs(p_hat - p_expect) <= 3.0 * cmp.stderr_est;
            within += cmp.pass;
            bins.push_back(cmp);
        }

        const double p_cell = cell_probability(cell.center.y - cell.half_y,
                                               cell.center.y + cell.half_y);
        const double expected_conc =
            p_cell * cfg.channel.released_mol / cell.volume();
        const double se_conc = cfg.channel.released_mol / cell.volume() *
                               std::sqrt(std::max(p_cell * (1.0 - p_cell), 0.0) / n);
        j["cell_concentration_mol_per_m3"] = snap.cell_concentration;
        j["cell_concentration_expected_mol_per_m3"] = expected_conc;
        j["cell_concentration_stderr"] = se_conc;
        j["cell_within_3se"] =
            std::abs(snap.cell_concentration - expected_conc) <= 3.0 * se_conc;
        j["mean_x_m"] = snap.mean_x;
        j["mean_x_expected_m"] = u * t_snap;
    }

    const double fraction = bins.empty() ? 0.0
                                         : static_cast<double>(within) /
                                               static_cast<double>(bins.size());
    j["bins_total"] = bins.size();
    j["bins_within_3se"] = within;
    j["fraction_within_3se"] = fraction;
    j["pass"] = fraction >= 0.95;

    write_bins_csv(dir / "oracle_bins.csv", bins);
    write_json(dir / "oracle_report.json", j.dump(2) + "\n");
    std::cout << "bins within 3 SE: " << within << "/" << bins.size() << " ("
              << 100.0 * fraction << "%)\nwrote " << (dir / "oracle_report.json").string()
              << ", oracle_bins.csv\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"odor molecular-communication channel simulator"};
    app.require_subcommand(1);

    GlobalOptions opts;
    std::uint64_t seed_value = 0;
    app.add_option("--config", opts.config_path, "scenario config JSON path");
    auto* seed_opt = app.add_option("--seed", seed_value, "override the config seed");
    app.add_option("--out", opts.out_dir, "output directory (created if missing)");

    auto* sim = app.add_subcommand("simulate", "one scenario: concentration + voltage traces");

    std::vector<double> periods{300.0, 150.0, 75.0, 30.0, 10.0};
    auto* sweep = app.add_subcommand("sweep", "five-pulse sequences over symbol periods");
    sweep->add_option("--tsym", periods, "symbol periods [s]")->delimiter(',');

    std::string data_path;
    auto* validate = app.add_subcommand("validate", "compare a measured CSV against the model");
    validate->add_option("data", data_path, "measured trace CSV")->required();

    std::string noise_data_path;
    auto* noise = app.add_subcommand("noise-report", "residual histogram + Q-Q analysis");
    noise->add_option("data", noise_data_path, "measured trace CSV")->required();

    std::optional<std::size_t> particles;
    std::size_t particles_value = 0;
    bool degenerate_k0 = false;
    auto* oracle = app.add_subcommand("oracle", "Monte Carlo check of the analytic channel");
    auto* particles_opt = oracle->add_option("--particles", particles_value, "particle count");
    oracle->add_flag("--degenerate-k0", degenerate_k0, "pure-advection exactness self check");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    if (*seed_opt) {
        opts.seed = seed_value;
    }
    if (*particles_opt) {
        particles = particles_value;
    }

    try {
        if (*sim) {
            return cmd_simulate(opts);
        }
        if (*sweep) {
            return cmd_sweep(opts, periods);
        }
        if (*validate) {
            return cmd_validate(opts, data_path);
        }
        if (*noise) {
            return cmd_noise_report(opts, noise_data_path);
        }
        if (*oracle) {
            return cmd_oracle(opts, particles, degenerate_k0);
        }
    } catch (const omc::NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    } catch (const omc::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

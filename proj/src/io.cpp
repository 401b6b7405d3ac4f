#include "omc/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "omc/errors.hpp"

namespace omc {

namespace {

constexpr const char* kHeader = "time_s,voltage_v";

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t");
    if (begin == std::string::npos) {
        return "";
    }
    const auto end = s.find_last_not_of(" \t");
    return s.substr(begin, end - begin + 1);
}

double parse_cell(const std::string& cell, std::size_t line) {
    const std::string c = trim(cell);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(c.data(), c.data() + c.size(), value);
    if (ec != std::errc{} || ptr != c.data() + c.size()) {
        throw ParseError("non-numeric cell \"" + cell + "\"", line);
    }
    if (!std::isfinite(value)) {
        throw ParseError("non-finite value \"" + cell + "\"", line);
    }
    return value;
}

std::string format_g9(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

}  // namespace

RawTrace parse_csv(std::istream& in) {
    RawTrace trace;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        if (line.front() == '#') {
            const std::string body = trim(line.substr(1));
            const auto colon = body.find(':');
            if (colon != std::string::npos) {
                const std::string key = trim(body.substr(0, colon));
                const std::string value = trim(body.substr(colon + 1));
                if (!key.empty()) {
                    trace.metadata[key] = value;
                }
            }
            continue;
        }
        if (!header_seen) {
            if (line != kHeader) {
                throw ParseError("expected header \"" + std::string(kHeader) + "\", got \"" +
                                     line + "\"",
                                 line_no);
            }
            header_seen = true;
            continue;
        }
        const auto comma = line.find(',');
        if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos) {
            throw ParseError("expected exactly two comma-separated cells", line_no);
        }
        const double t = parse_cell(line.substr(0, comma), line_no);
        const double v = parse_cell(line.substr(comma + 1), line_no);
        if (!trace.timestamps.empty() && !(t > trace.timestamps.back())) {
            throw ParseError("timestamp " + format_g9(t) +
                                 " does not increase past the previous row",
                             line_no);
        }
        trace.timestamps.push_back(t);
        trace.values.push_back(v);
    }

    if (!header_seen) {
        throw ParseError("missing header \"" + std::string(kHeader) + "\"", line_no);
    }
    if (trace.timestamps.empty()) {
        throw ParseError("no data rows", line_no);
    }
    return trace;
}

RawTrace load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open \"" + path + "\"");
    }
    try {
        return parse_csv(in);
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what(), e.line());
    }
}

void write_csv(std::ostream& out, const RawTrace& trace) {
    for (const auto& [key, value] : trace.metadata) {
        out << "# " << key << ": " << value << "\n";
    }
    out << kHeader << "\n";
    for (std::size_t i = 0; i < trace.size(); ++i) {
        out << format_g9(trace.timestamps[i]) << ',' << format_g9(trace.values[i]) << "\n";
    }
}

void save_csv(const std::string& path, const RawTrace& trace) {
    std::ofstream out(path, std::ios::binary);  // LF line endings on all platforms
    if (!out) {
        throw std::runtime_error("save_csv: cannot open \"" + path + "\" for writing");
    }
    write_csv(out, trace);
    if (!out) {
        throw std::runtime_error("save_csv: write failed for \"" + path + "\"");
    }
}

RawTrace to_raw(const VoltageTrace& trace, const std::map<std::string, std::string>& metadata) {
    RawTrace raw;
    raw.metadata = metadata;
    raw.timestamps.reserve(trace.size());
    raw.values = trace.samples;
    for (std::size_t k = 0; k < trace.size(); ++k) {
        raw.timestamps.push_back(trace.time(k));
    }
    return raw;
}

RawTrace to_raw(const ConcentrationTrace& trace,
                const std::map<std::string, std::string>& metadata) {
    RawTrace raw;
    raw.metadata = metadata;
    raw.timestamps.reserve(trace.size());
    raw.values = trace.samples;
    for (std::size_t k = 0; k < trace.size(); ++k) {
        raw.timestamps.push_back(trace.time(k));
    }
    return raw;
}

VoltageTrace resample(const RawTrace& raw, double t0, double dt, std::size_t n) {
    if (raw.size() < 2) {
        throw std::domain_error("resample: need at least two raw samples");
    }
    if (!(dt > 0.0)) {
        throw std::domain_error("resample: dt must be > 0");
    }
    VoltageTrace out;
    out.t0 = t0;
    out.dt = dt;
    out.samples.reserve(n);

    const double lo = raw.timestamps.front();
    const double hi = raw.timestamps.back();
    const double slack = 1e-9 * std::max(1.0, std::abs(hi));

    for (std::size_t k = 0; k < n; ++k) {
        double t = t0 + static_cast<double>(k) * dt;
        if (t < lo - slack || t > hi + slack) {
            std::ostringstream msg;
            msg << "resample: t = " << t << " outside the raw span [" << lo << ", " << hi
                << "] (extrapolation refused)";
            throw std::domain_error(msg.str());
        }
        t = std::clamp(t, lo, hi);
        const auto it = std::upper_bound(raw.timestamps.begin(), raw.timestamps.end(), t);
        const std::size_t j = it == raw.timestamps.end()
                                  ? raw.size() - 1
                                  : std::max<std::size_t>(1, it - raw.timestamps.begin());
        const double t_lo = raw.timestamps[j - 1];
        const double t_hi = raw.timestamps[j];
        const double w = (t - t_lo) / (t_hi - t_lo);
        out.samples.push_back(raw.values[j - 1] + w * (raw.values[j] - raw.values[j - 1]));
    }
    return out;
}

VoltageTrace resample(const RawTrace& raw, const SimulationGrid& grid) {
    return resample(raw, 0.0, grid.dt, grid.size());
}

namespace {

/// Pearson correlation of exp[k] vs model[k + shift] over the valid overlap;
/// returns nullopt when a window is flat.
std::optional<double> shifted_correlation(const std::vector<double>& e,
                                          const std::vector<double>& m, long shift) {
    const long n = static_cast<long>(e.size());
    const long k_begin = std::max(0L, -shift);
    const long k_end = n - std::max(0L, shift);
    if (k_end - k_begin < 2) {
        return std::nullopt;
    }
    double se = 0.0, sm = 0.0;
    const double cnt = static_cast<double>(k_end - k_begin);
    for (long k = k_begin; k < k_end; ++k) {
        se += e[static_cast<std::size_t>(k)];
        sm += m[static_cast<std::size_t>(k + shift)];
    }
    const double me = se / cnt;
    const double mm = sm / cnt;
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (long k = k_begin; k < k_end; ++k) {
        const double da = e[static_cast<std::size_t>(k)] - me;
        const double db = m[static_cast<std::size_t>(k + shift)] - mm;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if (saa == 0.0 || sbb == 0.0) {
        return std::nullopt;
    }
    return sab / std::sqrt(saa * sbb);
}

}  // namespace

double align(const VoltageTrace& exp_trace, const VoltageTrace& model_trace, double max_lag) {
    if (exp_trace.size() != model_trace.size() || exp_trace.size() < 2) {
        throw std::invalid_argument("align: traces must share a grid of >= 2 samples");
    }
    if (std::abs(exp_trace.dt - model_trace.dt) > 1e-12 * exp_trace.dt ||
        std::abs(exp_trace.t0 - model_trace.t0) > 1e-9) {
        throw std::invalid_argument("align: traces must share t0 and dt");
    }
    if (max_lag < 0.0) {
        throw std::invalid_argument("align: max_lag must be >= 0");
    }

    const long n = static_cast<long>(exp_trace.size());
    const long max_shift =
        std::min<long>(static_cast<long>(max_lag / exp_trace.dt + 1e-9), n - 2);

    bool any = false;
    long best_shift = 0;
    double best_corr = -2.0;
    // Scan 0, +1, -1, +2, -2, ... so ties resolve to the smallest |lag|.
    for (long mag = 0; mag <= max_shift; ++mag) {
        for (long shift : {mag, -mag}) {
            if (mag == 0 && shift < 0) {
                continue;
            }
            const auto corr = shifted_correlation(exp_trace.samples, model_trace.samples, shift);
            if (!corr) {
                continue;
            }
            any = true;
            if (*corr > best_corr) {
                best_corr = *corr;
                best_shift = shift;
            }
        }
    }
    if (!any) {
        throw std::domain_error("align: correlation undefined (flat traces)");
    }
    return -static_cast<double>(best_shift) * exp_trace.dt;
}

AlignedComparison aligned_comparison(const RawTrace& exp_trace, const ScenarioConfig& config) {
    const VoltageTrace model = end_to_end(config.channel, config.receiver,
                                          config.receiver_position, config.schedule, config.grid);
    VoltageTrace exp_v = resample(exp_trace, config.grid);

    AlignedComparison out;
    for (double& s : exp_v.samples) {
        if (s < 0.0) {
            s = 0.0;
            ++out.sanitized_samples;
        } else if (s > config.receiver.circuit_voltage) {
            s = config.receiver.circuit_voltage;
            ++out.sanitized_samples;
        }
    }

    long shift = 0;
    if (config.align_max_lag > 0.0) {
        out.lag = align(exp_v, model, config.align_max_lag);
        shift = std::lround(-out.lag / exp_v.dt);
    }

    // Windowed views on the aligned overlap, both stamped on the measured clock.
    const long n = static_cast<long>(exp_v.size());
    const long k_begin = std::max(0L, -shift);
    const long k_end = n - std::max(0L, shift);
    if (k_end - k_begin < 2) {
        throw std::domain_error("validate: aligned overlap too short");
    }
    out.exp_w.dt = out.model_w.dt = exp_v.dt;
    out.exp_w.t0 = out.model_w.t0 = exp_v.t0 + static_cast<double>(k_begin) * exp_v.dt;
    for (long k = k_begin; k < k_end; ++k) {
        out.exp_w.samples.push_back(exp_v.samples[static_cast<std::size_t>(k)]);
        out.model_w.samples.push_back(model.samples[static_cast<std::size_t>(k + shift)]);
    }
    return out;
}

ValidationReport validate_trace(const RawTrace& exp_trace, const ScenarioConfig& config) {
    const AlignedComparison cmp = aligned_comparison(exp_trace, config);

    ValidationReport report;
    report.alignment_lag = cmp.lag;
    report.sanitized_samples = cmp.sanitized_samples;
    report.pearson_r = pearson(cmp.exp_w.samples, cmp.model_w.samples);
    report.nrmse = nrmse(cmp.model_w.samples, cmp.exp_w.samples);
    report.nrmse_normalizer = "range(experiment)";
    report.peak_error = peak_error(cmp.exp_w.samples, cmp.model_w.samples);
    report.peak_error_normalizer = "max(model)";

    const VoltageTrace res = residuals(cmp.exp_w, cmp.model_w);
    report.residual_mean = mean(res.samples);
    report.residual_std = sample_std(res.samples);

    const QQResult qq = qq_against_normal(res.samples);
    report.ks_p = qq.ks_p;
    report.qq_slope = qq.slope;
    const std::size_t stride = std::max<std::size_t>(1, qq.points.size() / 256);
    for (std::size_t i = 0; i < qq.points.size(); i += stride) {
        report.qq_points.push_back(qq.points[i]);
    }
    return report;
}

}  // namespace omc

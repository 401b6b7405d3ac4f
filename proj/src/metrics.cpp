#include "omc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "json.hpp"

namespace omc {

namespace {

constexpr double kPi = 3.14159265358979323846;

double std_normal_cdf(double x) {
    return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

}  // namespace

double mean(std::span<const double> xs) {
    if (xs.empty()) {
        throw std::domain_error("mean: empty input");
    }
    double sum = 0.0;
    for (double x : xs) {
        sum += x;
    }
    return sum / static_cast<double>(xs.size());
}

double sample_std(std::span<const double> xs) {
    if (xs.size() < 2) {
        throw std::domain_error("sample_std: need at least two samples");
    }
    const double m = mean(xs);
    double ss = 0.0;
    for (double x : xs) {
        ss += (x - m) * (x - m);
    }
    return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

double pearson(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw std::invalid_argument("pearson: length mismatch");
    }
    if (a.size() < 2) {
        throw std::domain_error("pearson: need at least two samples");
    }
    const double ma = mean(a);
    const double mb = mean(b);
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double da = a[i] - ma;
        const double db = b[i] - mb;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if (saa == 0.0 || sbb == 0.0) {
        throw std::domain_error("pearson: undefined for a zero-variance input");
    }
    return sab / std::sqrt(saa * sbb);
}

double nrmse(std::span<const double> model, std::span<const double> ref) {
    if (model.size() != ref.size()) {
        throw std::invalid_argument("nrmse: length mismatch");
    }
    if (ref.empty()) {
        throw std::domain_error("nrmse: empty input");
    }
    const auto [lo, hi] = std::minmax_element(ref.begin(), ref.end());
    const double range = *hi - *lo;
    if (range <= 0.0) {
        throw std::domain_error("nrmse: flat reference trace has zero range");
    }
    double ss = 0.0;
    for (std::size_t i = 0; i < model.size(); ++i) {
        const double d = model[i] - ref[i];
        ss += d * d;
    }
    return std::sqrt(ss / static_cast<double>(model.size())) / range;
}

double peak_error(std::span<const double> model, std::span<const double> ref) {
    if (model.empty() || ref.empty()) {
        throw std::domain_error("peak_error: empty input");
    }
    const double peak_model = *std::max_element(model.begin(), model.end());
    const double peak_ref = *std::max_element(ref.begin(), ref.end());
    if (peak_ref <= 0.0) {
        throw std::domain_error("peak_error: reference peak must be > 0");
    }
    return std::abs(peak_model - peak_ref) / peak_ref;
}

VoltageTrace residuals(const VoltageTrace& exp_trace, const VoltageTrace& model_trace) {
    if (exp_trace.size() != model_trace.size()) {
        throw std::invalid_argument("residuals: length mismatch; resample first");
    }
    const double dt_scale = std::max(std::abs(exp_trace.dt), std::abs(model_trace.dt));
    if (std::abs(exp_trace.dt - model_trace.dt) > 1e-12 * dt_scale ||
        std::abs(exp_trace.t0 - model_trace.t0) > 1e-9) {
        throw std::invalid_argument("residuals: grid mismatch; resample first");
    }
    VoltageTrace out;
    out.t0 = exp_trace.t0;
    out.dt = exp_trace.dt;
    out.samples.resize(exp_trace.size());
    for (std::size_t i = 0; i < out.samples.size(); ++i) {
        out.samples[i] = exp_trace.samples[i] - model_trace.samples[i];
    }
    return out;
}

double normal_quantile(double p) {
    if (!(p > 0.0) || !(p < 1.0)) {
        throw std::domain_error("normal_quantile: p must lie in (0, 1)");
    }

    // Acklam's rational approximation, then two Halley steps on erfc to reach
    // machine accuracy.
    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                   -2.759285104469687e+02, 1.383577518672690e+02,
                                   -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                   -1.556989798598866e+02, 6.680131188771972e+01,
                                   -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                   -2.400758277161838e+00, -2.549732539343734e+00,
                                   4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                   2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double p_low = 0.02425;

    double x;
    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - p_low) {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }

    for (int iter = 0; iter < 2; ++iter) {
        const double e = std_normal_cdf(x) - p;
        const double u = e * std::sqrt(2.0 * kPi) * std::exp(0.5 * x * x);
        x -= u / (1.0 + 0.5 * x * u);
    }
    return x;
}

double kolmogorov_q(double lambda) {
    if (lambda <= 0.0) {
        return 1.0;
    }
    double sum = 0.0;
    double sign = 1.0;
    for (int j = 1; j <= 200; ++j) {
        const double term = std::exp(-2.0 * j * j * lambda * lambda);
        sum += sign * term;
        if (term < 1e-16) {
            break;
        }
        sign = -sign;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

QQResult qq_against_normal(std::span<const double> residual_samples) {
    const std::size_t n = residual_samples.size();
    if (n < 20) {
        throw std::domain_error("qq_against_normal: need at least 20 residuals");
    }
    const double m = mean(residual_samples);
    const double s = sample_std(residual_samples);
    if (s == 0.0) {
        throw std::domain_error("qq_against_normal: zero-variance residuals");
    }

    std::vector<double> sorted(residual_samples.begin(), residual_samples.end());
    std::sort(sorted.begin(), sorted.end());

    QQResult out;
    out.points.reserve(n);
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double pp = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
        const double tq = normal_quantile(pp);
        const double eq = (sorted[i] - m) / s;
        out.points.emplace_back(tq, eq);
        sx += tq;
        sy += eq;
        sxx += tq * tq;
        sxy += tq * eq;
    }
    const double dn = static_cast<double>(n);
    const double denom = dn * sxx - sx * sx;
    out.slope = (dn * sxy - sx * sy) / denom;
    out.intercept = (sy - out.slope * sx) / dn;

    // KS distance against N(0, s^2): composite null with estimated scale, so
    // the p-value is indicative rather than exact.
    double d_stat = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double f = std_normal_cdf(sorted[i] / s);
        const double hi = (static_cast<double>(i) + 1.0) / dn - f;
        const double lo = f - static_cast<double>(i) / dn;
        d_stat = std::max({d_stat, hi, lo});
    }
    const double sqrt_n = std::sqrt(dn);
    out.ks_p = kolmogorov_q((sqrt_n + 0.12 + 0.11 / sqrt_n) * d_stat);
    return out;
}

std::string ValidationReport::to_json() const {
    nlohmann::ordered_json j;
    j["pearson_r"] = pearson_r;
    j["nrmse"] = nrmse;
    j["nrmse_normalizer"] = nrmse_normalizer;
    j["peak_error"] = peak_error;
    j["peak_error_normalizer"] = peak_error_normalizer;
    j["residual_mean_v"] = residual_mean;
    j["residual_std_v"] = residual_std;
    j["ks_p"] = ks_p;
    j["qq_slope"] = qq_slope;
    j["alignment_lag_s"] = alignment_lag;
    j["sanitized_samples"] = sanitized_samples;
    auto& pts = j["qq_points"] = nlohmann::ordered_json::array();
    for (const auto& [tq, eq] : qq_points) {
        pts.push_back({tq, eq});
    }
    return j.dump(2) + "\n";
}

}  // namespace omc

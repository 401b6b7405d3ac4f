#ifndef OMC_METRICS_HPP
#define OMC_METRICS_HPP

/**
 * @file metrics.hpp
 * @brief Validation statistics for comparing measured and modeled traces:
 *        Pearson correlation, range-normalized RMSE, peak amplitude error,
 *        residual analysis and Q-Q / Kolmogorov-Smirnov normality checks.
 */

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "omc/trace.hpp"

namespace omc {

struct QQResult {
    std::vector<std::pair<double, double>> points;  // (theoretical, empirical) quantiles
    double ks_p = 0.0;       // KS p-value against N(0, s^2), s estimated
    double slope = 0.0;      // least-squares slope of empirical vs theoretical
    double intercept = 0.0;
};

/// Metric bundle produced by a validation run.
struct ValidationReport {
    double pearson_r = 0.0;
    double nrmse = 0.0;                      // normalized by the reference range
    std::string nrmse_normalizer = "range(reference)";
    double peak_error = 0.0;
    std::string peak_error_normalizer;
    double residual_mean = 0.0;              // [V]
    double residual_std = 0.0;               // [V]
    double ks_p = 0.0;
    double qq_slope = 0.0;
    double alignment_lag = 0.0;              // [s] applied to the model trace
    std::uint64_t sanitized_samples = 0;     // experimental samples clipped into [0, V_c]
    std::vector<std::pair<double, double>> qq_points;

    std::string to_json() const;
};

/// Product-moment correlation. Requires equal lengths >= 2 and nonzero
/// variance in both inputs (throws std::domain_error otherwise).
double pearson(std::span<const double> a, std::span<const double> b);

/// RMSE(model, ref) / (max(ref) - min(ref)). Flat reference is an error.
double nrmse(std::span<const double> model, std::span<const double> ref);

/// |max(model) - max(ref)| / max(ref). Peak timing is ignored.
double peak_error(std::span<const double> model, std::span<const double> ref);

/// Pointwise difference exp - model on a shared grid (t0 and dt must match).
VoltageTrace residuals(const VoltageTrace& exp_trace, const VoltageTrace& model_trace);

/**
 * @brief Q-Q data and KS test of residuals against a normal distribution.
 *
 * Empirical quantiles are the sorted standardized residuals; theoretical
 * quantiles use plotting positions (i - 0.5)/n. The KS statistic is taken
 * against N(0, s^2) with s^2 the sample variance, so the p-value is
 * indicative (composite null), not exact. Requires n >= 20 and nonzero
 * variance.
 */
QQResult qq_against_normal(std::span<const double> residual_samples);

/// Inverse standard normal CDF (Acklam's rational approximation polished with
/// one Halley step on erfc); |error| well below 1e-12 over (0, 1).
double normal_quantile(double p);

/// Kolmogorov survival function Q(lambda) = 2 Sum (-1)^{j-1} exp(-2 j^2 lambda^2).
double kolmogorov_q(double lambda);

double mean(std::span<const double> xs);
double sample_std(std::span<const double> xs);  // n-1 denominator

}  // namespace omc

#endif  // OMC_METRICS_HPP

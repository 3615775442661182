#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "swarmfence/rng.hpp"

namespace swarmfence {

// Exponential attenuation with an ambient floor:
//   A(d) = A0 * exp(-alpha * d) + Ae
// plus multiplicative sensor noise A(d) * (1 - N(0, sigma_rel)).
struct SignalModel {
    double A0 = 140.5193;     // intensity at the source
    double alpha = 0.1193;    // attenuation per metre
    double Ae = 48.1824;      // ambient intensity
    double sigma_rel = 0.06;  // relative noise std

    bool valid() const { return A0 > 0.0 && alpha > 0.0 && Ae >= 0.0 && sigma_rel >= 0.0; }
};

double attenuated_intensity(const SignalModel& model, double d);
double noisy_sample(const SignalModel& model, double d, RngStream& rng);

// threshold A(d_c) below which chemotaxis activates
double threshold_for_distance(const SignalModel& model, double d_c);

// Inverse of the attenuation curve. Requires Ae < A <= A0 + Ae; throws
// std::domain_error otherwise (at or below ambient there is no finite
// distance; above source intensity the distance would be negative).
double distance_for_intensity(const SignalModel& model, double A);

// Fixed-capacity ring buffer of the last n raw samples with a running sum.
// Before n samples exist the mean is taken over what is there.
class FilterWindow {
public:
    explicit FilterWindow(int capacity);

    void push(double sample);
    double mean() const;  // requires size() >= 1
    int size() const { return size_; }
    int capacity() const { return static_cast<int>(buffer_.size()); }
    void clear();

private:
    std::vector<double> buffer_;
    int head_ = 0;
    int size_ = 0;
    double running_sum_ = 0.0;
};

inline double filtered_intensity(const FilterWindow& window) { return window.mean(); }

struct CalibrationData {
    std::vector<double> distance_m;
    std::vector<double> intensity;

    std::size_t size() const { return distance_m.size(); }
};

CalibrationData load_calibration_csv(const std::string& path);

struct FitResult {
    SignalModel model;       // A0, alpha, Ae fitted; sigma_rel untouched
    double residual_norm = 0.0;
    int iterations = 0;
    bool converged = false;
};

// Levenberg-Marquardt fit of the attenuation curve with analytic Jacobian.
// Requires >= 3 samples over >= 2 distinct distances; throws
// std::invalid_argument on degenerate input. Non-convergence is reported
// in the result, not thrown.
FitResult fit_attenuation(const CalibrationData& data,
                          int max_iterations = 200,
                          double tolerance = 1e-12);

struct SegmentStats {
    double d_lo = 0.0;
    double d_hi = 0.0;
    std::size_t count = 0;
    double line_slope = 0.0;
    double line_intercept = 0.0;
    double residual_std = 0.0;
    double fitted_mean = 0.0;  // mean of the fitted line over the segment
    double raw_mean = 0.0;     // mean of the raw samples (reported alongside)
    double ratio = 0.0;        // residual_std / fitted_mean
};

struct NoiseRatioResult {
    std::vector<SegmentStats> segments;
    double pooled_ratio = 0.0;  // mean of per-segment ratios
    std::vector<std::string> notices;  // skipped-segment messages
};

// Splits data into segments of segment_len metres, fits an OLS line per
// segment and reports residual std over fitted-line mean per segment plus
// the pooled ratio. Segments with < 2 samples are skipped with a notice.
NoiseRatioResult noise_ratio_analysis(const CalibrationData& data, double segment_len);

}  // namespace swarmfence

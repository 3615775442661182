#include "swarmfence/signal_model.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace swarmfence {

double attenuated_intensity(const SignalModel& model, double d) {
    assert(d >= 0.0);
    return model.A0 * std::exp(-model.alpha * d) + model.Ae;
}

double noisy_sample(const SignalModel& model, double d, RngStream& rng) {
    return attenuated_intensity(model, d) * (1.0 - rng.normal(0.0, model.sigma_rel));
}

double threshold_for_distance(const SignalModel& model, double d_c) {
    return attenuated_intensity(model, d_c);
}

double distance_for_intensity(const SignalModel& model, double A) {
    if (A <= model.Ae)
        throw std::domain_error("distance_for_intensity: intensity at or below ambient floor");
    if (A > model.A0 + model.Ae)
        throw std::domain_error("distance_for_intensity: intensity above source intensity");
    return -std::log((A - model.Ae) / model.A0) / model.alpha;
}

FilterWindow::FilterWindow(int capacity) : buffer_(static_cast<std::size_t>(std::max(capacity, 1))) {}

void FilterWindow::push(double sample) {
    if (size_ == capacity()) {
        running_sum_ -= buffer_[static_cast<std::size_t>(head_)];
    } else {
        ++size_;
    }
    buffer_[static_cast<std::size_t>(head_)] = sample;
    running_sum_ += sample;
    head_ = (head_ + 1) % capacity();
}

double FilterWindow::mean() const {
    assert(size_ >= 1);
    return running_sum_ / size_;
}

void FilterWindow::clear() {
    head_ = 0;
    size_ = 0;
    running_sum_ = 0.0;
}

CalibrationData load_calibration_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("calibration: cannot open '" + path + "'");
    CalibrationData data;
    std::string line;
    if (!std::getline(in, line) || line.rfind("distance_m,intensity", 0) != 0)
        throw std::runtime_error("calibration: expected header 'distance_m,intensity'");
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ss(line);
        double d, a;
        char comma;
        if (!(ss >> d >> comma >> a) || comma != ',')
            throw std::runtime_error("calibration: bad row at line " + std::to_string(lineno));
        if (d < 0.0)
            throw std::runtime_error("calibration: negative distance at line " + std::to_string(lineno));
        data.distance_m.push_back(d);
        data.intensity.push_back(a);
    }
    return data;
}

namespace {

// Solves the 3x3 normal equations (J^T J + lambda diag(J^T J)) delta = -J^T r
// by Gaussian elimination with partial pivoting.
bool solve3(double a[3][3], double b[3], double x[3]) {
    int idx[3] = {0, 1, 2};
    for (int col = 0; col < 3; ++col) {
        int piv = col;
        for (int r = col + 1; r < 3; ++r)
            if (std::abs(a[idx[r]][col]) > std::abs(a[idx[piv]][col])) piv = r;
        std::swap(idx[col], idx[piv]);
        double p = a[idx[col]][col];
        if (std::abs(p) < 1e-300) return false;
        for (int r = col + 1; r < 3; ++r) {
            double f = a[idx[r]][col] / p;
            for (int c = col; c < 3; ++c) a[idx[r]][c] -= f * a[idx[col]][c];
            b[idx[r]] -= f * b[idx[col]];
        }
    }
    for (int row = 2; row >= 0; --row) {
        double s = b[idx[row]];
        for (int c = row + 1; c < 3; ++c) s -= a[idx[row]][c] * x[c];
        x[row] = s / a[idx[row]][row];
    }
    return true;
}

double sum_sq_residuals(const CalibrationData& data, double A0, double alpha, double Ae) {
    double ssr = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        double r = A0 * std::exp(-alpha * data.distance_m[i]) + Ae - data.intensity[i];
        ssr += r * r;
    }
    return ssr;
}

}  // namespace

FitResult fit_attenuation(const CalibrationData& data, int max_iterations, double tolerance) {
    if (data.size() < 3)
        throw std::invalid_argument("fit_attenuation: need at least 3 samples");
    double dmin = data.distance_m[0], dmax = data.distance_m[0];
    double ymin = data.intensity[0], ymax = data.intensity[0];
    for (std::size_t i = 0; i < data.size(); ++i) {
        dmin = std::min(dmin, data.distance_m[i]);
        dmax = std::max(dmax, data.distance_m[i]);
        ymin = std::min(ymin, data.intensity[i]);
        ymax = std::max(ymax, data.intensity[i]);
    }
    if (dmax - dmin <= 0.0)
        throw std::invalid_argument("fit_attenuation: samples span a single distance");

    // Initial guess: ambient from the floor of the data, amplitude from its
    // range, a moderate decay rate.
    double Ae = ymin;
    double A0 = std::max(ymax - ymin, 1e-6);
    double alpha = 0.1;

    double lambda = 1e-3;
    double ssr = sum_sq_residuals(data, A0, alpha, Ae);
    FitResult result;
    int iter = 0;
    for (; iter < max_iterations; ++iter) {
        // Accumulate J^T J and J^T r with analytic derivatives:
        // dA/dA0 = exp(-alpha d), dA/dalpha = -A0 d exp(-alpha d), dA/dAe = 1.
        double jtj[3][3] = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};
        double jtr[3] = {0, 0, 0};
        for (std::size_t i = 0; i < data.size(); ++i) {
            double d = data.distance_m[i];
            double e = std::exp(-alpha * d);
            double r = A0 * e + Ae - data.intensity[i];
            double g[3] = {e, -A0 * d * e, 1.0};
            for (int a = 0; a < 3; ++a) {
                jtr[a] += g[a] * r;
                for (int b = 0; b < 3; ++b) jtj[a][b] += g[a] * g[b];
            }
        }

        double grad_norm = std::sqrt(jtr[0] * jtr[0] + jtr[1] * jtr[1] + jtr[2] * jtr[2]);
        if (grad_norm < tolerance * std::max(1.0, ssr)) {
            result.converged = true;
            break;
        }

        bool stepped = false;
        for (int tries = 0; tries < 40 && !stepped; ++tries) {
            double a[3][3];
            double b[3];
            for (int r = 0; r < 3; ++r) {
                for (int c = 0; c < 3; ++c) a[r][c] = jtj[r][c];
                a[r][r] += lambda * jtj[r][r];
                b[r] = -jtr[r];
            }
            double delta[3];
            if (!solve3(a, b, delta)) {
                lambda *= 10.0;
                continue;
            }
            double nA0 = A0 + delta[0];
            double nalpha = alpha + delta[1];
            double nAe = Ae + delta[2];
            double nssr = std::isfinite(nA0) && std::isfinite(nalpha) && std::isfinite(nAe)
                              ? sum_sq_residuals(data, nA0, nalpha, nAe)
                              : std::numeric_limits<double>::infinity();
            if (nssr < ssr) {
                double improvement = (ssr - nssr) / std::max(ssr, 1e-300);
                A0 = nA0;
                alpha = nalpha;
                Ae = nAe;
                ssr = nssr;
                lambda = std::max(lambda * 0.3, 1e-12);
                stepped = true;
                if (improvement < tolerance) {
                    result.converged = true;
                }
            } else {
                lambda *= 10.0;
            }
        }
        if (result.converged) { ++iter; break; }
        if (!stepped) {
            // damping exhausted at a stationary point
            result.converged = grad_norm < 1e-6 * std::max(1.0, ssr);
            break;
        }
    }

    result.model.A0 = A0;
    result.model.alpha = alpha;
    result.model.Ae = Ae;
    result.residual_norm = std::sqrt(ssr);
    result.iterations = iter;
    return result;
}

NoiseRatioResult noise_ratio_analysis(const CalibrationData& data, double segment_len) {
    if (segment_len <= 0.0)
        throw std::invalid_argument("noise_ratio_analysis: segment_len must be > 0");
    NoiseRatioResult result;
    if (data.size() == 0) return result;

    double dmax = *std::max_element(data.distance_m.begin(), data.distance_m.end());
    int segment_count = static_cast<int>(std::floor(dmax / segment_len)) + 1;

    double ratio_sum = 0.0;
    int ratio_count = 0;
    for (int s = 0; s < segment_count; ++s) {
        double lo = s * segment_len;
        double hi = lo + segment_len;
        // OLS accumulators over samples with lo <= d < hi (last segment inclusive)
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        std::size_t count = 0;
        double raw_sum = 0.0;
        for (std::size_t i = 0; i < data.size(); ++i) {
            double d = data.distance_m[i];
            if (d < lo || d >= hi) {
                if (!(s == segment_count - 1 && d == hi)) continue;
            }
            double y = data.intensity[i];
            sx += d;
            sy += y;
            sxx += d * d;
            sxy += d * y;
            raw_sum += y;
            ++count;
        }
        if (count < 2) {
            if (count == 1)
                result.notices.push_back("segment [" + std::to_string(lo) + ", " +
                                         std::to_string(hi) + "): single sample, skipped");
            continue;
        }
        double nn = static_cast<double>(count);
        double denom = nn * sxx - sx * sx;
        double slope = 0.0, intercept = sy / nn;
        if (std::abs(denom) > 1e-12) {
            slope = (nn * sxy - sx * sy) / denom;
            intercept = (sy - slope * sx) / nn;
        }
        double ssr = 0.0;
        for (std::size_t i = 0; i < data.size(); ++i) {
            double d = data.distance_m[i];
            if (d < lo || d >= hi) {
                if (!(s == segment_count - 1 && d == hi)) continue;
            }
            double r = data.intensity[i] - (intercept + slope * d);
            ssr += r * r;
        }
        double dof = count > 2 ? nn - 2.0 : 1.0;
        SegmentStats seg;
        seg.d_lo = lo;
        seg.d_hi = hi;
        seg.count = count;
        seg.line_slope = slope;
        seg.line_intercept = intercept;
        seg.residual_std = std::sqrt(ssr / dof);
        seg.fitted_mean = intercept + slope * (sx / nn);
        seg.raw_mean = raw_sum / nn;
        seg.ratio = seg.fitted_mean != 0.0 ? seg.residual_std / seg.fitted_mean : 0.0;
        result.segments.push_back(seg);
        ratio_sum += seg.ratio;
        ++ratio_count;
    }
    if (ratio_count > 0) result.pooled_ratio = ratio_sum / ratio_count;
    return result;
}

}  // namespace swarmfence

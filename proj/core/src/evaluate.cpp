#include "thetafit/evaluate.hpp"

#include "thetafit/errors.hpp"

#include <algorithm>
#include <cmath>

namespace thetafit {

namespace {

void require_equal_nonzero(std::size_t a, std::size_t b, const char* what) {
    if (a == 0 || a != b) {
        throw DataError(std::string(what) + ": lengths must match and be nonzero");
    }
}

}  // namespace

double mse(std::span<const double> y, std::span<const double> y_hat) {
    require_equal_nonzero(y.size(), y_hat.size(), "mse");
    double acc = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double r = y[i] - y_hat[i];
        acc += r * r;
    }
    return acc / static_cast<double>(y.size());
}

double r2(std::span<const double> y, std::span<const double> y_hat) {
    require_equal_nonzero(y.size(), y_hat.size(), "r2");
    double mean = 0.0;
    for (double v : y) mean += v;
    mean /= static_cast<double>(y.size());

    double ss_res = 0.0;
    double ss_tot = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        ss_res += (y[i] - y_hat[i]) * (y[i] - y_hat[i]);
        ss_tot += (y[i] - mean) * (y[i] - mean);
    }
    if (ss_tot == 0.0) throw DataError("r2 undefined: targets have zero variance");
    return 1.0 - ss_res / ss_tot;
}

KsResult ks_two_sample(std::vector<double> sample1, std::vector<double> sample2) {
    if (sample1.empty() || sample2.empty()) throw DataError("ks_two_sample: empty sample");
    std::sort(sample1.begin(), sample1.end());
    std::sort(sample2.begin(), sample2.end());

    const auto n = static_cast<double>(sample1.size());
    const auto m = static_cast<double>(sample2.size());

    // Merged sweep: after consuming all observations equal to the current
    // value from both samples, compare the CDFs there.
    double d = 0.0;
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < sample1.size() && j < sample2.size()) {
        const double x = std::min(sample1[i], sample2[j]);
        while (i < sample1.size() && sample1[i] == x) ++i;
        while (j < sample2.size() && sample2[j] == x) ++j;
        d = std::max(d, std::fabs(static_cast<double>(i) / n - static_cast<double>(j) / m));
    }
    // Whichever sample is exhausted, the remaining breakpoints only shrink
    // the gap toward |1 - F|, and the loop above already saw the largest.
    d = std::max(d, std::fabs(1.0 - static_cast<double>(j) / m));
    d = std::max(d, std::fabs(static_cast<double>(i) / n - 1.0));

    KsResult result;
    result.d = d;
    const double lambda = d * std::sqrt(n * m / (n + m));
    if (lambda < 1e-3) {
        result.p = 1.0;  // the alternating series needs thousands of terms here; p is 1 anyway
        return result;
    }
    double p = 0.0;
    double sign = 1.0;
    for (int k = 1; k <= 100000; ++k) {
        const double term = 2.0 * std::exp(-2.0 * lambda * lambda * k * k);
        p += sign * term;
        if (term < 1e-12) break;
        sign = -sign;
    }
    result.p = std::clamp(p, 0.0, 1.0);
    return result;
}

Moments empirical_moments(std::span<const double> samples) {
    if (samples.size() < 2) throw DataError("empirical_moments needs at least two samples");
    Moments mo;
    for (double v : samples) mo.mean += v;
    mo.mean /= static_cast<double>(samples.size());
    double acc = 0.0;
    for (double v : samples) acc += (v - mo.mean) * (v - mo.mean);
    mo.stddev = std::sqrt(acc / static_cast<double>(samples.size() - 1));
    return mo;
}

std::vector<std::array<double, 2>> qq_points(std::vector<double> s1, std::vector<double> s2) {
    if (s1.size() != s2.size() || s1.empty()) {
        throw DataError("qq_points: samples must have equal nonzero length");
    }
    std::sort(s1.begin(), s1.end());
    std::sort(s2.begin(), s2.end());
    std::vector<std::array<double, 2>> points(s1.size());
    for (std::size_t i = 0; i < s1.size(); ++i) points[i] = {s1[i], s2[i]};
    return points;
}

TheoremConstants theorem_constants(std::span<const double> endpoints_true,
                                   std::span<const double> endpoints_fit,
                                   std::span<const double> sigma_true_grid,
                                   std::span<const double> sigma_fit_grid) {
    require_equal_nonzero(endpoints_true.size(), endpoints_fit.size(), "theorem_constants");
    require_equal_nonzero(sigma_true_grid.size(), sigma_fit_grid.size(), "theorem_constants");

    TheoremConstants out;
    double acc = 0.0;
    for (std::size_t i = 0; i < endpoints_true.size(); ++i) {
        const double diff = endpoints_true[i] - endpoints_fit[i];
        acc += diff * diff;
    }
    out.l_emp = std::sqrt(acc / static_cast<double>(endpoints_true.size()));
    out.r_emp = 2.0 * sup_gap(sigma_true_grid, sigma_fit_grid);
    if (out.r_emp > 0.0) out.c_emp = out.l_emp / out.r_emp;
    return out;
}

double l_emp_standard_error(std::span<const double> endpoints_true,
                            std::span<const double> endpoints_fit) {
    require_equal_nonzero(endpoints_true.size(), endpoints_fit.size(), "l_emp_standard_error");
    const auto n = static_cast<double>(endpoints_true.size());
    std::vector<double> sq(endpoints_true.size());
    for (std::size_t i = 0; i < sq.size(); ++i) {
        const double diff = endpoints_true[i] - endpoints_fit[i];
        sq[i] = diff * diff;
    }
    const Moments mo = empirical_moments(sq);
    if (mo.mean <= 0.0) return 0.0;
    // L = sqrt(mean(sq)); delta method: se(L) = se(mean) / (2 L)
    return mo.stddev / std::sqrt(n) / (2.0 * std::sqrt(mo.mean));
}

double sup_gap(std::span<const double> a, std::span<const double> b) {
    require_equal_nonzero(a.size(), b.size(), "sup_gap");
    double out = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) out = std::max(out, std::fabs(a[i] - b[i]));
    return out;
}

double l2_gap_trapezoid(std::span<const double> a, std::span<const double> b, double h) {
    require_equal_nonzero(a.size(), b.size(), "l2_gap_trapezoid");
    if (a.size() < 2) throw DataError("l2_gap_trapezoid needs at least two grid points");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double g = a[i] - b[i];
        const double w = (i == 0 || i + 1 == a.size()) ? 0.5 : 1.0;
        acc += w * g * g;
    }
    return std::sqrt(acc * h);
}

}  // namespace thetafit

#include "cqa/stats.hpp"

#include <algorithm>
#include <cmath>

#include "cqa/common.hpp"

namespace cqa::stats {

double mean(const std::vector<double>& values) {
    if (values.empty()) return 0.0;
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum / static_cast<double>(values.size());
}

double sample_std(const std::vector<double>& values) {
    if (values.size() < 2) return 0.0;
    double m = mean(values);
    double ss = 0.0;
    for (double v : values) ss += (v - m) * (v - m);
    return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

double quantile_sorted(const std::vector<double>& sorted, double q) {
    if (sorted.empty()) fail_runtime("quantile of empty sample");
    if (q <= 0.0) return sorted.front();
    if (q >= 1.0) return sorted.back();
    double h = static_cast<double>(sorted.size() - 1) * q;
    std::size_t lo = static_cast<std::size_t>(h);
    double frac = h - static_cast<double>(lo);
    if (lo + 1 >= sorted.size()) return sorted.back();
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

BoxStats box_stats(std::vector<double> values) {
    if (values.empty()) fail_runtime("box statistics of empty sample");
    std::sort(values.begin(), values.end());
    BoxStats s;
    s.n = values.size();
    s.min = values.front();
    s.max = values.back();
    s.q1 = quantile_sorted(values, 0.25);
    s.median = quantile_sorted(values, 0.5);
    s.q3 = quantile_sorted(values, 0.75);
    s.mean = mean(values);
    double iqr = s.q3 - s.q1;
    double lo = s.q1 - 1.5 * iqr;
    double hi = s.q3 + 1.5 * iqr;
    for (double v : values)
        if (v < lo || v > hi) s.outliers.push_back(v);
    return s;
}

namespace {

// Lentz's continued fraction for the incomplete beta function.
double betacf(double a, double b, double x) {
    constexpr int kMaxIter = 300;
    constexpr double kEps = 1e-15;
    constexpr double kTiny = 1e-300;

    double qab = a + b;
    double qap = a + 1.0;
    double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) break;
    }
    return h;
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                      a * std::log(x) + b * std::log1p(-x);
    double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * betacf(a, b, x) / a;
    return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

double student_t_two_sided_p(double t, double dof) {
    if (dof < 1.0) return 1.0;
    if (std::isinf(t)) return 0.0;
    double x = dof / (dof + t * t);
    double p = incomplete_beta(dof / 2.0, 0.5, x);
    return std::min(1.0, std::max(0.0, p));
}

Correlation pearson(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size())
        fail_runtime("degenerate_series", "correlation series differ in length (" +
                                              std::to_string(x.size()) + " vs " +
                                              std::to_string(y.size()) + ")");
    std::size_t n = x.size();
    if (n < 2) fail_runtime("degenerate_series", "correlation needs at least 2 points");

    double mx = mean(x), my = mean(y);
    double sxx = 0, syy = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double dx = x[i] - mx, dy = y[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx == 0.0 || syy == 0.0)
        fail_runtime("degenerate_series", "correlation undefined for a zero-variance series");

    Correlation out;
    out.n = n;
    out.r = sxy / std::sqrt(sxx * syy);
    out.r = std::min(1.0, std::max(-1.0, out.r));

    double dof = static_cast<double>(n) - 2.0;
    if (dof < 1.0) {
        out.p_value = 1.0;
    } else if (std::fabs(out.r) >= 1.0) {
        out.p_value = 0.0;
    } else {
        double t = out.r * std::sqrt(dof / (1.0 - out.r * out.r));
        out.p_value = student_t_two_sided_p(t, dof);
    }
    return out;
}

}  // namespace cqa::stats

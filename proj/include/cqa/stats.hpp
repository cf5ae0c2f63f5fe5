#pragma once

#include <cstddef>
#include <vector>

namespace cqa::stats {

double mean(const std::vector<double>& values);

// Sample standard deviation (n-1 denominator); 0 when fewer than 2 values.
double sample_std(const std::vector<double>& values);

// Inclusive linear interpolation between order statistics at rank (n-1)*q.
// `sorted` must be ascending and nonempty; q in [0, 1].
double quantile_sorted(const std::vector<double>& sorted, double q);

struct BoxStats {
    std::size_t n = 0;
    double min = 0, q1 = 0, median = 0, q3 = 0, max = 0;
    double mean = 0;
    std::vector<double> outliers;  // beyond 1.5*IQR from the quartiles
};

BoxStats box_stats(std::vector<double> values);  // values nonempty

// Regularized incomplete beta I_x(a, b) by continued fraction.
double incomplete_beta(double a, double b, double x);

// Two-sided p for a t statistic with `dof` degrees of freedom; 1 when dof < 1.
double student_t_two_sided_p(double t, double dof);

struct Correlation {
    double r = 0;
    double p_value = 1;
    std::size_t n = 0;
};

// Sample Pearson correlation with a two-sided t-test p-value.
// Mismatched lengths, fewer than 2 points, or zero variance in either series
// raise `degenerate_series`.
Correlation pearson(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace cqa::stats

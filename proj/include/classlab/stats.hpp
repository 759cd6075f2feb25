#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "classlab/rng.hpp"

namespace classlab {

enum class Estimator
{
    mean,
    median,
};

std::string_view to_string(Estimator estimator);
Estimator estimator_from_string(std::string_view name);

// What a student reports for one sample size.
struct EstimateReport
{
    std::size_t n{0};
    double mean{0};
    double mean_error{0};  // sd / sqrt(n)
    double median{0};

    friend bool operator==(EstimateReport const&, EstimateReport const&) = default;
};

// Exact estimates on a dataset of size >= 2.
EstimateReport estimate_report(std::span<double const> data);

double mean(std::span<double const> data);

// Average of the two middle order statistics when the size is even.
double median(std::span<double const> data);

// Square root of the (n-1)-denominator variance; needs at least 2 values.
double sample_sd(std::span<double const> data);

// sample_sd(data) / sqrt(n).
double standard_error_mean(std::span<double const> data);

// Standard deviation of a set of independently obtained estimates.
double empirical_se(std::span<double const> estimates);

double evaluate(Estimator estimator, std::span<double const> data);

//---------------------------------------------------------------------------//
/*!
 * Nonparametric bootstrap standard error.
 *
 * Replicate b draws resample element j as data[floor(u * n)] with
 * u = uniform_at(seed, b * n + j). Returns the (B-1)-denominator SD of the
 * B replicate statistics.
 */
double bootstrap_se(std::span<double const> data, Estimator statistic,
                    std::size_t replicates, Seed seed);

inline constexpr std::size_t default_bin_count = 15;

struct ProbabilityHistogram
{
    std::vector<double> bin_edges;  // k + 1 strictly increasing edges
    std::vector<double> densities;  // k values
    std::size_t n_values{0};

    friend bool operator==(ProbabilityHistogram const&, ProbabilityHistogram const&)
        = default;
};

//---------------------------------------------------------------------------//
/*!
 * Equal-width probability histogram over [lo, hi).
 *
 * Values below lo land in the first bin and values at or above hi in the
 * last one, so every value carries mass. Densities integrate to one when
 * any values are present.
 */
ProbabilityHistogram histogram(std::span<double const> values, std::size_t bin_count,
                               double lo, double hi);

}  // namespace classlab

#include "classlab/stats.hpp"

#include <algorithm>
#include <cmath>

#include "classlab/errors.hpp"

namespace classlab {
namespace {

void require_size(std::span<double const> data, std::size_t minimum, char const* what)
{
    if (data.size() < minimum)
    {
        throw ValidationError(std::string(what) + " needs at least "
                                  + std::to_string(minimum) + " values",
                              "data");
    }
}

// Median of a scratch buffer; reorders it.
double median_in_place(std::span<double> values)
{
    auto const n = values.size();
    auto upper = values.begin() + n / 2;
    std::nth_element(values.begin(), upper, values.end());
    if (n % 2 == 1)
    {
        return *upper;
    }
    double lower = *std::max_element(values.begin(), upper);
    return (lower + *upper) / 2;
}

}  // namespace

std::string_view to_string(Estimator estimator)
{
    return estimator == Estimator::mean ? "mean" : "median";
}

Estimator estimator_from_string(std::string_view name)
{
    if (name == "mean")
    {
        return Estimator::mean;
    }
    if (name == "median")
    {
        return Estimator::median;
    }
    throw ValidationError("estimator must be 'mean' or 'median'", "estimator");
}

double mean(std::span<double const> data)
{
    require_size(data, 1, "mean");
    double sum = 0;
    for (double x : data)
    {
        sum += x;
    }
    return sum / static_cast<double>(data.size());
}

double median(std::span<double const> data)
{
    require_size(data, 1, "median");
    std::vector<double> scratch(data.begin(), data.end());
    return median_in_place(scratch);
}

double sample_sd(std::span<double const> data)
{
    require_size(data, 2, "standard deviation");
    double const center = mean(data);
    double ss = 0;
    for (double x : data)
    {
        double dev = x - center;
        ss += dev * dev;
    }
    return std::sqrt(ss / static_cast<double>(data.size() - 1));
}

double standard_error_mean(std::span<double const> data)
{
    return sample_sd(data) / std::sqrt(static_cast<double>(data.size()));
}

double empirical_se(std::span<double const> estimates)
{
    return sample_sd(estimates);
}

double evaluate(Estimator estimator, std::span<double const> data)
{
    return estimator == Estimator::mean ? mean(data) : median(data);
}

EstimateReport estimate_report(std::span<double const> data)
{
    return {data.size(), mean(data), standard_error_mean(data), median(data)};
}

double bootstrap_se(std::span<double const> data, Estimator statistic,
                    std::size_t replicates, Seed seed)
{
    require_size(data, 1, "bootstrap");
    if (replicates < 2)
    {
        throw ValidationError("bootstrap needs at least 2 replicates", "replicates");
    }
    auto const n = data.size();
    std::vector<double> resample(n);
    std::vector<double> stats(replicates);
    std::uint64_t counter = 0;
    for (std::size_t b = 0; b < replicates; ++b)
    {
        for (std::size_t j = 0; j < n; ++j)
        {
            auto index = static_cast<std::size_t>(uniform_at(seed, counter++)
                                                  * static_cast<double>(n));
            resample[j] = data[std::min(index, n - 1)];
        }
        stats[b] = statistic == Estimator::mean ? mean(resample)
                                                : median_in_place(resample);
    }
    return sample_sd(stats);
}

ProbabilityHistogram histogram(std::span<double const> values, std::size_t bin_count,
                               double lo, double hi)
{
    if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi))
    {
        throw ValidationError("histogram range requires finite lo < hi", "range");
    }
    if (bin_count == 0)
    {
        throw ValidationError("histogram needs at least one bin", "bin_count");
    }

    ProbabilityHistogram result;
    result.bin_edges.resize(bin_count + 1);
    double const step = (hi - lo) / static_cast<double>(bin_count);
    for (std::size_t i = 0; i < bin_count; ++i)
    {
        result.bin_edges[i] = lo + step * static_cast<double>(i);
    }
    result.bin_edges[bin_count] = hi;

    auto const& edges = result.bin_edges;
    std::vector<std::size_t> counts(bin_count, 0);
    for (double v : values)
    {
        if (std::isnan(v))
        {
            throw ValidationError("histogram values must not be NaN", "values");
        }
        // Initial guess from the step, then settle against the stored edges.
        double pos = std::floor((v - lo) / step);
        std::size_t bin = pos <= 0 ? 0
                          : pos >= static_cast<double>(bin_count - 1)
                              ? bin_count - 1
                              : static_cast<std::size_t>(pos);
        while (bin > 0 && v < edges[bin])
        {
            --bin;
        }
        while (bin + 1 < bin_count && v >= edges[bin + 1])
        {
            ++bin;
        }
        ++counts[bin];
    }

    result.n_values = values.size();
    result.densities.assign(bin_count, 0.0);
    if (result.n_values > 0)
    {
        double const total = static_cast<double>(result.n_values);
        for (std::size_t i = 0; i < bin_count; ++i)
        {
            double width = edges[i + 1] - edges[i];
            result.densities[i] = static_cast<double>(counts[i]) / (total * width);
        }
    }
    return result;
}

}  // namespace classlab

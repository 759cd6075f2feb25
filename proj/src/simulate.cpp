#include "classlab/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "classlab/errors.hpp"

namespace classlab {

std::string simulated_student_id(std::size_t index)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "sim-%04zu", index);
    return buf;
}

SimulationReport simulate_class(SessionManager& sessions, std::string const& session_id,
                                SimulationOptions const& options)
{
    if (!std::isfinite(options.noise) || options.noise < 0)
    {
        throw ValidationError("noise must be a non-negative number", "noise");
    }
    auto const config = sessions.session(session_id).config;
    Seed const noise_seed{derive_seed("simulate:" + std::to_string(options.seed), "").value};

    SimulationReport report;
    std::uint64_t draw = 0;
    auto perturb = [&](double truth) {
        if (options.noise == 0)
        {
            return truth;
        }
        double direction = uniform_at(noise_seed, draw++) < 0.5 ? -1.0 : 1.0;
        return truth + direction * options.noise * std::max(1.0, std::abs(truth));
    };

    for (std::size_t i = 1; i <= options.students; ++i)
    {
        auto const student = simulated_student_id(i);
        for (std::size_t n : config.sample_sizes)
        {
            auto const dataset = sessions.assign_dataset(session_id, student, n);
            EstimateReport truth{n, mean(dataset.values),
                                 n >= 2 ? standard_error_mean(dataset.values) : 0.0,
                                 median(dataset.values)};
            EstimateReport reported{n, perturb(truth.mean), perturb(truth.mean_error),
                                    perturb(truth.median)};
            if (reported.mean_error < 0)
            {
                // Errors cannot be negative; push the other way instead.
                reported.mean_error = 2 * truth.mean_error - reported.mean_error;
            }

            EstimateSubmission submission{student, n, reported, sessions.now()};
            ++report.attempted;
            if (sessions.record_submission(session_id, submission).accepted)
            {
                ++report.accepted;
            }
        }
    }
    return report;
}

}  // namespace classlab

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "classlab/model.hpp"
#include "classlab/session.hpp"
#include "classlab/stats.hpp"

namespace classlab {

// One estimator's class-wide results at one sample size.
struct SamplingSummary
{
    std::size_t n{0};
    Estimator estimator{Estimator::mean};
    std::vector<std::string> student_ids;  // parallel to estimates
    std::vector<double> estimates;
    ProbabilityHistogram histogram;  // range shared across every n
    std::optional<double> empirical_se;  // needs >= 2 submissions
    std::size_t submission_count{0};
};

// Reported errors versus the spread of the reported means.
struct ErrorComparison
{
    std::size_t n{0};
    std::size_t submission_count{0};
    std::optional<double> mean_of_reported_errors;
    std::optional<double> sd_of_reported_means;
    std::optional<double> ratio;  // absent when the sd is zero or undefined
};

double estimate_of(EstimateSubmission const& submission, Estimator estimator);

// Pooled [min, max] of all values padded by 5% of the span on each side.
// A degenerate span is widened by max(5% of |value|, 0.5); no values gives [0, 1).
std::pair<double, double> shared_range(std::span<double const> pooled);

SamplingSummary summarize(std::span<EstimateSubmission const> all_rows, Estimator estimator,
                          std::size_t n, std::size_t bin_count = default_bin_count);

ErrorComparison compare_errors(std::span<EstimateSubmission const> all_rows, std::size_t n);

SamplingSummary class_summary(SessionManager const& sessions, std::string const& session_id,
                              Estimator estimator, std::size_t n,
                              std::size_t bin_count = default_bin_count);

ErrorComparison error_comparison(SessionManager const& sessions,
                                 std::string const& session_id, std::size_t n);

//---------------------------------------------------------------------------//
// CSV: student_id,n,mean,mean_error,median,submitted_at
//---------------------------------------------------------------------------//
inline constexpr std::string_view csv_header
    = "student_id,n,mean,mean_error,median,submitted_at";

// Rows sorted by (student_id, n); reals printed with 17 significant digits.
std::string to_csv(std::span<EstimateSubmission const> rows);
std::vector<EstimateSubmission> parse_csv(std::string_view text);

std::string export_csv(SessionManager const& sessions, std::string const& session_id);

}  // namespace classlab

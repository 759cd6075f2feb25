#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "classlab/rng.hpp"
#include "classlab/stats.hpp"
#include "classlab/timestamp.hpp"

namespace classlab {

//---------------------------------------------------------------------------//
/*!
 * Everything that governs one classroom run.
 *
 * Datasets depend only on (session_key, spec, student id, n), so the key and
 * spec must never change once students have seen their data.
 */
struct SessionConfig
{
    std::string session_key;
    DistributionSpec spec = DistributionSpec::exponential(50.0);
    std::vector<std::size_t> sample_sizes{5, 30, 100};
    double tolerance{1e-3};
    std::optional<std::vector<std::string>> roster;  // nullopt: open class
    std::string instructor_token;
    std::string units{"days"};

    friend bool operator==(SessionConfig const&, SessionConfig const&) = default;
};

// Throws ValidationError naming the offending field.
void validate(SessionConfig const& config);

bool has_sample_size(SessionConfig const& config, std::size_t n);

struct EstimateSubmission
{
    std::string student_id;
    std::size_t n{0};
    EstimateReport report;
    Timestamp submitted_at{};

    friend bool operator==(EstimateSubmission const&, EstimateSubmission const&) = default;
};

struct StoredSession
{
    std::string session_id;
    SessionConfig config;
    Timestamp created_at{};

    friend bool operator==(StoredSession const&, StoredSession const&) = default;
};

}  // namespace classlab

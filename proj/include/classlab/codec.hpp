#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "classlab/aggregate.hpp"
#include "classlab/model.hpp"
#include "classlab/rng.hpp"
#include "classlab/stats.hpp"

// JSON representations shared by the store, the HTTP API and the
// conformance vector files. Field names follow the domain types.
namespace classlab {

using Json = nlohmann::json;

Json to_json(DistributionSpec const& spec);
DistributionSpec spec_from_json(Json const& j);

Json to_json(SessionConfig const& config);
SessionConfig config_from_json(Json const& j);

Json to_json(EstimateReport const& report);
EstimateReport report_from_json(Json const& j);

Json to_json(EstimateSubmission const& submission);
EstimateSubmission submission_from_json(Json const& j);

Json to_json(ProbabilityHistogram const& histogram);
Json to_json(SamplingSummary const& summary);
Json to_json(ErrorComparison const& comparison);

//---------------------------------------------------------------------------//
// Conformance vectors: [{seed, family, params, n, values}, ...]
//---------------------------------------------------------------------------//
struct ConformanceVector
{
    Seed seed;
    DistributionSpec spec;
    std::size_t n{0};
    std::vector<double> values;
};

std::vector<ConformanceVector> parse_conformance(std::string_view text);
std::string dump_conformance(std::vector<ConformanceVector> const& vectors);

// Typed field access that reports the field name on failure.
double require_number(Json const& j, char const* field);
std::string require_string(Json const& j, char const* field);
std::size_t require_count(Json const& j, char const* field);

}  // namespace classlab

#include "classlab/codec.hpp"

#include <algorithm>

#include "classlab/errors.hpp"

namespace classlab {
namespace {

Json const& require(Json const& j, char const* field)
{
    if (!j.is_object())
    {
        throw ValidationError("expected a JSON object", field);
    }
    auto it = j.find(field);
    if (it == j.end() || it->is_null())
    {
        throw ValidationError(std::string("missing field '") + field + "'", field);
    }
    return *it;
}

}  // namespace

double require_number(Json const& j, char const* field)
{
    auto const& v = require(j, field);
    if (!v.is_number())
    {
        throw ValidationError(std::string("field '") + field + "' must be a number", field);
    }
    return v.get<double>();
}

std::string require_string(Json const& j, char const* field)
{
    auto const& v = require(j, field);
    if (!v.is_string())
    {
        throw ValidationError(std::string("field '") + field + "' must be a string", field);
    }
    return v.get<std::string>();
}

std::size_t require_count(Json const& j, char const* field)
{
    auto const& v = require(j, field);
    if (!v.is_number_unsigned())
    {
        throw ValidationError(
            std::string("field '") + field + "' must be a non-negative integer", field);
    }
    return v.get<std::size_t>();
}

//---------------------------------------------------------------------------//
Json to_json(DistributionSpec const& spec)
{
    Json params = Json::object();
    for (auto const& [name, value] : spec.named_params())
    {
        params[name] = value;
    }
    return {{"family", std::string(to_string(spec.family()))}, {"params", params}};
}

DistributionSpec spec_from_json(Json const& j)
{
    auto family = family_from_string(require_string(j, "family"));
    auto const& params = require(j, "params");
    if (!params.is_object())
    {
        throw ValidationError("distribution params must be an object", "params");
    }
    std::vector<DistributionSpec::NamedParam> named;
    for (auto const& [key, value] : params.items())
    {
        if (!value.is_number())
        {
            throw ValidationError("distribution parameter '" + key + "' must be a number",
                                  key);
        }
        named.emplace_back(key, value.get<double>());
    }
    return DistributionSpec::from_named(family, named);
}

Json to_json(SessionConfig const& config)
{
    Json j{{"session_key", config.session_key},
           {"spec", to_json(config.spec)},
           {"sample_sizes", config.sample_sizes},
           {"tolerance", config.tolerance},
           {"roster", nullptr},
           {"instructor_token", config.instructor_token},
           {"units", config.units}};
    if (config.roster)
    {
        j["roster"] = *config.roster;
    }
    return j;
}

SessionConfig config_from_json(Json const& j)
{
    if (!j.is_object())
    {
        throw ValidationError("session config must be a JSON object");
    }
    SessionConfig config;
    if (j.contains("session_key"))
    {
        config.session_key = require_string(j, "session_key");
    }
    if (j.contains("spec"))
    {
        config.spec = spec_from_json(j.at("spec"));
    }
    if (j.contains("sample_sizes"))
    {
        auto const& sizes = j.at("sample_sizes");
        if (!sizes.is_array()
            || !std::all_of(sizes.begin(), sizes.end(),
                            [](Json const& v) { return v.is_number_unsigned(); }))
        {
            throw ValidationError("sample_sizes must be a list of positive integers",
                                  "sample_sizes");
        }
        config.sample_sizes = sizes.get<std::vector<std::size_t>>();
    }
    if (j.contains("tolerance"))
    {
        config.tolerance = require_number(j, "tolerance");
    }
    if (j.contains("roster") && !j.at("roster").is_null())
    {
        auto const& roster = j.at("roster");
        if (!roster.is_array()
            || !std::all_of(roster.begin(), roster.end(),
                            [](Json const& v) { return v.is_string(); }))
        {
            throw ValidationError("roster must be a list of student ids", "roster");
        }
        config.roster = roster.get<std::vector<std::string>>();
    }
    if (j.contains("instructor_token"))
    {
        config.instructor_token = require_string(j, "instructor_token");
    }
    if (j.contains("units"))
    {
        config.units = require_string(j, "units");
    }
    return config;
}

Json to_json(EstimateReport const& report)
{
    return {{"n", report.n},
            {"mean", report.mean},
            {"mean_error", report.mean_error},
            {"median", report.median}};
}

EstimateReport report_from_json(Json const& j)
{
    return {require_count(j, "n"), require_number(j, "mean"),
            require_number(j, "mean_error"), require_number(j, "median")};
}

Json to_json(EstimateSubmission const& submission)
{
    return {{"student_id", submission.student_id},
            {"n", submission.n},
            {"report", to_json(submission.report)},
            {"submitted_at", format_timestamp(submission.submitted_at)}};
}

EstimateSubmission submission_from_json(Json const& j)
{
    return {require_string(j, "student_id"), require_count(j, "n"),
            report_from_json(require(j, "report")),
            parse_timestamp(require_string(j, "submitted_at"))};
}

Json to_json(ProbabilityHistogram const& histogram)
{
    return {{"bin_edges", histogram.bin_edges},
            {"densities", histogram.densities},
            {"n_values", histogram.n_values}};
}

namespace {

Json optional_number(std::optional<double> const& value)
{
    return value ? Json(*value) : Json(nullptr);
}

}  // namespace

Json to_json(SamplingSummary const& s)
{
    return {{"n", s.n},
            {"estimator", std::string(to_string(s.estimator))},
            {"student_ids", s.student_ids},
            {"estimates", s.estimates},
            {"histogram", to_json(s.histogram)},
            {"empirical_se", optional_number(s.empirical_se)},
            {"submission_count", s.submission_count}};
}

Json to_json(ErrorComparison const& c)
{
    return {{"n", c.n},
            {"submission_count", c.submission_count},
            {"mean_of_reported_errors", optional_number(c.mean_of_reported_errors)},
            {"sd_of_reported_means", optional_number(c.sd_of_reported_means)},
            {"ratio", optional_number(c.ratio)}};
}

//---------------------------------------------------------------------------//
std::vector<ConformanceVector> parse_conformance(std::string_view text)
{
    Json doc = Json::parse(text);
    if (!doc.is_array())
    {
        throw ValidationError("conformance file must hold a JSON list");
    }
    std::vector<ConformanceVector> result;
    for (auto const& entry : doc)
    {
        ConformanceVector v{Seed{require(entry, "seed").get<std::uint64_t>()},
                            spec_from_json(entry), require_count(entry, "n"),
                            require(entry, "values").get<std::vector<double>>()};
        if (v.values.size() != v.n)
        {
            throw ValidationError("conformance vector length does not match n", "values");
        }
        result.push_back(std::move(v));
    }
    return result;
}

std::string dump_conformance(std::vector<ConformanceVector> const& vectors)
{
    Json doc = Json::array();
    for (auto const& v : vectors)
    {
        Json entry = to_json(v.spec);
        entry["seed"] = v.seed.value;
        entry["n"] = v.n;
        entry["values"] = v.values;
        doc.push_back(std::move(entry));
    }
    return doc.dump(2) + "\n";
}

}  // namespace classlab

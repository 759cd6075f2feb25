#include "classlab/api.hpp"

#include <charconv>
#include <vector>

#include "classlab/aggregate.hpp"
#include "classlab/codec.hpp"
#include "classlab/errors.hpp"

namespace classlab {
namespace {

HttpResponse json_response(int status, Json const& body)
{
    HttpResponse response;
    response.status = status;
    response.body = body.dump();
    return response;
}

HttpResponse error_response(ErrorCode code, std::string const& message,
                            std::optional<std::string> const& field, bool retryable = false)
{
    Json body{{"code", std::string(to_string(code))}, {"message", message}};
    if (field)
    {
        body["field"] = *field;
    }
    if (retryable)
    {
        body["retryable"] = true;
    }
    return json_response(http_status(code), body);
}

std::vector<std::string> split_path(std::string const& path)
{
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (start <= path.size())
    {
        auto end = path.find('/', start);
        if (end == std::string::npos)
        {
            end = path.size();
        }
        if (end > start)
        {
            parts.push_back(path.substr(start, end - start));
        }
        start = end + 1;
    }
    return parts;
}

std::string const& query_param(HttpRequest const& request, char const* name)
{
    auto it = request.query.find(name);
    if (it == request.query.end() || it->second.empty())
    {
        throw ValidationError(std::string("query parameter '") + name + "' is required",
                              name);
    }
    return it->second;
}

std::size_t positive_param(std::string const& text, char const* name)
{
    std::size_t value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size() || value == 0)
    {
        throw ValidationError(std::string(name) + " must be a positive integer", name);
    }
    return value;
}

Json parse_body(HttpRequest const& request)
{
    try
    {
        return Json::parse(request.body);
    }
    catch (Json::parse_error const&)
    {
        throw ValidationError("request body is not valid JSON");
    }
}

std::string bearer_token(HttpRequest const& request)
{
    auto it = request.headers.find("authorization");
    if (it == request.headers.end())
    {
        return {};
    }
    std::string_view value = it->second;
    constexpr std::string_view prefix = "Bearer ";
    if (value.substr(0, prefix.size()) == prefix)
    {
        value.remove_prefix(prefix.size());
    }
    return std::string(value);
}

std::string entity_tag(std::uint64_t revision)
{
    return "\"" + std::to_string(revision) + "\"";
}

}  // namespace

int http_status(ErrorCode code)
{
    switch (code)
    {
        case ErrorCode::not_found:
            return 404;
        case ErrorCode::validation:
            return 422;
        case ErrorCode::unauthorized:
            return 401;
        case ErrorCode::conflict:
            return 409;
        case ErrorCode::internal:
            return 500;
    }
    return 500;
}

ApiRouter::ApiRouter(SessionManager& sessions, ApiOptions options)
    : sessions_(sessions), options_(std::move(options))
{
}

HttpResponse ApiRouter::handle(HttpRequest const& request) const
{
    try
    {
        return dispatch(request);
    }
    catch (StorageError const& e)
    {
        return error_response(e.code(), e.what(), e.field(), e.retryable());
    }
    catch (Error const& e)
    {
        return error_response(e.code(), e.what(), e.field());
    }
    catch (std::exception const& e)
    {
        return error_response(ErrorCode::internal, e.what(), std::nullopt);
    }
}

HttpResponse ApiRouter::dispatch(HttpRequest const& request) const
{
    auto const parts = split_path(request.path);
    bool const get = request.method == "GET";
    bool const post = request.method == "POST";

    if (parts.size() >= 2 && parts[0] == "api" && parts[1] == "sessions")
    {
        if (parts.size() == 2 && post)
        {
            return create_session(request);
        }
        if (parts.size() == 3 && get)
        {
            return session_info(parts[2]);
        }
        if (parts.size() == 4)
        {
            auto const& id = parts[2];
            auto const& leaf = parts[3];
            if (leaf == "dataset" && get)
            {
                return dataset(id, request);
            }
            if (leaf == "submissions" && post)
            {
                return submit(id, request);
            }
            if (leaf == "summary" && get)
            {
                return summary(id, request);
            }
            if (leaf == "errors" && get)
            {
                return errors(id, request);
            }
            if (leaf == "export.csv" && get)
            {
                return export_csv(id, request);
            }
        }
    }
    throw NotFoundError("no route for " + request.method + " " + request.path);
}

void ApiRouter::require_instructor(std::string const& id, HttpRequest const& request) const
{
    sessions_.authorize_instructor(id, bearer_token(request));
}

HttpResponse ApiRouter::create_session(HttpRequest const& request) const
{
    if (options_.admin_token && bearer_token(request) != *options_.admin_token)
    {
        throw UnauthorizedError("admin token required to create sessions");
    }
    SessionConfig config;
    if (!request.body.empty())
    {
        config = config_from_json(parse_body(request));
    }
    auto id = sessions_.create_session(std::move(config));
    auto const stored = sessions_.session(id);
    return json_response(
        201, {{"session_id", id}, {"instructor_token", stored.config.instructor_token}});
}

HttpResponse ApiRouter::session_info(std::string const& id) const
{
    auto const stored = sessions_.session(id);
    return json_response(200, {{"session_id", id},
                               {"sample_sizes", stored.config.sample_sizes},
                               {"units", stored.config.units},
                               {"roster_required", stored.config.roster.has_value()}});
}

HttpResponse ApiRouter::dataset(std::string const& id, HttpRequest const& request) const
{
    auto const& student = query_param(request, "student");
    auto n = positive_param(query_param(request, "n"), "n");
    auto const data = sessions_.assign_dataset(id, student, n);
    auto const units = sessions_.session(id).config.units;
    auto response
        = json_response(200, {{"values", data.values}, {"n", data.n}, {"units", units}});
    response.headers["Cache-Control"] = "private, max-age=86400, immutable";
    return response;
}

HttpResponse ApiRouter::submit(std::string const& id, HttpRequest const& request) const
{
    auto const body = parse_body(request);
    EstimateSubmission submission;
    submission.student_id = require_string(body, "student");
    submission.n = require_count(body, "n");
    submission.report = {submission.n, require_number(body, "mean"),
                         require_number(body, "mean_error"), require_number(body, "median")};
    submission.submitted_at = sessions_.now();

    auto const outcome = sessions_.record_submission(id, submission);
    auto const& v = outcome.verification;
    return json_response(200, {{"accepted", outcome.accepted},
                               {"overall", v.overall},
                               {"mean", std::string(to_string(v.mean))},
                               {"mean_error", std::string(to_string(v.mean_error))},
                               {"median", std::string(to_string(v.median))}});
}

HttpResponse ApiRouter::summary(std::string const& id, HttpRequest const& request) const
{
    require_instructor(id, request);
    auto estimator = estimator_from_string(query_param(request, "estimator"));
    auto n = positive_param(query_param(request, "n"), "n");
    std::size_t bins = default_bin_count;
    if (auto it = request.query.find("bins"); it != request.query.end())
    {
        bins = positive_param(it->second, "bins");
    }

    auto revision = sessions_.revision(id);
    if (auto it = request.headers.find("if-none-match");
        it != request.headers.end() && it->second == entity_tag(revision))
    {
        revision = sessions_.wait_for_change(id, revision, options_.poll_timeout);
        if (it->second == entity_tag(revision))
        {
            HttpResponse not_modified;
            not_modified.status = 304;
            not_modified.content_type.clear();
            not_modified.headers["ETag"] = entity_tag(revision);
            return not_modified;
        }
    }

    auto const s = class_summary(sessions_, id, estimator, n, bins);
    auto response = json_response(200, to_json(s));
    response.headers["ETag"] = entity_tag(revision);
    response.headers["Cache-Control"] = "no-cache";
    return response;
}

HttpResponse ApiRouter::errors(std::string const& id, HttpRequest const& request) const
{
    require_instructor(id, request);
    auto n = positive_param(query_param(request, "n"), "n");
    return json_response(200, to_json(error_comparison(sessions_, id, n)));
}

HttpResponse ApiRouter::export_csv(std::string const& id, HttpRequest const& request) const
{
    require_instructor(id, request);
    HttpResponse response;
    response.content_type = "text/csv; charset=utf-8";
    response.body = classlab::export_csv(sessions_, id);
    return response;
}

}  // namespace classlab

#pragma once

#include <chrono>
#include <map>
#include <optional>
#include <string>

#include "classlab/errors.hpp"
#include "classlab/session.hpp"

namespace classlab {

// Transport-neutral request; header names are lower case.
struct HttpRequest
{
    std::string method;
    std::string path;
    std::map<std::string, std::string> query;
    std::map<std::string, std::string> headers;
    std::string body;
};

struct HttpResponse
{
    int status{200};
    std::string content_type{"application/json"};
    std::string body;
    std::map<std::string, std::string> headers;
};

int http_status(ErrorCode code);

struct ApiOptions
{
    // Required in the Authorization header to create sessions, when set.
    std::optional<std::string> admin_token;
    // How long a summary request with a current If-None-Match tag waits.
    std::chrono::milliseconds poll_timeout{std::chrono::seconds(25)};
};

//---------------------------------------------------------------------------//
/*!
 * JSON endpoints over a SessionManager.
 *
 *   POST /api/sessions                               -> 201 {session_id, instructor_token}
 *   GET  /api/sessions/{id}                          -> {session_id, sample_sizes, units, roster_required}
 *   GET  /api/sessions/{id}/dataset?student=&n=      -> {values, n, units}
 *   POST /api/sessions/{id}/submissions              -> verdicts + accepted
 *   GET  /api/sessions/{id}/summary?estimator=&n=    (instructor)
 *   GET  /api/sessions/{id}/errors?n=                (instructor)
 *   GET  /api/sessions/{id}/export.csv               (instructor)
 *
 * Failures come back as {code, message[, field]} with the status implied
 * by the code. A failed verification is a normal 200 response.
 */
class ApiRouter
{
  public:
    explicit ApiRouter(SessionManager& sessions, ApiOptions options = {});

    HttpResponse handle(HttpRequest const& request) const;

  private:
    HttpResponse dispatch(HttpRequest const& request) const;
    HttpResponse create_session(HttpRequest const& request) const;
    HttpResponse session_info(std::string const& id) const;
    HttpResponse dataset(std::string const& id, HttpRequest const& request) const;
    HttpResponse submit(std::string const& id, HttpRequest const& request) const;
    HttpResponse summary(std::string const& id, HttpRequest const& request) const;
    HttpResponse errors(std::string const& id, HttpRequest const& request) const;
    HttpResponse export_csv(std::string const& id, HttpRequest const& request) const;

    void require_instructor(std::string const& id, HttpRequest const& request) const;

    SessionManager& sessions_;
    ApiOptions options_;
};

}  // namespace classlab

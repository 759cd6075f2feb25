#include "classlab/session.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

#include "classlab/errors.hpp"

namespace classlab {
namespace {

void validate_report(EstimateReport const& report, std::size_t n)
{
    if (report.n != n)
    {
        throw ValidationError("report sample size does not match n", "n");
    }
    if (!std::isfinite(report.mean))
    {
        throw ValidationError("mean must be a finite number", "mean");
    }
    if (!std::isfinite(report.mean_error) || report.mean_error < 0)
    {
        throw ValidationError("mean_error must be a finite non-negative number",
                              "mean_error");
    }
    if (!std::isfinite(report.median))
    {
        throw ValidationError("median must be a finite number", "median");
    }
}

bool tokens_equal(std::string_view a, std::string_view b)
{
    if (a.size() != b.size())
    {
        return false;
    }
    unsigned char diff = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
    {
        diff |= static_cast<unsigned char>(a[i] ^ b[i]);
    }
    return diff == 0;
}

}  // namespace

std::string_view to_string(Verdict verdict)
{
    return verdict == Verdict::ok ? "ok" : "wrong";
}

bool within_tolerance(double submitted, double truth, double tolerance)
{
    return std::abs(submitted - truth) <= tolerance * std::max(1.0, std::abs(truth));
}

std::string random_token()
{
    std::random_device device;
    std::string result;
    result.reserve(32);
    for (int i = 0; i < 4; ++i)
    {
        char buf[9];
        std::snprintf(buf, sizeof buf, "%08x", static_cast<unsigned>(device()));
        result += buf;
    }
    return result;
}

void validate(SessionConfig const& config)
{
    if (config.sample_sizes.empty())
    {
        throw ValidationError("at least one sample size is required", "sample_sizes");
    }
    for (std::size_t i = 0; i < config.sample_sizes.size(); ++i)
    {
        if (config.sample_sizes[i] == 0)
        {
            throw ValidationError("sample sizes must be positive", "sample_sizes");
        }
        if (i > 0 && config.sample_sizes[i] <= config.sample_sizes[i - 1])
        {
            throw ValidationError("sample sizes must be strictly ascending", "sample_sizes");
        }
    }
    if (!std::isfinite(config.tolerance) || !(config.tolerance > 0))
    {
        throw ValidationError("tolerance must be positive", "tolerance");
    }
    if (config.roster)
    {
        if (std::any_of(config.roster->begin(), config.roster->end(),
                        [](auto const& id) { return id.empty(); }))
        {
            throw ValidationError("roster ids must be non-empty", "roster");
        }
    }
}

bool has_sample_size(SessionConfig const& config, std::size_t n)
{
    return std::binary_search(config.sample_sizes.begin(), config.sample_sizes.end(), n);
}

//---------------------------------------------------------------------------//
SessionManager::SessionManager(Store& store) : SessionManager(store, Options{}) {}

SessionManager::SessionManager(Store& store, Options options)
    : store_(store), options_(std::move(options))
{
}

std::string SessionManager::create_session(SessionConfig config)
{
    if (config.session_key.empty())
    {
        config.session_key = options_.id_source();
    }
    if (config.instructor_token.empty())
    {
        config.instructor_token = options_.id_source();
    }
    validate(config);

    StoredSession session{options_.id_source(), std::move(config), options_.clock()};
    store_.put_session(session);
    return session.session_id;
}

StoredSession SessionManager::session(std::string const& session_id) const
{
    return store_.get_session(session_id);
}

std::vector<std::string> SessionManager::list_sessions() const
{
    return store_.list_sessions();
}

void SessionManager::authorize_instructor(std::string const& session_id,
                                          std::string_view token) const
{
    auto const stored = store_.get_session(session_id);
    if (token.empty() || !tokens_equal(token, stored.config.instructor_token))
    {
        throw UnauthorizedError("instructor token required");
    }
}

Dataset SessionManager::dataset_for(StoredSession const& session,
                                    std::string const& student_id, std::size_t n) const
{
    auto const& config = session.config;
    if (student_id.empty())
    {
        throw ValidationError("student id is required", "student");
    }
    if (!has_sample_size(config, n))
    {
        throw ValidationError("n=" + std::to_string(n) + " is not a configured sample size",
                              "n");
    }
    if (config.roster
        && std::find(config.roster->begin(), config.roster->end(), student_id)
               == config.roster->end())
    {
        throw NotFoundError("student '" + student_id + "' is not on the roster");
    }
    return sample_prefix(config.spec, derive_seed(config.session_key, student_id), n);
}

Dataset SessionManager::assign_dataset(std::string const& session_id,
                                       std::string const& student_id, std::size_t n) const
{
    return dataset_for(store_.get_session(session_id), student_id, n);
}

VerificationResult SessionManager::verify(std::string const& session_id,
                                          std::string const& student_id, std::size_t n,
                                          EstimateReport const& report) const
{
    auto const session = store_.get_session(session_id);
    auto const dataset = dataset_for(session, student_id, n);
    validate_report(report, n);

    double const tol = session.config.tolerance;
    auto verdict = [tol](double submitted, double truth) {
        return within_tolerance(submitted, truth, tol) ? Verdict::ok : Verdict::wrong;
    };

    VerificationResult result;
    result.mean = verdict(report.mean, mean(dataset.values));
    // A single observation carries no spread estimate; only 0 is accepted.
    result.mean_error = verdict(report.mean_error, dataset.values.size() >= 2
                                                       ? standard_error_mean(dataset.values)
                                                       : 0.0);
    result.median = verdict(report.median, median(dataset.values));
    result.overall = result.mean == Verdict::ok && result.mean_error == Verdict::ok
                     && result.median == Verdict::ok;
    return result;
}

RecordOutcome SessionManager::record_submission(std::string const& session_id,
                                                EstimateSubmission const& submission)
{
    RecordOutcome outcome;
    outcome.verification
        = verify(session_id, submission.student_id, submission.n, submission.report);
    if (!outcome.verification.overall)
    {
        return outcome;
    }

    auto& st = state(session_id);
    {
        std::lock_guard write_lock(st.write_mutex);
        store_.upsert_submission(session_id, submission);
        {
            std::lock_guard lock(st.revision_mutex);
            ++st.revision;
        }
    }
    st.changed.notify_all();
    outcome.accepted = true;
    return outcome;
}

std::vector<EstimateSubmission>
SessionManager::accepted_submissions(std::string const& session_id,
                                     std::optional<std::size_t> n) const
{
    return store_.submissions_for(session_id, n);
}

SessionManager::SessionState& SessionManager::state(std::string const& session_id) const
{
    std::lock_guard lock(states_mutex_);
    auto it = states_.find(session_id);
    if (it == states_.end())
    {
        auto count = store_.submission_count(session_id);  // throws if unknown
        auto fresh = std::make_unique<SessionState>();
        fresh->revision = count;
        it = states_.emplace(session_id, std::move(fresh)).first;
    }
    return *it->second;
}

std::uint64_t SessionManager::revision(std::string const& session_id) const
{
    auto& st = state(session_id);
    std::lock_guard lock(st.revision_mutex);
    return st.revision;
}

std::uint64_t SessionManager::wait_for_change(std::string const& session_id,
                                              std::uint64_t known,
                                              std::chrono::milliseconds timeout) const
{
    auto& st = state(session_id);
    std::unique_lock lock(st.revision_mutex);
    st.changed.wait_for(lock, timeout, [&] { return st.revision != known; });
    return st.revision;
}

}  // namespace classlab

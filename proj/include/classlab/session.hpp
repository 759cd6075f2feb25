#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "classlab/model.hpp"
#include "classlab/store.hpp"

namespace classlab {

enum class Verdict
{
    ok,
    wrong,
};

std::string_view to_string(Verdict verdict);

// Per-field outcome of checking a report; reference values are withheld.
struct VerificationResult
{
    Verdict mean{Verdict::wrong};
    Verdict mean_error{Verdict::wrong};
    Verdict median{Verdict::wrong};
    bool overall{false};
};

struct RecordOutcome
{
    VerificationResult verification;
    bool accepted{false};
};

// |submitted - truth| <= tolerance * max(1, |truth|)
bool within_tolerance(double submitted, double truth, double tolerance);

// 128 random bits as 32 lowercase hex digits.
std::string random_token();

//---------------------------------------------------------------------------//
/*!
 * Classroom session lifecycle on top of a Store.
 *
 * Dataset assignment and verification are pure functions of the stored
 * configuration. Submission writes are serialized per session; each
 * accepted write bumps the session's revision, which long-polling readers
 * can wait on.
 */
class SessionManager
{
  public:
    struct Options
    {
        Clock clock = system_now;
        std::function<std::string()> id_source = random_token;
    };

    explicit SessionManager(Store& store);
    SessionManager(Store& store, Options options);

    // Empty session_key / instructor_token are generated. Returns the id.
    std::string create_session(SessionConfig config);

    StoredSession session(std::string const& session_id) const;
    std::vector<std::string> list_sessions() const;

    // Throws UnauthorizedError unless `token` is the session's instructor token.
    void authorize_instructor(std::string const& session_id, std::string_view token) const;

    Dataset assign_dataset(std::string const& session_id, std::string const& student_id,
                           std::size_t n) const;

    VerificationResult verify(std::string const& session_id, std::string const& student_id,
                              std::size_t n, EstimateReport const& report) const;

    // Stores the submission only if it verifies, replacing any earlier row
    // for (student_id, n).
    RecordOutcome record_submission(std::string const& session_id,
                                    EstimateSubmission const& submission);

    std::vector<EstimateSubmission>
    accepted_submissions(std::string const& session_id,
                         std::optional<std::size_t> n = std::nullopt) const;

    // Number of accepted writes (including replacements) since load.
    std::uint64_t revision(std::string const& session_id) const;

    // Blocks until the revision differs from `known` or the timeout passes;
    // returns the current revision.
    std::uint64_t wait_for_change(std::string const& session_id, std::uint64_t known,
                                  std::chrono::milliseconds timeout) const;

    Timestamp now() const { return options_.clock(); }

  private:
    struct SessionState
    {
        std::mutex write_mutex;
        mutable std::mutex revision_mutex;
        mutable std::condition_variable changed;
        std::uint64_t revision{0};
    };

    SessionState& state(std::string const& session_id) const;
    Dataset dataset_for(StoredSession const& session, std::string const& student_id,
                        std::size_t n) const;

    Store& store_;
    Options options_;
    mutable std::mutex states_mutex_;
    mutable std::map<std::string, std::unique_ptr<SessionState>> states_;
};

}  // namespace classlab

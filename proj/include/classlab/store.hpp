#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <shared_mutex>
#include <string>
#include <utility>
#include <vector>

#include "classlab/model.hpp"

namespace classlab {

//---------------------------------------------------------------------------//
/*!
 * Durable record of sessions and accepted submissions.
 *
 * The backing file holds one JSON record per line ({"kind":"session",...}
 * or {"kind":"submission",...}). Writes append a single line; on load the
 * last record for a (session, student, n) key wins. A trailing line that
 * was cut short by a crash is discarded, and the file is then rewritten
 * through a temporary file and an atomic rename.
 *
 * One writer at a time; readers receive copies taken under a shared lock.
 */
class Store
{
  public:
    static constexpr int format_version = 1;

    // Volatile store for tests and offline simulation.
    Store() = default;
    // Opens (or starts) the store at `path`.
    explicit Store(std::filesystem::path path);

    Store(Store const&) = delete;
    Store& operator=(Store const&) = delete;

    void put_session(StoredSession const& session);
    StoredSession get_session(std::string const& session_id) const;
    bool has_session(std::string const& session_id) const;
    // Ids in creation order.
    std::vector<std::string> list_sessions() const;

    void upsert_submission(std::string const& session_id,
                           EstimateSubmission const& submission);
    // Ordered by (student_id, n); restricted to one n when given.
    std::vector<EstimateSubmission>
    submissions_for(std::string const& session_id,
                    std::optional<std::size_t> n = std::nullopt) const;
    std::size_t submission_count(std::string const& session_id) const;

    // Rewrite the file with only live records.
    void compact();

    std::optional<std::filesystem::path> const& path() const noexcept { return path_; }

  private:
    using SubmissionKey = std::pair<std::string, std::size_t>;
    using SubmissionMap = std::map<SubmissionKey, EstimateSubmission>;

    void load();
    void append_line(std::string const& line);
    void rewrite_locked();
    std::string const& require_session_locked(std::string const& session_id) const;

    std::optional<std::filesystem::path> path_;
    mutable std::shared_mutex mutex_;
    std::map<std::string, StoredSession> sessions_;
    std::vector<std::string> order_;
    std::map<std::string, SubmissionMap> submissions_;
    std::size_t superseded_lines_{0};
};

}  // namespace classlab

#include "classlab/store.hpp"

#include <cerrno>
#include <cstring>
#include <fstream>
#include <mutex>
#include <sstream>

#include <fcntl.h>
#include <sys/stat.h>
#include <unistd.h>

#include "classlab/codec.hpp"
#include "classlab/errors.hpp"

namespace classlab {
namespace {

// Rewrite once this many superseded lines have piled up (and they
// outnumber the live ones).
constexpr std::size_t compaction_threshold = 4096;

std::string errno_message(std::string const& what)
{
    return what + ": " + std::strerror(errno);
}

Json session_record(StoredSession const& session)
{
    return {{"kind", "session"},
            {"version", Store::format_version},
            {"session_id", session.session_id},
            {"config", to_json(session.config)},
            {"created_at", format_timestamp(session.created_at)}};
}

Json submission_record(std::string const& session_id, EstimateSubmission const& submission)
{
    Json j = to_json(submission);
    j["kind"] = "submission";
    j["version"] = Store::format_version;
    j["session_id"] = session_id;
    return j;
}

void write_all(int fd, std::string const& data, std::string const& path)
{
    char const* p = data.data();
    std::size_t remaining = data.size();
    while (remaining > 0)
    {
        ssize_t written = ::write(fd, p, remaining);
        if (written < 0)
        {
            if (errno == EINTR)
            {
                continue;
            }
            throw StorageError(errno_message("write to " + path + " failed"));
        }
        p += written;
        remaining -= static_cast<std::size_t>(written);
    }
}

class FileDescriptor
{
  public:
    explicit FileDescriptor(int fd) : fd_(fd) {}
    ~FileDescriptor()
    {
        if (fd_ >= 0)
        {
            ::close(fd_);
        }
    }
    FileDescriptor(FileDescriptor const&) = delete;
    FileDescriptor& operator=(FileDescriptor const&) = delete;

    int get() const { return fd_; }

  private:
    int fd_;
};

}  // namespace

Store::Store(std::filesystem::path path) : path_(std::move(path))
{
    load();
}

void Store::load()
{
    std::ifstream in(*path_, std::ios::binary);
    if (!in)
    {
        if (std::filesystem::exists(*path_))
        {
            throw StorageError("cannot read store " + path_->string());
        }
        return;
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    std::string const content = buffer.str();

    std::size_t start = 0;
    std::size_t line_no = 0;
    bool torn_tail = false;
    while (start < content.size())
    {
        auto end = content.find('\n', start);
        if (end == std::string::npos)
        {
            torn_tail = true;
            break;
        }
        ++line_no;
        std::string_view line(content.data() + start, end - start);
        start = end + 1;
        if (line.empty())
        {
            continue;
        }
        try
        {
            Json record = Json::parse(line);
            auto kind = require_string(record, "kind");
            if (kind == "session")
            {
                StoredSession session{require_string(record, "session_id"),
                                      config_from_json(record.at("config")),
                                      parse_timestamp(require_string(record, "created_at"))};
                validate(session.config);
                if (sessions_.count(session.session_id))
                {
                    throw ValidationError("duplicate session record");
                }
                order_.push_back(session.session_id);
                submissions_[session.session_id];
                sessions_.emplace(session.session_id, std::move(session));
            }
            else if (kind == "submission")
            {
                auto session_id = require_string(record, "session_id");
                auto it = submissions_.find(session_id);
                if (it == submissions_.end())
                {
                    throw ValidationError("submission for unknown session " + session_id);
                }
                auto submission = submission_from_json(record);
                SubmissionKey key{submission.student_id, submission.n};
                auto [slot, inserted] = it->second.insert_or_assign(std::move(key),
                                                                    std::move(submission));
                if (!inserted)
                {
                    ++superseded_lines_;
                }
            }
            else
            {
                throw ValidationError("unknown record kind '" + kind + "'");
            }
        }
        catch (std::exception const& e)
        {
            throw StorageError("corrupt store " + path_->string() + " at line "
                               + std::to_string(line_no) + ": " + e.what());
        }
    }
    if (torn_tail)
    {
        std::unique_lock lock(mutex_);
        rewrite_locked();
    }
}

void Store::append_line(std::string const& line)
{
    if (!path_)
    {
        return;
    }
    FileDescriptor fd(::open(path_->c_str(), O_WRONLY | O_APPEND | O_CREAT | O_CLOEXEC, 0644));
    if (fd.get() < 0)
    {
        throw StorageError(errno_message("cannot open store " + path_->string()));
    }
    struct stat st{};
    if (::fstat(fd.get(), &st) != 0)
    {
        throw StorageError(errno_message("cannot stat store " + path_->string()));
    }
    try
    {
        write_all(fd.get(), line + "\n", path_->string());
        if (::fdatasync(fd.get()) != 0)
        {
            throw StorageError(errno_message("fdatasync of " + path_->string() + " failed"));
        }
    }
    catch (StorageError const&)
    {
        // Drop any partial line so the next append starts on a clean line.
        if (::ftruncate(fd.get(), st.st_size) != 0)
        {
            // The partial line is discarded as a torn tail on the next load.
        }
        throw;
    }
}

void Store::rewrite_locked()
{
    if (!path_)
    {
        return;
    }
    std::string content;
    for (auto const& id : order_)
    {
        content += session_record(sessions_.at(id)).dump() + "\n";
        for (auto const& [key, submission] : submissions_.at(id))
        {
            content += submission_record(id, submission).dump() + "\n";
        }
    }

    auto tmp = *path_;
    tmp += ".tmp";
    {
        FileDescriptor fd(
            ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644));
        if (fd.get() < 0)
        {
            throw StorageError(errno_message("cannot create " + tmp.string()));
        }
        write_all(fd.get(), content, tmp.string());
        if (::fsync(fd.get()) != 0)
        {
            throw StorageError(errno_message("fsync of " + tmp.string() + " failed"));
        }
    }
    if (::rename(tmp.c_str(), path_->c_str()) != 0)
    {
        throw StorageError(errno_message("cannot replace " + path_->string()));
    }
    superseded_lines_ = 0;
}

std::string const& Store::require_session_locked(std::string const& session_id) const
{
    auto it = sessions_.find(session_id);
    if (it == sessions_.end())
    {
        throw NotFoundError("unknown session '" + session_id + "'");
    }
    return it->first;
}

void Store::put_session(StoredSession const& session)
{
    std::unique_lock lock(mutex_);
    if (sessions_.count(session.session_id))
    {
        throw ConflictError("session '" + session.session_id + "' already exists");
    }
    append_line(session_record(session).dump());
    order_.push_back(session.session_id);
    submissions_[session.session_id];
    sessions_.emplace(session.session_id, session);
}

StoredSession Store::get_session(std::string const& session_id) const
{
    std::shared_lock lock(mutex_);
    require_session_locked(session_id);
    return sessions_.at(session_id);
}

bool Store::has_session(std::string const& session_id) const
{
    std::shared_lock lock(mutex_);
    return sessions_.count(session_id) > 0;
}

std::vector<std::string> Store::list_sessions() const
{
    std::shared_lock lock(mutex_);
    return order_;
}

void Store::upsert_submission(std::string const& session_id,
                              EstimateSubmission const& submission)
{
    std::unique_lock lock(mutex_);
    require_session_locked(session_id);
    append_line(submission_record(session_id, submission).dump());
    auto& rows = submissions_.at(session_id);
    auto [slot, inserted]
        = rows.insert_or_assign(SubmissionKey{submission.student_id, submission.n}, submission);
    if (!inserted)
    {
        ++superseded_lines_;
    }

    std::size_t live = 0;
    for (auto const& [id, session_rows] : submissions_)
    {
        live += session_rows.size();
    }
    if (superseded_lines_ >= compaction_threshold && superseded_lines_ > live)
    {
        try
        {
            rewrite_locked();
        }
        catch (StorageError const&)
        {
            // The appended log is still complete; compaction can wait.
        }
    }
}

std::vector<EstimateSubmission> Store::submissions_for(std::string const& session_id,
                                                       std::optional<std::size_t> n) const
{
    std::shared_lock lock(mutex_);
    require_session_locked(session_id);
    std::vector<EstimateSubmission> result;
    for (auto const& [key, submission] : submissions_.at(session_id))
    {
        if (!n || key.second == *n)
        {
            result.push_back(submission);
        }
    }
    return result;
}

std::size_t Store::submission_count(std::string const& session_id) const
{
    std::shared_lock lock(mutex_);
    require_session_locked(session_id);
    return submissions_.at(session_id).size();
}

void Store::compact()
{
    std::unique_lock lock(mutex_);
    rewrite_locked();
}

}  // namespace classlab

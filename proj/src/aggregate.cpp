#include "classlab/aggregate.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <tuple>

#include "classlab/errors.hpp"

namespace classlab {
namespace {

std::string format_real(double value)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

std::string quote_field(std::string const& field)
{
    if (field.find_first_of(",\"\r\n") == std::string::npos)
    {
        return field;
    }
    std::string out = "\"";
    for (char c : field)
    {
        if (c == '"')
        {
            out += '"';
        }
        out += c;
    }
    out += '"';
    return out;
}

std::vector<std::vector<std::string>> split_records(std::string_view text)
{
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> record;
    std::string field;
    bool quoted = false;
    bool field_started = false;
    for (std::size_t i = 0; i < text.size(); ++i)
    {
        char c = text[i];
        if (quoted)
        {
            if (c == '"')
            {
                if (i + 1 < text.size() && text[i + 1] == '"')
                {
                    field += '"';
                    ++i;
                }
                else
                {
                    quoted = false;
                }
            }
            else
            {
                field += c;
            }
            continue;
        }
        switch (c)
        {
            case '"':
                if (field_started)
                {
                    throw ValidationError("stray quote in CSV field", "csv");
                }
                quoted = true;
                field_started = true;
                break;
            case ',':
                record.push_back(std::move(field));
                field.clear();
                field_started = false;
                break;
            case '\n':
                record.push_back(std::move(field));
                field.clear();
                field_started = false;
                records.push_back(std::move(record));
                record.clear();
                break;
            default:
                field += c;
                field_started = true;
        }
    }
    if (quoted)
    {
        throw ValidationError("unterminated quoted CSV field", "csv");
    }
    if (field_started || !record.empty())
    {
        record.push_back(std::move(field));
        records.push_back(std::move(record));
    }
    return records;
}

double parse_real(std::string const& text, char const* column)
{
    char* end = nullptr;
    double value = std::strtod(text.c_str(), &end);
    if (text.empty() || end != text.c_str() + text.size() || !std::isfinite(value))
    {
        throw ValidationError("bad number '" + text + "' in column " + column, column);
    }
    return value;
}

std::size_t parse_count(std::string const& text)
{
    std::size_t value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size())
    {
        throw ValidationError("bad sample size '" + text + "'", "n");
    }
    return value;
}

}  // namespace

double estimate_of(EstimateSubmission const& submission, Estimator estimator)
{
    return estimator == Estimator::mean ? submission.report.mean : submission.report.median;
}

std::pair<double, double> shared_range(std::span<double const> pooled)
{
    if (pooled.empty())
    {
        return {0.0, 1.0};
    }
    auto [lo_it, hi_it] = std::minmax_element(pooled.begin(), pooled.end());
    double lo = *lo_it;
    double hi = *hi_it;
    double pad = 0.05 * (hi - lo);
    if (!(pad > 0))
    {
        pad = std::max(0.05 * std::abs(lo), 0.5);
    }
    return {lo - pad, hi + pad};
}

SamplingSummary summarize(std::span<EstimateSubmission const> all_rows, Estimator estimator,
                          std::size_t n, std::size_t bin_count)
{
    SamplingSummary summary;
    summary.n = n;
    summary.estimator = estimator;

    std::vector<double> pooled;
    pooled.reserve(all_rows.size());
    for (auto const& row : all_rows)
    {
        double value = estimate_of(row, estimator);
        pooled.push_back(value);
        if (row.n == n)
        {
            summary.student_ids.push_back(row.student_id);
            summary.estimates.push_back(value);
        }
    }
    summary.submission_count = summary.estimates.size();

    auto [lo, hi] = shared_range(pooled);
    summary.histogram = histogram(summary.estimates, bin_count, lo, hi);
    if (summary.submission_count >= 2)
    {
        summary.empirical_se = empirical_se(summary.estimates);
    }
    return summary;
}

ErrorComparison compare_errors(std::span<EstimateSubmission const> all_rows, std::size_t n)
{
    ErrorComparison result;
    result.n = n;
    std::vector<double> means;
    std::vector<double> errors;
    for (auto const& row : all_rows)
    {
        if (row.n == n)
        {
            means.push_back(row.report.mean);
            errors.push_back(row.report.mean_error);
        }
    }
    result.submission_count = means.size();
    if (!errors.empty())
    {
        result.mean_of_reported_errors = mean(errors);
    }
    if (means.size() >= 2)
    {
        result.sd_of_reported_means = sample_sd(means);
        if (*result.sd_of_reported_means > 0)
        {
            result.ratio = *result.mean_of_reported_errors / *result.sd_of_reported_means;
        }
    }
    return result;
}

SamplingSummary class_summary(SessionManager const& sessions, std::string const& session_id,
                              Estimator estimator, std::size_t n, std::size_t bin_count)
{
    auto const config = sessions.session(session_id).config;
    if (!has_sample_size(config, n))
    {
        throw ValidationError("n=" + std::to_string(n) + " is not a configured sample size",
                              "n");
    }
    if (bin_count == 0)
    {
        throw ValidationError("bin count must be positive", "bins");
    }
    auto const rows = sessions.accepted_submissions(session_id);
    return summarize(rows, estimator, n, bin_count);
}

ErrorComparison error_comparison(SessionManager const& sessions,
                                 std::string const& session_id, std::size_t n)
{
    auto const config = sessions.session(session_id).config;
    if (!has_sample_size(config, n))
    {
        throw ValidationError("n=" + std::to_string(n) + " is not a configured sample size",
                              "n");
    }
    return compare_errors(sessions.accepted_submissions(session_id, n), n);
}

std::string to_csv(std::span<EstimateSubmission const> rows)
{
    std::vector<EstimateSubmission const*> sorted;
    sorted.reserve(rows.size());
    for (auto const& row : rows)
    {
        sorted.push_back(&row);
    }
    std::stable_sort(sorted.begin(), sorted.end(), [](auto const* a, auto const* b) {
        return std::tie(a->student_id, a->n) < std::tie(b->student_id, b->n);
    });

    std::string out(csv_header);
    out += '\n';
    for (auto const* row : sorted)
    {
        out += quote_field(row->student_id);
        out += ',';
        out += std::to_string(row->n);
        out += ',';
        out += format_real(row->report.mean);
        out += ',';
        out += format_real(row->report.mean_error);
        out += ',';
        out += format_real(row->report.median);
        out += ',';
        out += format_timestamp(row->submitted_at);
        out += '\n';
    }
    return out;
}

std::vector<EstimateSubmission> parse_csv(std::string_view text)
{
    auto records = split_records(text);
    if (records.empty())
    {
        throw ValidationError("CSV document is empty", "csv");
    }
    std::string header;
    for (std::size_t i = 0; i < records[0].size(); ++i)
    {
        header += (i ? "," : "") + records[0][i];
    }
    if (header != csv_header)
    {
        throw ValidationError("unexpected CSV header '" + header + "'", "csv");
    }

    std::vector<EstimateSubmission> rows;
    for (std::size_t r = 1; r < records.size(); ++r)
    {
        auto const& f = records[r];
        if (f.size() != 6)
        {
            throw ValidationError("CSV row " + std::to_string(r) + " has "
                                      + std::to_string(f.size()) + " fields",
                                  "csv");
        }
        EstimateSubmission row;
        row.student_id = f[0];
        row.n = parse_count(f[1]);
        row.report = {row.n, parse_real(f[2], "mean"), parse_real(f[3], "mean_error"),
                      parse_real(f[4], "median")};
        row.submitted_at = parse_timestamp(f[5]);
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string export_csv(SessionManager const& sessions, std::string const& session_id)
{
    return to_csv(sessions.accepted_submissions(session_id));
}

}  // namespace classlab

// Instructor command-line tool: run the server, create and simulate
// sessions, inspect class summaries and export the collected estimates.
//
// Exit codes: 0 success, 2 validation, 3 not found, 4 I/O.

#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <pthread.h>

#include <CLI11.hpp>

#include "classlab/aggregate.hpp"
#include "classlab/codec.hpp"
#include "classlab/errors.hpp"
#include "classlab/server.hpp"
#include "classlab/session.hpp"
#include "classlab/simulate.hpp"
#include "classlab/store.hpp"

namespace {

using namespace classlab;

enum ExitCode : int
{
    exit_ok = 0,
    exit_validation = 2,
    exit_not_found = 3,
    exit_io = 4,
};

int exit_code(ErrorCode code)
{
    switch (code)
    {
        case ErrorCode::not_found:
            return exit_not_found;
        case ErrorCode::internal:
            return exit_io;
        default:
            return exit_validation;
    }
}

struct GlobalOptions
{
    std::string store_path;
    std::string config_path;
};

std::string resolve_store(GlobalOptions const& g)
{
    if (!g.store_path.empty())
    {
        return g.store_path;
    }
    if (!g.config_path.empty())
    {
        return load_server_config(g.config_path).store_path;
    }
    return ServerConfig{}.store_path;
}

std::vector<DistributionSpec::NamedParam> parse_params(std::vector<std::string> const& raw)
{
    std::vector<DistributionSpec::NamedParam> params;
    for (auto const& item : raw)
    {
        auto eq = item.find('=');
        if (eq == std::string::npos)
        {
            throw ValidationError("parameter '" + item + "' must look like name=value",
                                  "param");
        }
        std::size_t used = 0;
        double value = 0;
        try
        {
            value = std::stod(item.substr(eq + 1), &used);
        }
        catch (std::exception const&)
        {
            used = 0;
        }
        if (used == 0 || used != item.size() - eq - 1)
        {
            throw ValidationError("parameter '" + item + "' has a non-numeric value",
                                  "param");
        }
        params.emplace_back(item.substr(0, eq), value);
    }
    return params;
}

std::vector<std::string> read_roster(std::string const& path)
{
    std::ifstream in(path);
    if (!in)
    {
        throw StorageError("cannot read roster " + path);
    }
    std::vector<std::string> ids;
    std::string line;
    while (std::getline(in, line))
    {
        if (!line.empty() && line.back() == '\r')
        {
            line.pop_back();
        }
        if (!line.empty())
        {
            ids.push_back(line);
        }
    }
    return ids;
}

void print_table(SamplingSummary const& s, std::string const& session_id)
{
    constexpr int bar_width = 40;
    std::printf("session %s  estimator=%s  n=%zu\n", session_id.c_str(),
                std::string(to_string(s.estimator)).c_str(), s.n);
    std::printf("submissions: %zu\n", s.submission_count);
    if (s.empirical_se)
    {
        std::printf("empirical SE: %.6g\n", *s.empirical_se);
    }
    else
    {
        std::printf("empirical SE: n/a\n");
    }
    auto const& h = s.histogram;
    double peak = 0;
    for (double d : h.densities)
    {
        peak = std::max(peak, d);
    }
    for (std::size_t i = 0; i < h.densities.size(); ++i)
    {
        int len = peak > 0 ? static_cast<int>(h.densities[i] / peak * bar_width + 0.5) : 0;
        std::printf("[%12.4f, %12.4f) %12.6g |%s\n", h.bin_edges[i], h.bin_edges[i + 1],
                    h.densities[i], std::string(static_cast<std::size_t>(len), '#').c_str());
    }
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"classlab: personalized datasets and sampling-distribution summaries"};
    app.require_subcommand(1);
    GlobalOptions global;
    app.add_option("--store", global.store_path, "Store file (line-delimited JSON)");
    app.add_option("--config", global.config_path, "Server config JSON (store_path is used)");

    auto* serve = app.add_subcommand("serve", "Run the HTTP service");

    auto* create = app.add_subcommand("create", "Create a session");
    std::string family = "exponential";
    std::vector<std::string> raw_params;
    std::vector<std::size_t> sizes{5, 30, 100};
    double tolerance = 1e-3;
    std::string key;
    std::string roster_path;
    std::string units = "days";
    create->add_option("--family", family, "exponential|normal|lognormal|uniform");
    create->add_option("--param", raw_params, "Distribution parameter, e.g. mean=50");
    create->add_option("--sizes", sizes, "Sample sizes")->delimiter(',');
    create->add_option("--tolerance", tolerance, "Relative verification tolerance");
    create->add_option("--key", key, "Session key (random when omitted)");
    create->add_option("--roster", roster_path, "File with one student id per line");
    create->add_option("--units", units, "Units shown with datasets");

    auto* list = app.add_subcommand("sessions", "List session ids");

    auto* simulate = app.add_subcommand("simulate", "Submit estimates for a synthetic class");
    std::string session_id;
    SimulationOptions sim;
    simulate->add_option("--session", session_id)->required();
    simulate->add_option("--students", sim.students)->required();
    simulate->add_option("--seed", sim.seed)->required();
    simulate->add_option("--noise", sim.noise, "Relative perturbation of each field");

    auto* summary = app.add_subcommand("summary", "Class summary for one estimator and n");
    std::string estimator_name;
    std::size_t n = 0;
    std::string format = "table";
    std::size_t bins = default_bin_count;
    summary->add_option("--session", session_id)->required();
    summary->add_option("--estimator", estimator_name)
        ->required()
        ->check(CLI::IsMember({"mean", "median"}));
    summary->add_option("--n", n)->required();
    summary->add_option("--format", format)->check(CLI::IsMember({"table", "json"}));
    summary->add_option("--bins", bins);

    auto* exporter = app.add_subcommand("export", "Write the accepted submissions as CSV");
    std::string out_path;
    exporter->add_option("--session", session_id)->required();
    exporter->add_option("--out", out_path)->required();

    try
    {
        app.parse(argc, argv);
    }
    catch (CLI::ParseError const& e)
    {
        int code = app.exit(e);
        return code == 0 ? exit_ok : exit_validation;
    }

    try
    {
        if (serve->parsed())
        {
            if (global.config_path.empty())
            {
                throw ValidationError("serve requires --config", "config");
            }
            // Blocked before any thread starts so only the waiter sees them.
            sigset_t stop_signals;
            sigemptyset(&stop_signals);
            sigaddset(&stop_signals, SIGINT);
            sigaddset(&stop_signals, SIGTERM);
            ::pthread_sigmask(SIG_BLOCK, &stop_signals, nullptr);
            auto config = load_server_config(global.config_path);
            if (!global.store_path.empty())
            {
                config.store_path = global.store_path;
            }
            Store store(config.store_path);
            SessionManager sessions(store);
            ApiRouter router(sessions, api_options(config));
            HttpServer server(router, config);
            int port = server.bind();
            std::fprintf(stderr, "classlab listening on %s:%d (store %s)\n",
                         config.bind_address.c_str(), port, config.store_path.c_str());
            std::thread waiter([&server, &stop_signals] {
                int sig = 0;
                ::sigwait(&stop_signals, &sig);
                server.stop();
            });
            server.listen();
            // Wake the waiter if listen returned on its own.
            ::pthread_kill(waiter.native_handle(), SIGTERM);
            waiter.join();
            return exit_ok;
        }

        Store store(resolve_store(global));
        SessionManager sessions(store);

        if (create->parsed())
        {
            SessionConfig config;
            config.session_key = key;
            config.spec = DistributionSpec::from_named(family_from_string(family),
                                                       raw_params.empty() && family == "exponential"
                                                           ? parse_params({"mean=50"})
                                                           : parse_params(raw_params));
            config.sample_sizes = sizes;
            config.tolerance = tolerance;
            config.units = units;
            if (!roster_path.empty())
            {
                config.roster = read_roster(roster_path);
            }
            auto id = sessions.create_session(config);
            auto stored = sessions.session(id);
            Json out{{"session_id", id}, {"instructor_token", stored.config.instructor_token}};
            std::cout << out.dump() << "\n";
        }
        else if (list->parsed())
        {
            for (auto const& id : sessions.list_sessions())
            {
                std::cout << id << "\n";
            }
        }
        else if (simulate->parsed())
        {
            auto report = simulate_class(sessions, session_id, sim);
            std::cout << Json{{"attempted", report.attempted}, {"accepted", report.accepted}}.dump()
                      << "\n";
        }
        else if (summary->parsed())
        {
            auto s = class_summary(sessions, session_id, estimator_from_string(estimator_name),
                                   n, bins);
            if (format == "json")
            {
                std::cout << to_json(s).dump(2) << "\n";
            }
            else
            {
                print_table(s, session_id);
            }
        }
        else if (exporter->parsed())
        {
            auto csv = export_csv(sessions, session_id);
            std::ofstream out(out_path, std::ios::binary);
            if (!out || !(out << csv) || !out.flush())
            {
                throw StorageError("cannot write " + out_path);
            }
        }
        return exit_ok;
    }
    catch (Error const& e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code(e.code());
    }
    catch (std::exception const& e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return exit_io;
    }
}

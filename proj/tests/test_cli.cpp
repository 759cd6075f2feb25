#include <csignal>
#include <cstdio>
#include <fstream>
#include <thread>

#include <fcntl.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include <doctest.h>
#include <httplib.h>
#include <json.hpp>

#include "classlab/aggregate.hpp"
#include "classlab/errors.hpp"
#include "classlab/simulate.hpp"
#include "oracles.hpp"
#include "temp_dir.hpp"

using namespace classlab;
using nlohmann::json;

namespace {

struct RunResult
{
    int exit_code{-1};
    std::string out;
};

RunResult run(std::string const& args)
{
    std::string cmd = std::string(CLASSLAB_CLI_PATH) + " " + args + " 2>/dev/null";
    RunResult result;
    FILE* pipe = ::popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    char buf[4096];
    std::size_t got;
    while ((got = std::fread(buf, 1, sizeof buf, pipe)) > 0)
    {
        result.out.append(buf, got);
    }
    int status = ::pclose(pipe);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

std::string create_session(std::string const& store, std::string const& extra = "")
{
    auto r = run("--store " + store + " create --key cli-class " + extra);
    REQUIRE(r.exit_code == 0);
    return json::parse(r.out)["session_id"];
}

// Port the kernel picks for an ephemeral bind, released before returning.
int free_port()
{
    int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    socklen_t len = sizeof addr;
    int port = -1;
    if (::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) == 0
        && ::getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len) == 0)
    {
        port = ntohs(addr.sin_port);
    }
    ::close(fd);
    return port;
}

}  // namespace

TEST_CASE("simulate through the CLI")
{
    TempDir dir;
    auto store = (dir / "store.jsonl").string();
    auto id = create_session(store);

    auto r = run("--store " + store + " simulate --session " + id + " --students 80 --seed 1");
    CHECK(r.exit_code == 0);
    CHECK(json::parse(r.out) == json{{"attempted", 240}, {"accepted", 240}});

    // A second run replaces rows rather than adding to them.
    r = run("--store " + store + " simulate --session " + id + " --students 80 --seed 1");
    CHECK(r.exit_code == 0);
    auto csv_path = (dir / "out.csv").string();
    CHECK(run("--store " + store + " export --session " + id + " --out " + csv_path).exit_code
          == 0);
    auto rows = parse_csv(oracle::read_file(csv_path));
    CHECK(rows.size() == 240);
    CHECK(rows.front().student_id == "sim-0001");
    CHECK(rows.back().student_id == "sim-0080");

    auto noisy = create_session(store);
    r = run("--store " + store + " simulate --session " + noisy
            + " --students 80 --seed 1 --noise 0.5");
    CHECK(r.exit_code == 0);
    CHECK(json::parse(r.out) == json{{"attempted", 240}, {"accepted", 0}});
}

TEST_CASE("summary output formats")
{
    TempDir dir;
    auto store = (dir / "store.jsonl").string();
    auto id = create_session(store);
    REQUIRE(run("--store " + store + " simulate --session " + id + " --students 40 --seed 3")
                .exit_code
            == 0);

    auto table = run("--store " + store + " summary --session " + id
                     + " --estimator median --n 30");
    CHECK(table.exit_code == 0);
    CHECK(table.out.find("submissions: 40") != std::string::npos);
    CHECK(table.out.find("empirical SE:") != std::string::npos);
    CHECK(table.out.find('#') != std::string::npos);

    auto js = run("--store " + store + " summary --session " + id
                  + " --estimator mean --n 100 --format json --bins 10");
    CHECK(js.exit_code == 0);
    auto j = json::parse(js.out);
    CHECK(j["submission_count"] == 40);
    CHECK(j["histogram"]["densities"].size() == 10);
}

TEST_CASE("exit codes")
{
    TempDir dir;
    auto store = (dir / "store.jsonl").string();
    auto id = create_session(store);
    std::string s = "--store " + store + " ";

    CHECK(run(s + "summary --session nope --estimator mean --n 5").exit_code == 3);
    CHECK(run(s + "summary --session " + id + " --estimator mode --n 5").exit_code == 2);
    CHECK(run(s + "summary --session " + id + " --estimator mean --n 6").exit_code == 2);
    CHECK(run(s + "simulate --session " + id + " --students 3").exit_code == 2);
    CHECK(run(s + "simulate --session " + id + " --students 3 --seed 1 --noise -1").exit_code
          == 2);
    CHECK(run(s + "export --session " + id + " --out /nonexistent/dir/x.csv").exit_code == 4);
    CHECK(run(s + "create --family exponential --param mean=-4").exit_code == 2);
    CHECK(run(s + "create --family gamma --param k=2").exit_code == 2);
    CHECK(run(s + "create --sizes 30,5").exit_code == 2);
    CHECK(run(s + "serve").exit_code == 2);
    CHECK(run("--config /nonexistent/config.json sessions").exit_code == 4);
    CHECK(run("").exit_code == 2);

    auto listed = run(s + "sessions");
    CHECK(listed.exit_code == 0);
    CHECK(listed.out == id + "\n");
}

TEST_CASE("create with a roster and another family")
{
    TempDir dir;
    auto store = (dir / "store.jsonl").string();
    auto roster = dir / "roster.txt";
    std::ofstream(roster) << "ana\nben\n\n";
    auto id = create_session(store, "--family normal --param mu=10 --param sigma=2 --sizes 4,8 "
                                    "--roster " + roster.string());
    Store reopened(store);
    auto session = reopened.get_session(id);
    CHECK(session.config.spec == DistributionSpec::normal(10, 2));
    CHECK(session.config.sample_sizes == std::vector<std::size_t>{4, 8});
    CHECK(session.config.roster == std::vector<std::string>{"ana", "ben"});
    CHECK(session.config.session_key == "cli-class");
}

TEST_CASE("a 5000-student class recovers sigma/sqrt(n)")
{
    TempDir dir;
    auto store = (dir / "store.jsonl").string();
    auto id = create_session(store);
    auto r = run("--store " + store + " simulate --session " + id + " --students 5000 --seed 9");
    REQUIRE(r.exit_code == 0);
    CHECK(json::parse(r.out)["accepted"] == 15000);
    auto js = run("--store " + store + " summary --session " + id
                  + " --estimator mean --n 100 --format json");
    double se = json::parse(js.out)["empirical_se"];
    CHECK(se == doctest::Approx(5.0).epsilon(0.05));
}

TEST_CASE("serve answers requests until terminated")
{
    TempDir dir;
    auto store = (dir / "store.jsonl").string();
    auto id = create_session(store);

    int port = free_port();
    REQUIRE(port > 0);
    auto config = dir / "config.json";
    std::ofstream(config) << json{{"bind_address", "127.0.0.1"}, {"port", port},
                                  {"store_path", store}, {"poll_timeout_seconds", 1}}
                                 .dump();

    pid_t child = ::fork();
    REQUIRE(child >= 0);
    if (child == 0)
    {
        int devnull = ::open("/dev/null", O_WRONLY);
        ::dup2(devnull, STDERR_FILENO);
        ::execl(CLASSLAB_CLI_PATH, "classlab", "--config", config.c_str(), "serve",
                static_cast<char*>(nullptr));
        ::_exit(127);
    }

    httplib::Client client("127.0.0.1", port);
    httplib::Result response;
    for (int attempt = 0; attempt < 100 && !response; ++attempt)
    {
        std::this_thread::sleep_for(std::chrono::milliseconds(50));
        response = client.Get("/api/sessions/" + id + "/dataset?student=ana&n=5");
    }
    REQUIRE(response);
    CHECK(response->status == 200);
    CHECK(json::parse(response->body)["values"].size() == 5);

    ::kill(child, SIGTERM);
    int status = 0;
    ::waitpid(child, &status, 0);
    CHECK(WIFEXITED(status));
    CHECK(WEXITSTATUS(status) == 0);
}

TEST_CASE("simulate_class is deterministic and uses the verification path")
{
    auto run_once = [](double noise) {
        Store store;
        SessionManager::Options options;
        options.clock = [] { return parse_timestamp("2024-01-01T00:00:00.000Z"); };
        options.id_source = [] { return std::string("fixed"); };
        SessionManager sessions(store, options);
        SessionConfig config;
        config.session_key = "det";
        config.instructor_token = "t";
        auto id = sessions.create_session(config);
        auto report = simulate_class(sessions, id, {25, 42, noise});
        return std::make_pair(report.accepted, export_csv(sessions, id));
    };
    auto [accepted_a, csv_a] = run_once(0.0);
    auto [accepted_b, csv_b] = run_once(0.0);
    CHECK(accepted_a == 75);
    CHECK(csv_a == csv_b);

    // Noise inside the tolerance band still verifies; outside it never does.
    CHECK(run_once(0.0005).first == 75);
    CHECK(run_once(0.002).first == 0);
    CHECK(run_once(0.5).first == 0);

    CHECK(simulated_student_id(1) == "sim-0001");
    CHECK(simulated_student_id(12345) == "sim-12345");

    Store store;
    SessionManager sessions(store);
    CHECK_THROWS_AS(simulate_class(sessions, "none", {}), NotFoundError);
}

#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "classlab/api.hpp"

namespace classlab {

struct ServerConfig
{
    std::string bind_address{"127.0.0.1"};
    int port{8080};
    std::string store_path{"classlab-store.jsonl"};
    std::optional<std::string> admin_token;
    int poll_timeout_seconds{25};
    int threads{16};
};

using EnvLookup = std::function<std::optional<std::string>(char const*)>;

std::optional<std::string> process_env(char const* name);

// Reads the JSON config file, then applies CLASSLAB_PORT and CLASSLAB_STORE.
ServerConfig load_server_config(std::string const& path, EnvLookup const& env = process_env);
ServerConfig parse_server_config(std::string const& json_text,
                                 EnvLookup const& env = process_env);

ApiOptions api_options(ServerConfig const& config);

//---------------------------------------------------------------------------//
/*!
 * Serves an ApiRouter over HTTP.
 */
class HttpServer
{
  public:
    HttpServer(ApiRouter const& router, ServerConfig config);
    ~HttpServer();

    HttpServer(HttpServer const&) = delete;
    HttpServer& operator=(HttpServer const&) = delete;

    // Binds the socket; port 0 picks a free port. Returns the bound port.
    int bind();
    // Blocks until stop() is called.
    void listen();
    // Returns once a concurrent listen() is accepting connections.
    void wait_until_ready() const;
    void stop();

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace classlab

#include "classlab/server.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <httplib.h>

#include "classlab/codec.hpp"
#include "classlab/errors.hpp"

namespace classlab {
namespace {

int parse_port(std::string const& text, char const* source)
{
    char* end = nullptr;
    long value = std::strtol(text.c_str(), &end, 10);
    if (text.empty() || *end != '\0' || value < 0 || value > 65535)
    {
        throw ValidationError(std::string("invalid port in ") + source, "port");
    }
    return static_cast<int>(value);
}

std::string lower(std::string text)
{
    std::transform(text.begin(), text.end(), text.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return text;
}

}  // namespace

std::optional<std::string> process_env(char const* name)
{
    if (char const* value = std::getenv(name))
    {
        return std::string(value);
    }
    return std::nullopt;
}

ServerConfig parse_server_config(std::string const& json_text, EnvLookup const& env)
{
    ServerConfig config;
    Json j;
    try
    {
        j = Json::parse(json_text);
    }
    catch (Json::parse_error const& e)
    {
        throw ValidationError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object())
    {
        throw ValidationError("config must be a JSON object");
    }
    if (j.contains("bind_address"))
    {
        config.bind_address = require_string(j, "bind_address");
    }
    if (j.contains("port"))
    {
        config.port = parse_port(std::to_string(require_count(j, "port")), "config");
    }
    if (j.contains("store_path"))
    {
        config.store_path = require_string(j, "store_path");
    }
    if (j.contains("admin_token") && !j.at("admin_token").is_null())
    {
        config.admin_token = require_string(j, "admin_token");
    }
    if (j.contains("poll_timeout_seconds"))
    {
        config.poll_timeout_seconds
            = static_cast<int>(require_count(j, "poll_timeout_seconds"));
    }
    if (j.contains("threads"))
    {
        config.threads = std::max<int>(1, static_cast<int>(require_count(j, "threads")));
    }

    if (auto port = env("CLASSLAB_PORT"))
    {
        config.port = parse_port(*port, "CLASSLAB_PORT");
    }
    if (auto store = env("CLASSLAB_STORE"); store && !store->empty())
    {
        config.store_path = *store;
    }
    return config;
}

ServerConfig load_server_config(std::string const& path, EnvLookup const& env)
{
    std::ifstream in(path);
    if (!in)
    {
        throw StorageError("cannot read config file " + path);
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_server_config(buffer.str(), env);
}

ApiOptions api_options(ServerConfig const& config)
{
    ApiOptions options;
    options.admin_token = config.admin_token;
    options.poll_timeout = std::chrono::seconds(config.poll_timeout_seconds);
    return options;
}

//---------------------------------------------------------------------------//
struct HttpServer::Impl
{
    ApiRouter const& router;
    ServerConfig config;
    httplib::Server server;

    void handle(httplib::Request const& req, httplib::Response& res) const
    {
        HttpRequest request;
        request.method = req.method;
        request.path = req.path;
        for (auto const& [key, value] : req.params)
        {
            request.query.emplace(key, value);
        }
        for (auto const& [key, value] : req.headers)
        {
            request.headers.emplace(lower(key), value);
        }
        request.body = req.body;

        auto response = router.handle(request);
        res.status = response.status;
        for (auto const& [key, value] : response.headers)
        {
            res.set_header(key, value);
        }
        if (!response.content_type.empty())
        {
            res.set_content(response.body, response.content_type.c_str());
        }
    }
};

HttpServer::HttpServer(ApiRouter const& router, ServerConfig config)
    : impl_(new Impl{router, std::move(config), {}})
{
    auto& server = impl_->server;
    int threads = impl_->config.threads;
    server.new_task_queue = [threads] {
        return new httplib::ThreadPool(static_cast<std::size_t>(threads));
    };
    // Idle keep-alive connections hold a worker until this expires, which
    // also bounds how long stop() waits for them.
    server.set_keep_alive_timeout(1);
    auto handler = [impl = impl_.get()](httplib::Request const& req, httplib::Response& res) {
        impl->handle(req, res);
    };
    server.Get(".*", handler);
    server.Post(".*", handler);
    server.Put(".*", handler);
    server.Delete(".*", handler);
}

HttpServer::~HttpServer()
{
    stop();
}

int HttpServer::bind()
{
    auto& cfg = impl_->config;
    if (cfg.port == 0)
    {
        int port = impl_->server.bind_to_any_port(cfg.bind_address);
        if (port < 0)
        {
            throw StorageError("cannot bind " + cfg.bind_address);
        }
        cfg.port = port;
        return port;
    }
    if (!impl_->server.bind_to_port(cfg.bind_address, cfg.port))
    {
        throw StorageError("cannot bind " + cfg.bind_address + ":" + std::to_string(cfg.port));
    }
    return cfg.port;
}

void HttpServer::listen()
{
    impl_->server.listen_after_bind();
}

void HttpServer::wait_until_ready() const
{
    impl_->server.wait_until_ready();
}

void HttpServer::stop()
{
    if (impl_ && impl_->server.is_running())
    {
        impl_->server.stop();
    }
}

}  // namespace classlab

#pragma once

#include <filesystem>
#include <memory>
#include <string>

#include <httplib.h>

#include "mentor/service/mentor_service.hpp"

namespace mentor::service {

/// Binds MentorService to HTTP routes. Optionally serves a static UI bundle
/// at "/" when `ui_dir` exists.
class HttpServer {
public:
    explicit HttpServer(MentorService& service, std::filesystem::path ui_dir = {})
        : service_(service)
    {
        server_.set_default_headers({
            {"Access-Control-Allow-Origin", "*"},
            {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
            {"Access-Control-Allow-Headers", "Content-Type"},
        });
        server_.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) {
            res.status = 204;
        });

        server_.Post("/api/sessions", [this](const httplib::Request& req, httplib::Response& res) {
            send(res, service_.create_session(req.body));
        });
        server_.Post(R"(/api/sessions/([A-Za-z0-9_-]+)/messages)",
                     [this](const httplib::Request& req, httplib::Response& res) {
                         send(res, service_.post_message(req.matches[1], req.body));
                     });
        server_.Get(R"(/api/sessions/([A-Za-z0-9_-]+))",
                    [this](const httplib::Request& req, httplib::Response& res) {
                        send(res, service_.get_session(req.matches[1]));
                    });
        server_.Get(R"(/api/sessions/([A-Za-z0-9_-]+)/map)",
                    [this](const httplib::Request& req, httplib::Response& res) {
                        send(res, service_.get_map(req.matches[1]));
                    });
        server_.Get(R"(/api/sessions/([A-Za-z0-9_-]+)/hypotheses)",
                    [this](const httplib::Request& req, httplib::Response& res) {
                        send(res, service_.get_hypotheses(req.matches[1]));
                    });
        server_.Get(R"(/api/sessions/([A-Za-z0-9_-]+)/export)",
                    [this](const httplib::Request& req, httplib::Response& res) {
                        const auto format = req.has_param("format") ? req.get_param_value("format")
                                                                    : std::string("json");
                        send(res, service_.export_session(req.matches[1], format));
                    });

        server_.set_exception_handler(
            [](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
                std::string what = "unexpected error";
                try {
                    std::rethrow_exception(ep);
                } catch (const std::exception& e) {
                    what = e.what();
                } catch (...) {
                }
                const auto r = error_response({500, "internal_error", what});
                res.status = r.status;
                res.set_content(r.body, r.content_type);
            });
        server_.set_error_handler([](const httplib::Request& req, httplib::Response& res) {
            if (res.status == 404 && req.path.starts_with("/api/") && res.body.empty()) {
                const auto r = error_response({404, "not_found", "no route for " + req.path});
                res.set_content(r.body, r.content_type);
            }
        });

        std::error_code ec;
        if (!ui_dir.empty() && std::filesystem::is_directory(ui_dir, ec)) {
            server_.set_mount_point("/", ui_dir.string());
        }
    }

    /// Binds without serving. Port 0 picks a free port. Returns the bound
    /// port, or -1 on failure.
    int bind(const std::string& host, int port)
    {
        if (port == 0) {
            port_ = server_.bind_to_any_port(host);
        } else {
            port_ = server_.bind_to_port(host, port) ? port : -1;
        }
        return port_;
    }

    /// Blocks until stop() is called.
    bool serve() { return server_.listen_after_bind(); }

    void stop() { server_.stop(); }
    bool running() const { return server_.is_running(); }
    void wait_until_ready() const { server_.wait_until_ready(); }
    int port() const noexcept { return port_; }

private:
    MentorService& service_;
    httplib::Server server_;
    int port_ = -1;

    static void send(httplib::Response& res, const Response& r)
    {
        res.status = r.status;
        res.set_content(r.body, r.content_type);
    }
};

}  // namespace mentor::service

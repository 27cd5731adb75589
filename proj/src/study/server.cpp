#include "camo/server.hpp"

#include <functional>

#include "httplib.h"
#include "json.hpp"

#include "camo/errors.hpp"

namespace camo {

using nlohmann::json;

namespace {

void send_error(httplib::Response& res, int status, const std::string& kind, const std::string& message) {
    res.status = status;
    res.set_content(json{{"error", kind}, {"message", message}}.dump(), "application/json");
}

// Runs a handler and maps toolkit errors to HTTP status codes.
void guarded(httplib::Response& res, const std::function<void()>& body) {
    try {
        body();
    } catch (const NotFoundError& e) {
        send_error(res, 404, e.kind(), e.what());
    } catch (const ConflictError& e) {
        send_error(res, 409, e.kind(), e.what());
    } catch (const ForbiddenError& e) {
        send_error(res, 403, e.kind(), e.what());
    } catch (const Error& e) {
        send_error(res, 400, e.kind(), e.what());
    } catch (const json::exception& e) {
        send_error(res, 400, "bad_request", e.what());
    } catch (const std::exception& e) {
        send_error(res, 500, "internal", e.what());
    }
}

std::string token_of(const httplib::Request& req, const char* header, const char* param) {
    if (req.has_header(header)) return req.get_header_value(header);
    if (req.has_param(param)) return req.get_param_value(param);
    return {};
}

}  // namespace

StudyServer::StudyServer(StudyService& service, ServerOptions options)
    : service_(service), options_(std::move(options)), server_(std::make_unique<httplib::Server>()) {
    routes();
}

StudyServer::~StudyServer() { stop(); }

void StudyServer::routes() {
    auto& s = *server_;
    s.Post("/session", [this](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            const json body = json::parse(req.body);
            const SessionInfo info = service_.create_session(body.at("participant_id").get<std::string>());
            res.set_content(json{{"session_token", info.session_token}, {"trial_count", info.trial_count}}.dump(),
                            "application/json");
        });
    });
    s.Get("/trial/next", [this](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            const std::string token = token_of(req, "X-Session-Token", "token");
            if (token.empty()) throw NotFoundError("missing session token");
            const auto ticket = service_.next_trial(token);
            if (!ticket) {
                res.set_content(json{{"done", true}}.dump(), "application/json");
                return;
            }
            res.set_content(json{{"trial_id", ticket->trial_id},
                                 {"image_url", ticket->image_url},
                                 {"time_limit", ticket->time_limit},
                                 {"index", ticket->index},
                                 {"is_training", ticket->is_training},
                                 {"done", false}}
                                .dump(),
                            "application/json");
        });
    });
    s.Get(R"(/trial/([0-9a-f]+)/image)", [this](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            const auto bytes = service_.trial_image(req.matches[1]);
            res.set_content(std::string(bytes.begin(), bytes.end()), "image/png");
        });
    });
    s.Post(R"(/trial/([0-9a-f]+)/click)", [this](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            const std::string id = req.matches[1];
            const json body = json::parse(req.body);
            std::optional<std::array<double, 2>> click;
            const bool has_x = body.contains("x") && !body["x"].is_null();
            const bool has_y = body.contains("y") && !body["y"].is_null();
            if (has_x != has_y) throw ContractError("click needs both x and y, or neither for a timeout");
            if (has_x) click = std::array<double, 2>{body["x"].get<double>(), body["y"].get<double>()};
            const double elapsed_ms = body.value("elapsed_ms", 0.0);
            const StudyResponse r = service_.submit_response(id, click, elapsed_ms / 1000.0);
            res.set_content(json{{"hit", r.hit},
                                 {"time_to_click", r.time_to_click},
                                 {"timeout", !r.click.has_value()},
                                 {"outline_url", "/trial/" + id + "/outline"}}
                                .dump(),
                            "application/json");
        });
    });
    s.Get(R"(/trial/([0-9a-f]+)/outline)", [this](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            const auto bytes = service_.outline_png(req.matches[1]);
            res.set_content(std::string(bytes.begin(), bytes.end()), "image/png");
        });
    });
    s.Get("/results.csv", [this](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            const std::string token = token_of(req, "X-Admin-Token", "admin_token");
            if (options_.admin_token.empty() || token != options_.admin_token)
                throw ForbiddenError("results need the admin token");
            res.set_content(study_table_csv(service_.aggregate()), "text/csv");
        });
    });
    if (!options_.static_dir.empty()) s.set_mount_point("/app", options_.static_dir.string());
}

int StudyServer::start() {
    if (options_.port == 0)
        port_ = server_->bind_to_any_port(options_.host);
    else if (server_->bind_to_port(options_.host, options_.port))
        port_ = options_.port;
    else
        port_ = -1;
    if (port_ <= 0) throw Error("io", "cannot bind " + options_.host + ":" + std::to_string(options_.port));
    thread_ = std::thread([this] { server_->listen_after_bind(); });
    server_->wait_until_ready();
    return port_;
}

void StudyServer::run() {
    port_ = options_.port;
    if (!server_->listen(options_.host, options_.port))
        throw Error("io", "cannot listen on " + options_.host + ":" + std::to_string(options_.port));
}

void StudyServer::stop() {
    if (server_) server_->stop();
    if (thread_.joinable()) thread_.join();
}

}  // namespace camo

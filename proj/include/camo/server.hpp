#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <thread>

#include "camo/study.hpp"

namespace httplib {
class Server;
}

namespace camo {

struct ServerOptions {
    std::string host = "127.0.0.1";
    int port = 8080;  // 0 picks a free port
    std::string admin_token;
    std::filesystem::path static_dir;  // optional participant client bundle
};

/// HTTP JSON front end of a StudyService (see docs/study_api.md).
class StudyServer {
public:
    StudyServer(StudyService& service, ServerOptions options);
    ~StudyServer();
    StudyServer(const StudyServer&) = delete;
    StudyServer& operator=(const StudyServer&) = delete;

    /// Binds and serves on a background thread; returns the bound port.
    int start();
    /// Binds and serves on the calling thread until stop().
    void run();
    void stop();
    int port() const { return port_; }

private:
    void routes();

    StudyService& service_;
    ServerOptions options_;
    std::unique_ptr<httplib::Server> server_;
    std::thread thread_;
    int port_ = 0;
};

}  // namespace camo

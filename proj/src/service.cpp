#include "accel/service.hpp"

#include <thread>

#include "httplib.h"

namespace accel::invoker {

struct InvokerService::Impl {
    Invoker& inv;
    httplib::Server server;
    std::thread thread;
    int port = 0;

    explicit Impl(Invoker& i) : inv(i) {}

    void routes() {
        server.new_task_queue = [] { return new httplib::ThreadPool(32); };
        server.Put(R"(/function/([^/]+))",
                   [this](const httplib::Request& req, httplib::Response& res) {
                       std::string name = req.matches[1];
                       try {
                           inv.register_function(name, req.body);
                           Json out;
                           out["ok"] = true;
                           out["mode"] = mode_name(inv.mode_of(name));
                           res.set_content(out.dump(), "application/json");
                       } catch (const RegistrationError& e) {
                           Json out;
                           out["error"] = e.what();
                           res.status = 400;
                           res.set_content(out.dump(), "application/json");
                       }
                   });
        server.Post(R"(/function/([^/]+))",
                    [this](const httplib::Request& req, httplib::Response& res) {
                        std::string name = req.matches[1];
                        interp::Request r;
                        r.method = "POST";
                        r.path = req.path;
                        if (!req.body.empty()) {
                            Json body = Json::parse(req.body, nullptr, false);
                            if (body.is_discarded()) {
                                res.status = 400;
                                res.set_content("{\"error\":\"request body is not JSON\"}",
                                                "application/json");
                                return;
                            }
                            r.body = std::move(body);
                        }
                        try {
                            interp::Response out = inv.dispatch(name, r);
                            res.status = out.status;
                            res.set_content(out.body, out.content_type);
                        } catch (const NotFound& e) {
                            Json out;
                            out["error"] = e.what();
                            res.status = 404;
                            res.set_content(out.dump(), "application/json");
                        }
                    });
        server.Get(R"(/function/([^/]+)/status)",
                   [this](const httplib::Request& req, httplib::Response& res) {
                       try {
                           res.set_content(inv.status(req.matches[1]).dump(),
                                           "application/json");
                       } catch (const NotFound& e) {
                           Json out;
                           out["error"] = e.what();
                           res.status = 404;
                           res.set_content(out.dump(), "application/json");
                       }
                   });
        server.Get(R"(/function/([^/]+)/trace)",
                   [this](const httplib::Request& req, httplib::Response& res) {
                       try {
                           res.set_content(inv.trace_json(req.matches[1]).dump(2),
                                           "application/json");
                       } catch (const NotFound& e) {
                           Json out;
                           out["error"] = e.what();
                           res.status = 404;
                           res.set_content(out.dump(), "application/json");
                       }
                   });
        server.Get("/healthz", [](const httplib::Request&, httplib::Response& res) {
            res.set_content("ok", "text/plain");
        });
    }
};

InvokerService::InvokerService(Invoker& inv) : impl_(std::make_unique<Impl>(inv)) {
    impl_->routes();
}

InvokerService::~InvokerService() { stop(); }

void InvokerService::start(int port) {
    if (port == 0) {
        impl_->port = impl_->server.bind_to_any_port("0.0.0.0");
    } else {
        impl_->port = port;
        impl_->server.bind_to_port("0.0.0.0", port);
    }
    impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
    impl_->server.wait_until_ready();
}

void InvokerService::stop() {
    if (impl_->thread.joinable()) {
        impl_->server.stop();
        impl_->thread.join();
    }
}

int InvokerService::port() const { return impl_->port; }

std::string InvokerService::base_url() const {
    return "http://127.0.0.1:" + std::to_string(impl_->port);
}

}  // namespace accel::invoker

#include "accel/upstream.hpp"

#include <map>
#include <memory>

#include "httplib.h"

namespace accel {

// httplib clients are not safe for concurrent requests, so each thread keeps
// its own keep-alive connection per base URL.
struct HttpUpstream::Impl {
    std::string base;

    httplib::Client& client() {
        thread_local std::map<std::string, std::unique_ptr<httplib::Client>> per_thread;
        auto it = per_thread.find(base);
        if (it == per_thread.end()) {
            auto c = std::make_unique<httplib::Client>(base);
            c->set_connection_timeout(5, 0);
            c->set_read_timeout(10, 0);
            c->set_keep_alive(true);
            it = per_thread.emplace(base, std::move(c)).first;
        }
        return *it->second;
    }
};

HttpUpstream::HttpUpstream(std::string base_url)
    : impl_(std::make_unique<Impl>(Impl{std::move(base_url)})) {}

HttpUpstream::~HttpUpstream() = default;

namespace {
std::string with_slash(const std::string& path) {
    if (!path.empty() && path[0] == '/') return path;
    return "/" + path;
}
}  // namespace

UpstreamResponse HttpUpstream::get(const std::string& path) {
    auto res = impl_->client().Get(with_slash(path));
    if (!res) return UpstreamResponse{0, ""};
    return UpstreamResponse{res->status, res->body};
}

UpstreamResponse HttpUpstream::post(const std::string& path, const std::string& body) {
    auto res = impl_->client().Post(with_slash(path), body, "application/json");
    if (!res) return UpstreamResponse{0, ""};
    return UpstreamResponse{res->status, res->body};
}

void MapUpstream::route(const std::string& path, std::string body, int status) {
    gets_[with_slash(path)] = UpstreamResponse{status, std::move(body)};
}

void MapUpstream::route_post(const std::string& path,
                             std::function<UpstreamResponse(const std::string&)> handler) {
    posts_[with_slash(path)] = std::move(handler);
}

UpstreamResponse MapUpstream::get(const std::string& path) {
    auto it = gets_.find(with_slash(path));
    if (it == gets_.end()) return UpstreamResponse{404, "{\"error\":\"not found\"}"};
    return it->second;
}

UpstreamResponse MapUpstream::post(const std::string& path, const std::string& body) {
    auto it = posts_.find(with_slash(path));
    if (it == posts_.end()) return UpstreamResponse{404, "{\"error\":\"not found\"}"};
    return it->second(body);
}

}  // namespace accel

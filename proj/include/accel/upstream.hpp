#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>

namespace accel {

struct UpstreamResponse {
    int status = 0;  // 0 means the request failed entirely
    std::string body;
};

// The HTTP client the builtin API talks through; pointed at the mock server
// in benchmarks and tests.
class UpstreamClient {
  public:
    virtual ~UpstreamClient() = default;
    virtual UpstreamResponse get(const std::string& path) = 0;
    virtual UpstreamResponse post(const std::string& path, const std::string& body) = 0;
};

// Real HTTP client against a base URL such as "http://127.0.0.1:9000".
class HttpUpstream : public UpstreamClient {
  public:
    explicit HttpUpstream(std::string base_url);
    ~HttpUpstream() override;
    UpstreamResponse get(const std::string& path) override;
    UpstreamResponse post(const std::string& path, const std::string& body) override;

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// In-process canned upstream for unit tests and the Python bindings.
class MapUpstream : public UpstreamClient {
  public:
    void route(const std::string& path, std::string body, int status = 200);
    void route_post(const std::string& path,
                    std::function<UpstreamResponse(const std::string&)> handler);

    UpstreamResponse get(const std::string& path) override;
    UpstreamResponse post(const std::string& path, const std::string& body) override;

  private:
    std::map<std::string, UpstreamResponse> gets_;
    std::map<std::string, std::function<UpstreamResponse(const std::string&)>> posts_;
};

}  // namespace accel

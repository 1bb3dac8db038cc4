#pragma once

#include <memory>
#include <string>

#include "json.hpp"

namespace accel::bench {

using Json = nlohmann::ordered_json;

struct MockConfig {
    int port = 0;         // 0 picks an ephemeral port
    int delay_ms = 1;     // artificial service delay per request
};

// The mock upstream the benchmarks talk to: canned fixtures for the read-only
// routes plus a version-checked, transaction-deduplicating store for the
// banking benchmark so that re-executed requests leave it unchanged.
class MockServer {
  public:
    explicit MockServer(MockConfig config = {});
    ~MockServer();

    // Starts serving on a background thread and returns once reachable.
    void start();
    void stop();

    int port() const;
    std::string base_url() const;

    // Fixtures, exposed for oracle computations in tests.
    static Json passwords_fixture();
    static Json words_fixture();
    static Json maze_fixture();

    // Test hook: current balance of an account in the banking store.
    Json banking_account(const std::string& account);

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace accel::bench

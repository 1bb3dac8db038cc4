#pragma once

#include <memory>
#include <string>

#include "accel/invoker.hpp"

namespace accel::invoker {

// HTTP surface of the invoker:
//   PUT  /function/{name}            register (body is guest source)
//   POST /function/{name}            invoke
//   GET  /function/{name}/status     mode and counters
//   GET  /function/{name}/trace      handler table JSON
class InvokerService {
  public:
    explicit InvokerService(Invoker& inv);
    ~InvokerService();

    void start(int port);  // port 0 binds an ephemeral port
    void stop();
    int port() const;
    std::string base_url() const;

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace accel::invoker

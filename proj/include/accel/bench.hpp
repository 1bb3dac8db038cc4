#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"

namespace accel::bench {

using Json = nlohmann::ordered_json;

// Independent reference computation for a benchmark: given a request body,
// the exact response body the function must produce against a fresh mock.
// Stateful where the benchmark is (banking tracks the store it mutates).
class ResponseOracle {
  public:
    virtual ~ResponseOracle() = default;
    virtual std::string expect(const Json& request_body) = 0;
};

struct BenchmarkDef {
    std::string name;
    std::string source;
    // Draws one request body; deterministic given the generator state.
    std::function<Json(std::mt19937_64&)> generate;
    // Inputs that flip branches the generator never exercises; each one must
    // abort the fast sandbox on a fully warmed trace.
    std::vector<Json> adversarial;
    std::function<std::unique_ptr<ResponseOracle>()> make_oracle;
};

const std::vector<BenchmarkDef>& benchmarks();
const BenchmarkDef& benchmark(const std::string& name);

}  // namespace accel::bench

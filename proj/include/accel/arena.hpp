#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "accel/dyn.hpp"

namespace accel::exec {

struct InstructionLimitExceeded : std::runtime_error {
    InstructionLimitExceeded() : std::runtime_error("instruction limit exceeded") {}
};

struct MemoryLimitExceeded : std::runtime_error {
    MemoryLimitExceeded() : std::runtime_error("arena memory limit exceeded") {}
};

struct ResourceLimits {
    uint64_t max_instructions = 10'000'000;
    size_t max_bytes = 128ull * 1024 * 1024;
};

struct ArenaStats {
    uint64_t instructions = 0;
    size_t peak_bytes = 0;
    size_t live_cells_after = 0;
};

using ObjStore = std::vector<std::pair<std::string, DynValue>>;
using ArrStore = std::vector<DynValue>;
using EnvStore = std::vector<std::pair<std::string, Addr>>;

// Per-request arena: addressable value cells plus object/array/environment
// storage. Nothing is freed individually; end_request clears everything at
// once. The instruction counter ticks at loop heads and handler entries.
class RequestArena {
  public:
    explicit RequestArena(ResourceLimits limits = {}) : limits_(limits) {}

    Addr alloc_cell(DynValue v) {
        charge(kCellCost + v.s.size());
        cells_.push_back(std::move(v));
        return static_cast<Addr>(cells_.size() - 1);
    }
    DynValue& cell(Addr a) {
        if (a >= cells_.size()) throw std::out_of_range("dangling arena address");
        return cells_[a];
    }

    uint32_t alloc_object() {
        charge(kContainerCost);
        objects_.emplace_back();
        return static_cast<uint32_t>(objects_.size() - 1);
    }
    ObjStore& object(uint32_t id) { return objects_.at(id); }

    uint32_t alloc_array() {
        charge(kContainerCost);
        arrays_.emplace_back();
        return static_cast<uint32_t>(arrays_.size() - 1);
    }
    ArrStore& array(uint32_t id) { return arrays_.at(id); }

    uint32_t alloc_env() {
        charge(kContainerCost);
        envs_.emplace_back();
        return static_cast<uint32_t>(envs_.size() - 1);
    }
    EnvStore& env(uint32_t id) { return envs_.at(id); }

    // Accounting for container growth (fields, items, string payloads).
    void charge(size_t bytes) {
        bytes_used_ += bytes;
        if (bytes_used_ > peak_bytes_) peak_bytes_ = bytes_used_;
        if (bytes_used_ > limits_.max_bytes) throw MemoryLimitExceeded();
    }

    void count_instruction() {
        if (++instructions_ > limits_.max_instructions) throw InstructionLimitExceeded();
    }

    uint64_t instructions() const { return instructions_; }
    size_t bytes_used() const { return bytes_used_; }
    size_t peak_bytes() const { return peak_bytes_; }
    size_t live_cells() const { return cells_.size() + objects_.size() + arrays_.size() + envs_.size(); }

    // Frees every value at once and reports what the request consumed.
    ArenaStats end_request() {
        ArenaStats stats;
        stats.instructions = instructions_;
        stats.peak_bytes = peak_bytes_;
        cells_.clear();
        objects_.clear();
        arrays_.clear();
        envs_.clear();
        bytes_used_ = 0;
        stats.live_cells_after = live_cells();
        return stats;
    }

    static constexpr size_t kCellCost = 48;
    static constexpr size_t kContainerCost = 64;
    static constexpr size_t kEntryCost = 40;

  private:
    std::vector<DynValue> cells_;
    std::vector<ObjStore> objects_;
    std::vector<ArrStore> arrays_;
    std::vector<EnvStore> envs_;
    size_t bytes_used_ = 0;
    size_t peak_bytes_ = 0;
    uint64_t instructions_ = 0;
    ResourceLimits limits_;
};

}  // namespace accel::exec

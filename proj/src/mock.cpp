#include "accel/mock.hpp"

#include <atomic>
#include <map>
#include <mutex>
#include <thread>

#include "httplib.h"

namespace accel::bench {

namespace {

Json build_passwords() {
    Json j = Json::object();
    j["alice"] = "correct-horse";
    j["bob"] = "hunter2";
    j["carol"] = "tr0ub4dor";
    j["dave"] = "open-sesame";
    return j;
}

Json build_words() {
    // Small dictionary with shared prefixes so autocomplete has real work.
    static const char* words[] = {
        "act",     "actor",   "acute",    "adapt",   "adaptive", "add",     "added",
        "banana",  "band",    "bandage",  "bank",    "banker",   "banking", "bar",
        "car",     "carbon",  "card",     "care",    "career",   "careful", "cargo",
        "data",    "date",    "dawn",     "day",     "deal",     "debate",  "debt",
        "echo",    "eclipse", "edge",     "edit",    "editor",   "effect",  "effort",
        "fabric",  "face",    "fact",     "factor",  "fade",     "fail",    "faint",
        "gadget",  "gain",    "galaxy",   "game",    "gamma",    "gap",     "garden",
        "habit",   "hail",    "hair",     "half",    "hall",     "halt",    "hand",
        "ice",     "icon",    "idea",     "ideal",   "identify", "idle",    "ignore",
        "jacket",  "jade",    "jaguar",   "jam",     "jar",      "jazz",    "jeans",
        "keen",    "keep",    "kernel",   "kettle",  "key",      "keyboard", "kick",
        "lab",     "label",   "labor",    "lace",    "lack",     "ladder",  "lake",
        "machine", "macro",   "magic",    "magnet",  "mail",     "main",    "major",
        "name",    "napkin",  "narrow",   "nation",  "native",   "nature",  "navy",
        "oak",     "oasis",   "object",   "oblige",  "observe",  "obtain",  "occur",
        "pace",    "pack",    "package",  "pact",    "page",     "paint",   "pair",
        "quack",   "quality", "quantum",  "quark",   "quarter",  "queen",   "query",
        "rabbit",  "race",    "rack",     "radar",   "radio",    "rail",    "rain",
        "sad",     "saddle",  "safe",     "safety",  "sail",     "salad",   "sale",
        "table",   "tackle",  "tag",      "tail",    "take",     "tale",    "talent",
        "ugly",    "umbrella", "uncle",   "under",   "undo",     "unique",  "unit",
        "vacuum",  "vague",   "valid",    "valley",  "value",    "van",     "vapor",
        "wage",    "wagon",   "wait",     "wake",    "walk",     "wall",    "want",
        "yacht",   "yard",    "yarn",     "year",    "yell",     "yellow",  "yield",
        "zeal",    "zebra",   "zero",     "zigzag",  "zinc",     "zone",    "zoom",
    };
    Json arr = Json::array();
    for (const char* w : words) arr.push_back(w);
    Json j;
    j["words"] = std::move(arr);
    return j;
}

Json build_maze() {
    // 32x32 grid, 0 = open, 1 = wall. Vertical walls every fourth column with
    // alternating gaps keep the open region connected but the paths long.
    const int n = 32;
    Json rows = Json::array();
    for (int r = 0; r < n; r++) {
        Json row = Json::array();
        for (int c = 0; c < n; c++) {
            int wall = 0;
            if (r == 0 || c == 0 || r == n - 1 || c == n - 1) wall = 1;
            else if (c % 4 == 0) {
                int gap = (c / 4) % 2 == 0 ? 2 : n - 3;
                if (r != gap) wall = 1;
            }
            row.push_back(wall);
        }
        rows.push_back(std::move(row));
    }
    Json j;
    j["grid"] = std::move(rows);
    return j;
}

}  // namespace

Json MockServer::passwords_fixture() { return build_passwords(); }
Json MockServer::words_fixture() { return build_words(); }
Json MockServer::maze_fixture() { return build_maze(); }

struct MockServer::Impl {
    MockConfig config;
    httplib::Server server;
    std::thread thread;
    int port = 0;

    // Banking store: account -> {balance, version}; committed transactions are
    // remembered so a replayed commit returns its original result without
    // applying again.
    std::mutex bank_mu;
    std::map<std::string, std::pair<int64_t, int64_t>> accounts;  // balance, version
    std::map<std::string, Json> committed_txns;

    void delay() const {
        if (config.delay_ms > 0)
            std::this_thread::sleep_for(std::chrono::milliseconds(config.delay_ms));
    }

    std::pair<int64_t, int64_t>& account_ref(const std::string& name) {
        auto it = accounts.find(name);
        if (it == accounts.end())
            it = accounts.emplace(name, std::make_pair(int64_t{1000}, int64_t{0})).first;
        return it->second;
    }

    void routes() {
        server.new_task_queue = [] { return new httplib::ThreadPool(32); };
        server.Get("/passwords.json", [this](const httplib::Request&, httplib::Response& res) {
            delay();
            res.set_content(build_passwords().dump(), "application/json");
        });
        server.Get("/words.json", [this](const httplib::Request&, httplib::Response& res) {
            delay();
            res.set_content(build_words().dump(), "application/json");
        });
        server.Get("/maze.json", [this](const httplib::Request&, httplib::Response& res) {
            delay();
            res.set_content(build_maze().dump(), "application/json");
        });
        server.Post("/upload", [this](const httplib::Request& req, httplib::Response& res) {
            delay();
            Json out;
            out["ok"] = true;
            out["length"] = req.body.size();
            res.set_content(out.dump(), "application/json");
        });
        server.Post("/github/status",
                    [this](const httplib::Request& req, httplib::Response& res) {
                        delay();
                        Json body = Json::parse(req.body, nullptr, false);
                        Json out;
                        out["ok"] = true;
                        out["state"] = body.is_object() && body.contains("state")
                                           ? body["state"]
                                           : Json(nullptr);
                        res.set_content(out.dump(), "application/json");
                    });
        server.Post("/datastore/get",
                    [this](const httplib::Request& req, httplib::Response& res) {
                        delay();
                        Json body = Json::parse(req.body, nullptr, false);
                        std::string account =
                            body.is_object() && body.contains("account")
                                ? body["account"].get<std::string>()
                                : "";
                        Json out;
                        {
                            std::lock_guard lock(bank_mu);
                            auto& [balance, version] = account_ref(account);
                            out["balance"] = balance;
                            out["version"] = version;
                        }
                        res.set_content(out.dump(), "application/json");
                    });
        server.Post("/datastore/commit",
                    [this](const httplib::Request& req, httplib::Response& res) {
                        delay();
                        Json body = Json::parse(req.body, nullptr, false);
                        if (!body.is_object() || !body.contains("txn")) {
                            res.status = 400;
                            res.set_content("{\"error\":\"missing txn\"}", "application/json");
                            return;
                        }
                        std::string txn = body["txn"].get<std::string>();
                        std::string account = body.value("account", "");
                        int64_t new_balance = body.value("balance", int64_t{0});
                        int64_t base_version = body.value("baseVersion", int64_t{-1});
                        Json out;
                        {
                            std::lock_guard lock(bank_mu);
                            auto prior = committed_txns.find(txn);
                            if (prior != committed_txns.end()) {
                                // Idempotent replay: same result, no new effect.
                                res.set_content(prior->second.dump(), "application/json");
                                return;
                            }
                            auto& [balance, version] = account_ref(account);
                            if (version != base_version) {
                                out["committed"] = false;
                                out["balance"] = balance;
                            } else {
                                balance = new_balance;
                                version++;
                                out["committed"] = true;
                                out["balance"] = balance;
                            }
                            committed_txns[txn] = out;
                        }
                        res.set_content(out.dump(), "application/json");
                    });
    }
};

MockServer::MockServer(MockConfig config) : impl_(std::make_unique<Impl>()) {
    impl_->config = config;
    impl_->routes();
}

MockServer::~MockServer() { stop(); }

void MockServer::start() {
    if (impl_->config.port == 0) {
        impl_->port = impl_->server.bind_to_any_port("127.0.0.1");
    } else {
        impl_->port = impl_->config.port;
        impl_->server.bind_to_port("127.0.0.1", impl_->port);
    }
    impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
    impl_->server.wait_until_ready();
}

void MockServer::stop() {
    if (impl_->thread.joinable()) {
        impl_->server.stop();
        impl_->thread.join();
    }
}

int MockServer::port() const { return impl_->port; }

std::string MockServer::base_url() const {
    return "http://127.0.0.1:" + std::to_string(impl_->port);
}

Json MockServer::banking_account(const std::string& account) {
    std::lock_guard lock(impl_->bank_mu);
    auto& [balance, version] = impl_->account_ref(account);
    Json j;
    j["balance"] = balance;
    j["version"] = version;
    return j;
}

}  // namespace accel::bench

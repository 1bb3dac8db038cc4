#include "accel/bench.hpp"

#include <deque>
#include <map>

#include "accel/mock.hpp"

namespace accel::bench {

namespace {

// ---------------------------------------------------------------------------
// guest sources
// ---------------------------------------------------------------------------

const char* kAuthorizeSource = R"JS(
let c = require('containerless');

function main(req) {
  function F(resp) {
    let u = req.body.username;
    let p = req.body.password;
    if (u === 'admin') {
      c.respond('admin-blocked');
    } else {
      if (u === 'root') {
        c.respond('root-blocked');
      } else {
        if (resp[u] === p) {
          c.respond('ok');
        } else {
          c.respond('error');
        }
      }
    }
  }
  c.get('passwords.json', F);
}
)JS";

const char* kUploadSource = R"JS(
let c = require('containerless');

function main(req) {
  function F(resp) {
    if (req.body.debug === true) {
      c.respond({debug: true, echoed: resp});
    } else {
      if (req.body.verbose === true) {
        c.respond({ok: resp.ok, length: resp.length, verbose: true});
      } else {
        c.respond(resp);
      }
    }
  }
  c.post({url: 'upload', body: req.body.payload}, F);
}
)JS";

const char* kStatusSource = R"JS(
let c = require('containerless');

function main(req) {
  let state = 'failure';
  if (req.body.success === true) {
    state = 'success';
  }
  let payload = {state: state, description: req.body.description, context: 'ci/accel'};
  function F(resp) {
    if (req.body.dryRun === true) {
      c.respond({dryRun: true});
    } else {
      if (req.body.echo === true) {
        c.respond(payload);
      } else {
        c.respond({ok: resp.ok, state: state});
      }
    }
  }
  c.post({url: 'github/status', body: payload}, F);
}
)JS";

const char* kBankingSource = R"JS(
let c = require('containerless');

function main(req) {
  let acct = req.body.account;
  function Commit(resp) {
    if (resp.committed === true) {
      c.respond({committed: true, balance: resp.balance});
    } else {
      c.respond({committed: false, error: 'conflict'});
    }
  }
  function Got(resp) {
    if (req.body.audit === true) {
      c.respond({audit: true, balance: resp.balance});
    } else {
      let bal = resp.balance;
      let amount = req.body.amount;
      let ok = true;
      if (req.body.op === 'deposit') {
        bal = bal + amount;
      } else {
        if (req.body.op === 'withdraw') {
          if (bal < amount) {
            ok = false;
          } else {
            bal = bal - amount;
          }
        } else {
          ok = false;
        }
      }
      if (ok === true) {
        c.post({url: 'datastore/commit', body: {account: acct, balance: bal, baseVersion: resp.version, txn: req.body.txn}}, Commit);
      } else {
        c.respond({committed: false, error: 'rejected'});
      }
    }
  }
  c.post({url: 'datastore/get', body: {account: acct}}, Got);
}
)JS";

const char* kAutocompleteSource = R"JS(
let c = require('containerless');

function main(req) {
  function F(resp) {
    let words = resp.words;
    let prefix = req.body.prefix;
    let limit = req.body.limit;
    if (prefix === '*') {
      c.respond({all: true, count: words.length});
    } else {
      if (req.body.uppercase === true) {
        c.respond({error: 'uppercase search is unsupported'});
      } else {
        let out = [];
        let n = 0;
        let i = 0;
        while (i < words.length) {
          let w = words[i];
          let ok = true;
          if (w.length < prefix.length) {
            ok = false;
          } else {
            let j = 0;
            while (j < prefix.length) {
              if (w[j] === prefix[j]) {
                j = j + 1;
              } else {
                ok = false;
                j = prefix.length;
              }
            }
          }
          if (ok === true) {
            if (n < limit) {
              out[n] = w;
              n = n + 1;
            }
          }
          i = i + 1;
        }
        c.respond({prefix: prefix, matches: out, count: n});
      }
    }
  }
  c.get('words.json', F);
}
)JS";

const char* kMazeSource = R"JS(
let c = require('containerless');

function main(req) {
  function F(resp) {
    if (req.body.diag === true) {
      c.respond({error: 'diagonal movement is unsupported'});
    } else {
      if (req.body.wrap === true) {
        c.respond({error: 'wraparound movement is unsupported'});
      } else {
        let grid = resp.grid;
        let h = grid.length;
        let w = grid[0].length;
        let sr = req.body.sr;
        let sc = req.body.sc;
        let tr = req.body.tr;
        let tc = req.body.tc;
        let dist = [];
        let i = 0;
        while (i < h * w) {
          dist[i] = -1;
          i = i + 1;
        }
        let qr = [];
        let qc = [];
        let head = 0;
        let tail = 0;
        qr[tail] = sr;
        qc[tail] = sc;
        tail = tail + 1;
        dist[sr * w + sc] = 0;
        let dr = [0, 0, 1, -1];
        let dc = [1, -1, 0, 0];
        search: while (head < tail) {
          let cr = qr[head];
          let cc = qc[head];
          head = head + 1;
          if (cr === tr) {
            if (cc === tc) {
              break search;
            }
          }
          let d = dist[cr * w + cc];
          let k = 0;
          while (k < 4) {
            let nr = cr + dr[k];
            let nc = cc + dc[k];
            if (nr >= 0) {
              if (nr < h) {
                if (nc >= 0) {
                  if (nc < w) {
                    if (grid[nr][nc] === 0) {
                      if (dist[nr * w + nc] === -1) {
                        dist[nr * w + nc] = d + 1;
                        qr[tail] = nr;
                        qc[tail] = nc;
                        tail = tail + 1;
                      }
                    }
                  }
                }
              }
            }
            k = k + 1;
          }
        }
        c.respond({dist: dist[tr * w + tc]});
      }
    }
  }
  c.get('maze.json', F);
}
)JS";

// ---------------------------------------------------------------------------
// generators and oracles
// ---------------------------------------------------------------------------

std::string random_word(std::mt19937_64& rng, size_t min_len, size_t max_len) {
    std::uniform_int_distribution<size_t> len(min_len, max_len);
    std::uniform_int_distribution<int> ch('a', 'z');
    std::string s;
    size_t n = len(rng);
    for (size_t i = 0; i < n; i++) s += static_cast<char>(ch(rng));
    return s;
}

// authorize ------------------------------------------------------------------

Json authorize_generate(std::mt19937_64& rng) {
    static const std::vector<std::pair<std::string, std::string>> users = [] {
        std::vector<std::pair<std::string, std::string>> v;
        Json fixture = MockServer::passwords_fixture();
        for (auto it = fixture.begin(); it != fixture.end(); ++it)
            v.emplace_back(it.key(), it.value().get<std::string>());
        return v;
    }();
    std::uniform_int_distribution<size_t> pick(0, users.size() - 1);
    std::uniform_int_distribution<int> roll(0, 99);
    Json body;
    const auto& [user, password] = users[pick(rng)];
    int r = roll(rng);
    if (r < 80) {
        body["username"] = user;
        body["password"] = password;
    } else if (r < 90) {
        body["username"] = user;
        body["password"] = password + "-wrong";
    } else {
        body["username"] = "mallory";
        body["password"] = random_word(rng, 4, 10);
    }
    return body;
}

class AuthorizeOracle : public ResponseOracle {
  public:
    std::string expect(const Json& body) override {
        Json fixture = MockServer::passwords_fixture();
        std::string user = body.value("username", "");
        std::string password = body.value("password", "");
        if (user == "admin") return "admin-blocked";
        if (user == "root") return "root-blocked";
        if (fixture.contains(user) && fixture[user].get<std::string>() == password)
            return "ok";
        return "error";
    }
};

// upload ----------------------------------------------------------------------

Json upload_generate(std::mt19937_64& rng) {
    Json body;
    body["payload"] = random_word(rng, 8, 64);
    return body;
}

class UploadOracle : public ResponseOracle {
  public:
    std::string expect(const Json& body) override {
        // The function posts req.body.payload; the mock echoes {ok, length}
        // where length is the size of the JSON-encoded upload body.
        Json payload = body.contains("payload") ? body["payload"] : Json(nullptr);
        Json resp;
        resp["ok"] = true;
        resp["length"] = payload.dump().size();
        if (body.value("debug", false)) {
            Json out;
            out["debug"] = true;
            out["echoed"] = resp;
            return out.dump();
        }
        if (body.value("verbose", false)) {
            Json out;
            out["ok"] = resp["ok"];
            out["length"] = resp["length"];
            out["verbose"] = true;
            return out.dump();
        }
        return resp.dump();
    }
};

// status ----------------------------------------------------------------------

Json status_generate(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> coin(0, 1);
    Json body;
    body["success"] = coin(rng) == 1;
    body["description"] = "build " + random_word(rng, 4, 12);
    return body;
}

class StatusOracle : public ResponseOracle {
  public:
    std::string expect(const Json& body) override {
        std::string state = body.value("success", false) ? "success" : "failure";
        if (body.value("dryRun", false)) {
            Json out;
            out["dryRun"] = true;
            return out.dump();
        }
        if (body.value("echo", false)) {
            Json out;
            out["state"] = state;
            out["description"] = body.contains("description") ? body["description"]
                                                              : Json(nullptr);
            out["context"] = "ci/accel";
            return out.dump();
        }
        Json out;
        out["ok"] = true;
        out["state"] = state;
        return out.dump();
    }
};

// banking ----------------------------------------------------------------------

Json banking_generate(std::mt19937_64& rng) {
    static const std::vector<std::string> accounts = {"checking", "savings", "travel"};
    std::uniform_int_distribution<size_t> pick(0, accounts.size() - 1);
    std::uniform_int_distribution<int> roll(0, 99);
    std::uniform_int_distribution<int64_t> small_amount(1, 150);
    Json body;
    body["account"] = accounts[pick(rng)];
    int r = roll(rng);
    if (r < 55) {
        body["op"] = "deposit";
        body["amount"] = small_amount(rng);
    } else if (r < 90) {
        body["op"] = "withdraw";
        body["amount"] = small_amount(rng);
    } else {
        // Occasionally withdraw far more than any balance so the
        // insufficient-funds path is traced during warmup.
        body["op"] = "withdraw";
        body["amount"] = int64_t{1'000'000};
    }
    body["txn"] = "txn-" + std::to_string(rng());
    return body;
}

// Sequential replay of the operation log against the store model.
class BankingOracle : public ResponseOracle {
  public:
    std::string expect(const Json& body) override {
        std::string account = body.value("account", "");
        auto& [balance, version] = accounts_.try_emplace(account, int64_t{1000}, int64_t{0})
                                       .first->second;
        Json out;
        if (body.value("audit", false)) {
            out["audit"] = true;
            out["balance"] = balance;
            return out.dump();
        }
        std::string op = body.value("op", "");
        int64_t amount = body.value("amount", int64_t{0});
        int64_t next = balance;
        bool ok = true;
        if (op == "deposit") {
            next = balance + amount;
        } else if (op == "withdraw") {
            if (balance < amount)
                ok = false;
            else
                next = balance - amount;
        } else {
            ok = false;
        }
        if (!ok) {
            out["committed"] = false;
            out["error"] = "rejected";
            return out.dump();
        }
        balance = next;
        version++;
        out["committed"] = true;
        out["balance"] = balance;
        return out.dump();
    }

  private:
    std::map<std::string, std::pair<int64_t, int64_t>> accounts_;
};

// autocomplete ------------------------------------------------------------------

Json autocomplete_generate(std::mt19937_64& rng) {
    static const std::vector<std::string> words = [] {
        std::vector<std::string> v;
        Json fixture = MockServer::words_fixture();
        for (const auto& w : fixture["words"]) v.push_back(w.get<std::string>());
        return v;
    }();
    std::uniform_int_distribution<int> roll(0, 99);
    std::uniform_int_distribution<size_t> pick(0, words.size() - 1);
    std::uniform_int_distribution<int64_t> limit(1, 12);
    Json body;
    int r = roll(rng);
    if (r < 50) {
        body["prefix"] = words[pick(rng)].substr(0, 1 + static_cast<size_t>(r % 3));
    } else if (r < 85) {
        body["prefix"] = words[pick(rng)];
    } else {
        body["prefix"] = random_word(rng, 2, 6);
    }
    body["limit"] = limit(rng);
    return body;
}

class AutocompleteOracle : public ResponseOracle {
  public:
    std::string expect(const Json& body) override {
        static const std::vector<std::string> words = [] {
            std::vector<std::string> v;
            Json fixture = MockServer::words_fixture();
            for (const auto& w : fixture["words"]) v.push_back(w.get<std::string>());
            return v;
        }();
        std::string prefix = body.value("prefix", "");
        if (prefix == "*") {
            Json out;
            out["all"] = true;
            out["count"] = words.size();
            return out.dump();
        }
        if (body.value("uppercase", false)) {
            Json out;
            out["error"] = "uppercase search is unsupported";
            return out.dump();
        }
        int64_t limit = body.value("limit", int64_t{0});
        Json matches = Json::array();
        int64_t n = 0;
        for (const auto& w : words) {
            if (w.size() < prefix.size()) continue;
            if (w.compare(0, prefix.size(), prefix) != 0) continue;
            if (n < limit) {
                matches.push_back(w);
                n++;
            }
        }
        Json out;
        out["prefix"] = prefix;
        out["matches"] = std::move(matches);
        out["count"] = n;
        return out.dump();
    }
};

// maze ----------------------------------------------------------------------------

struct MazeGrid {
    int h = 0, w = 0;
    std::vector<std::vector<int>> cells;
    std::vector<std::pair<int, int>> open;

    static const MazeGrid& instance() {
        static MazeGrid grid = [] {
            MazeGrid g;
            Json fixture = MockServer::maze_fixture();
            for (const auto& row : fixture["grid"]) {
                std::vector<int> r;
                for (const auto& cell : row) r.push_back(cell.get<int>());
                g.cells.push_back(std::move(r));
            }
            g.h = static_cast<int>(g.cells.size());
            g.w = static_cast<int>(g.cells[0].size());
            for (int r = 0; r < g.h; r++)
                for (int c = 0; c < g.w; c++)
                    if (g.cells[r][c] == 0) g.open.emplace_back(r, c);
            return g;
        }();
        return grid;
    }
};

Json maze_generate(std::mt19937_64& rng) {
    const MazeGrid& grid = MazeGrid::instance();
    std::uniform_int_distribution<size_t> pick(0, grid.open.size() - 1);
    auto [sr, sc] = grid.open[pick(rng)];
    auto [tr, tc] = grid.open[pick(rng)];
    Json body;
    body["sr"] = sr;
    body["sc"] = sc;
    body["tr"] = tr;
    body["tc"] = tc;
    return body;
}

// Breadth-first search over the fixture; the reference for shortest paths.
int64_t maze_bfs(int sr, int sc, int tr, int tc) {
    const MazeGrid& grid = MazeGrid::instance();
    std::vector<int64_t> dist(static_cast<size_t>(grid.h * grid.w), -1);
    std::deque<std::pair<int, int>> queue;
    queue.emplace_back(sr, sc);
    dist[static_cast<size_t>(sr * grid.w + sc)] = 0;
    while (!queue.empty()) {
        auto [r, c] = queue.front();
        queue.pop_front();
        if (r == tr && c == tc) break;
        static const int dr[4] = {0, 0, 1, -1};
        static const int dc[4] = {1, -1, 0, 0};
        for (int k = 0; k < 4; k++) {
            int nr = r + dr[k], nc = c + dc[k];
            if (nr < 0 || nr >= grid.h || nc < 0 || nc >= grid.w) continue;
            if (grid.cells[nr][nc] != 0) continue;
            size_t idx = static_cast<size_t>(nr * grid.w + nc);
            if (dist[idx] != -1) continue;
            dist[idx] = dist[static_cast<size_t>(r * grid.w + c)] + 1;
            queue.emplace_back(nr, nc);
        }
    }
    return dist[static_cast<size_t>(tr * grid.w + tc)];
}

class MazeOracle : public ResponseOracle {
  public:
    std::string expect(const Json& body) override {
        if (body.value("diag", false)) {
            Json out;
            out["error"] = "diagonal movement is unsupported";
            return out.dump();
        }
        if (body.value("wrap", false)) {
            Json out;
            out["error"] = "wraparound movement is unsupported";
            return out.dump();
        }
        Json out;
        out["dist"] = maze_bfs(body.value("sr", 0), body.value("sc", 0), body.value("tr", 0),
                               body.value("tc", 0));
        return out.dump();
    }
};

std::vector<BenchmarkDef> build_benchmarks() {
    std::vector<BenchmarkDef> defs;

    defs.push_back(BenchmarkDef{
        "authorize",
        kAuthorizeSource,
        authorize_generate,
        {Json{{"username", "admin"}, {"password", "x"}},
         Json{{"username", "root"}, {"password", "x"}}},
        [] { return std::make_unique<AuthorizeOracle>(); },
    });
    defs.push_back(BenchmarkDef{
        "upload",
        kUploadSource,
        upload_generate,
        {Json{{"payload", "p"}, {"debug", true}}, Json{{"payload", "p"}, {"verbose", true}}},
        [] { return std::make_unique<UploadOracle>(); },
    });
    defs.push_back(BenchmarkDef{
        "status",
        kStatusSource,
        status_generate,
        {Json{{"success", true}, {"description", "d"}, {"dryRun", true}},
         Json{{"success", true}, {"description", "d"}, {"echo", true}}},
        [] { return std::make_unique<StatusOracle>(); },
    });
    defs.push_back(BenchmarkDef{
        "banking",
        kBankingSource,
        banking_generate,
        {Json{{"account", "checking"}, {"op", "deposit"}, {"amount", 1}, {"txn", "adv-1"},
              {"audit", true}},
         Json{{"account", "checking"}, {"op", "transfer"}, {"amount", 1}, {"txn", "adv-2"}}},
        [] { return std::make_unique<BankingOracle>(); },
    });
    defs.push_back(BenchmarkDef{
        "autocomplete",
        kAutocompleteSource,
        autocomplete_generate,
        {Json{{"prefix", "*"}, {"limit", 5}},
         Json{{"prefix", "ba"}, {"limit", 5}, {"uppercase", true}}},
        [] { return std::make_unique<AutocompleteOracle>(); },
    });
    defs.push_back(BenchmarkDef{
        "maze",
        kMazeSource,
        maze_generate,
        {Json{{"sr", 1}, {"sc", 1}, {"tr", 1}, {"tc", 1}, {"diag", true}},
         Json{{"sr", 1}, {"sc", 1}, {"tr", 1}, {"tc", 1}, {"wrap", true}}},
        [] { return std::make_unique<MazeOracle>(); },
    });
    return defs;
}

}  // namespace

const std::vector<BenchmarkDef>& benchmarks() {
    static const std::vector<BenchmarkDef> defs = build_benchmarks();
    return defs;
}

const BenchmarkDef& benchmark(const std::string& name) {
    for (const auto& d : benchmarks())
        if (d.name == name) return d;
    throw std::runtime_error("unknown benchmark '" + name + "'");
}

}  // namespace accel::bench

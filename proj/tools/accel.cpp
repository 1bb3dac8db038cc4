#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "accel/bench.hpp"
#include "accel/desugar.hpp"
#include "accel/fuzz.hpp"
#include "accel/instrument.hpp"
#include "accel/invoker.hpp"
#include "accel/loadgen.hpp"
#include "accel/mock.hpp"
#include "accel/parser.hpp"
#include "accel/service.hpp"

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

struct ServeOptions {
    int port = 8080;
    std::string upstream;
    int trace_after = 100;
    int max_bounces = 3;
    uint64_t instruction_limit = 10'000'000;
    uint64_t memory_limit = 128ull * 1024 * 1024;
    int pool_size = 6;
    int timeout_ms = 5000;
    bool container_only = false;
    std::string stats_log;
    std::vector<std::string> preload;  // name=path pairs registered at boot
};

int cmd_serve(const ServeOptions& opt) {
    accel::invoker::InvokerConfig cfg;
    cfg.trace_after = opt.trace_after;
    cfg.max_bounces = opt.max_bounces;
    cfg.limits.max_instructions = opt.instruction_limit;
    cfg.limits.max_bytes = opt.memory_limit;
    cfg.pool_size = opt.pool_size;
    cfg.timeout_ms = opt.timeout_ms;
    cfg.force_container_only = opt.container_only;
    cfg.stats_path = opt.stats_log;

    accel::HttpUpstream upstream(opt.upstream);
    accel::invoker::Invoker inv(cfg, upstream);
    for (const auto& spec : opt.preload) {
        auto eq = spec.find('=');
        if (eq == std::string::npos) throw std::runtime_error("--function expects name=path");
        inv.register_function(spec.substr(0, eq), read_file(spec.substr(eq + 1)));
        std::cout << "registered " << spec.substr(0, eq) << "\n";
    }

    accel::invoker::InvokerService service(inv);
    service.start(opt.port);
    std::cout << "invoker listening on " << service.base_url() << " (upstream " << opt.upstream
              << ")\n";
    std::cout << "PUT /function/{name} to register, POST /function/{name} to invoke\n";
    // Serve until killed.
    while (true) std::this_thread::sleep_for(std::chrono::seconds(3600));
    return 0;
}

int cmd_mock(int port, int delay_ms) {
    accel::bench::MockConfig cfg;
    cfg.port = port;
    cfg.delay_ms = delay_ms;
    accel::bench::MockServer mock(cfg);
    mock.start();
    std::cout << "mock upstream listening on " << mock.base_url() << " (delay " << delay_ms
              << " ms)\n";
    while (true) std::this_thread::sleep_for(std::chrono::seconds(3600));
    return 0;
}

int cmd_bench(const std::string& name, int streams, int duration, uint64_t seed,
              const std::string& out_path, const std::string& csv_path, int trace_after,
              int pool_size, int mock_delay) {
    const auto& def = accel::bench::benchmark(name);

    accel::bench::MockConfig mock_cfg;
    mock_cfg.delay_ms = mock_delay;
    accel::bench::MockServer mock(mock_cfg);
    mock.start();
    accel::HttpUpstream upstream(mock.base_url());

    accel::invoker::InvokerConfig cfg;
    cfg.trace_after = trace_after;
    cfg.pool_size = pool_size;
    accel::invoker::Invoker inv(cfg, upstream);
    inv.register_function(def.name, def.source);

    accel::bench::LoadConfig load;
    load.streams = streams;
    load.duration_s = duration;
    load.seed = seed;
    auto report = accel::bench::run_load(inv, def, load);
    std::cout << report.table();
    if (!out_path.empty()) {
        std::ofstream out(out_path);
        out << report.to_json().dump(2) << "\n";
        std::cout << "report written to " << out_path << "\n";
    }
    if (!csv_path.empty()) {
        std::ofstream out(csv_path);
        out << report.csv();
        std::cout << "per-second buckets written to " << csv_path << "\n";
    }
    return report.errors == 0 ? 0 : 1;
}

int cmd_fuzz(const std::string& name, int n, uint64_t seed, int trace_after) {
    const auto& def = accel::bench::benchmark(name);
    accel::invoker::InvokerConfig cfg;
    cfg.trace_after = trace_after;
    auto result = accel::bench::equivalence_fuzz(
        def, n, seed, cfg, [](const std::string& msg) { std::cout << msg << "\n"; });
    std::cout << name << ": " << result.requests << " requests, " << result.divergences
              << " divergences, containerless=" << (result.reached_containerless ? "yes" : "no")
              << ", executor runs=" << result.executor_runs << "\n";
    if (!result.ok) {
        std::cout << result.first_divergence << "\n";
        return 1;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"accel: a serverless function accelerator"};
    app.require_subcommand(1);

    // serve
    ServeOptions serve;
    auto* serve_cmd = app.add_subcommand("serve", "run the invoker service");
    serve_cmd->add_option("--port", serve.port, "listen port")->envname("ACCEL_PORT");
    serve_cmd->add_option("--upstream", serve.upstream, "base URL of the upstream service")
        ->required()
        ->envname("ACCEL_UPSTREAM");
    serve_cmd->add_option("--trace-after", serve.trace_after, "traced events before extraction")
        ->envname("ACCEL_TRACE_AFTER");
    serve_cmd->add_option("--max-bounces", serve.max_bounces, "aborts before container-only")
        ->envname("ACCEL_MAX_BOUNCES");
    serve_cmd
        ->add_option("--instruction-limit", serve.instruction_limit,
                     "executor instruction budget per request")
        ->envname("ACCEL_INSTRUCTION_LIMIT");
    serve_cmd
        ->add_option("--memory-limit", serve.memory_limit, "executor arena bytes per request")
        ->envname("ACCEL_MEMORY_LIMIT");
    serve_cmd->add_option("--pool-size", serve.pool_size, "interpreter instances per function")
        ->envname("ACCEL_POOL_SIZE");
    serve_cmd->add_option("--timeout-ms", serve.timeout_ms, "interpreter request timeout")
        ->envname("ACCEL_TIMEOUT_MS");
    serve_cmd->add_flag("--container-only", serve.container_only, "never trace or accelerate")
        ->envname("ACCEL_CONTAINER_ONLY");
    serve_cmd->add_option("--stats-log", serve.stats_log, "append executor stats JSON lines")
        ->envname("ACCEL_STATS_LOG");
    serve_cmd->add_option("--function", serve.preload, "register name=source-path at startup");

    // mock
    int mock_port = 9000, mock_delay = 1;
    auto* mock_cmd = app.add_subcommand("mock", "run the mock upstream service");
    mock_cmd->add_option("--port", mock_port, "listen port")->envname("ACCEL_MOCK_PORT");
    mock_cmd->add_option("--delay-ms", mock_delay, "artificial delay per request");

    // bench
    std::string bench_name;
    int bench_streams = 10, bench_duration = 60, bench_trace_after = 100, bench_pool = 6,
        bench_mock_delay = 1;
    uint64_t bench_seed = 1;
    std::string bench_out, bench_csv;
    auto* bench_cmd = app.add_subcommand("bench", "closed-loop load against one benchmark");
    bench_cmd->add_option("name", bench_name, "benchmark name")->required();
    bench_cmd->add_option("--streams", bench_streams, "concurrent event streams");
    bench_cmd->add_option("--duration", bench_duration, "seconds to run");
    bench_cmd->add_option("--seed", bench_seed, "request generator seed");
    bench_cmd->add_option("--out", bench_out, "write the JSON report here");
    bench_cmd->add_option("--csv", bench_csv, "write per-second buckets as CSV here");
    bench_cmd->add_option("--trace-after", bench_trace_after, "traced events before extraction");
    bench_cmd->add_option("--pool-size", bench_pool, "interpreter instances");
    bench_cmd->add_option("--mock-delay-ms", bench_mock_delay, "mock service delay");

    // fuzz
    std::string fuzz_name;
    int fuzz_n = 500, fuzz_trace_after = 100;
    uint64_t fuzz_seed = 1;
    auto* fuzz_cmd = app.add_subcommand("fuzz", "equivalence fuzz one benchmark");
    fuzz_cmd->add_option("name", fuzz_name, "benchmark name")->required();
    fuzz_cmd->add_option("-n,--requests", fuzz_n, "number of requests");
    fuzz_cmd->add_option("--seed", fuzz_seed, "request generator seed");
    fuzz_cmd->add_option("--trace-after", fuzz_trace_after, "traced events before extraction");

    // frontend debugging
    std::string parse_file, desugar_file, instrument_file;
    auto* parse_cmd = app.add_subcommand("parse", "dump the AST of a guest source file as JSON");
    parse_cmd->add_option("file", parse_file)->required();
    auto* desugar_cmd = app.add_subcommand("desugar", "print the desugared core program");
    desugar_cmd->add_option("file", desugar_file)->required();
    auto* instrument_cmd =
        app.add_subcommand("instrument", "print the instrumented program (@ lines are inserted)");
    instrument_cmd->add_option("file", instrument_file)->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (serve_cmd->parsed()) return cmd_serve(serve);
        if (mock_cmd->parsed()) return cmd_mock(mock_port, mock_delay);
        if (bench_cmd->parsed())
            return cmd_bench(bench_name, bench_streams, bench_duration, bench_seed, bench_out,
                             bench_csv, bench_trace_after, bench_pool, bench_mock_delay);
        if (fuzz_cmd->parsed()) return cmd_fuzz(fuzz_name, fuzz_n, fuzz_seed, fuzz_trace_after);
        if (parse_cmd->parsed()) {
            std::cout << accel::ast::ast_to_json(accel::ast::parse(read_file(parse_file))).dump(2)
                      << "\n";
            return 0;
        }
        if (desugar_cmd->parsed()) {
            std::cout << accel::ast::to_source(
                accel::ast::desugar(accel::ast::parse(read_file(desugar_file))));
            return 0;
        }
        if (instrument_cmd->parsed()) {
            auto desugared = accel::ast::desugar(accel::ast::parse(read_file(instrument_file)));
            std::cout << accel::ast::to_instrumented_source(accel::compile::instrument(desugared));
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

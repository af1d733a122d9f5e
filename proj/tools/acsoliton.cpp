// acsoliton: solve / family / flow / verify / oracle runs from a JSON config
#include "acs/cli_io.hpp"
#include "acs/errors.hpp"

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <optional>

int main(int argc, char** argv) {
    CLI::App app{"Expanding Kaehler-Ricci solitons on resolutions of Kaehler cones"};
    std::string config_path, out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
    bool quiet = false;
    app.add_option("--config", config_path, "run configuration (JSON)")->required()->check(CLI::ExistingFile);
    app.add_option("--out", out_dir, "output directory (overrides ACS_OUT and the config)");
    app.add_option("--seed", seed, "seed for perturbation experiments");
    app.add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
    app.add_flag("-q,--quiet", quiet, "errors only");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : acs::io::kValidation;
    }

    auto log = spdlog::stderr_color_mt("acsoliton");
    log->set_pattern("[%l] %v");
    if (quiet) log->set_level(spdlog::level::err);

    const char* env = std::getenv("ACS_OUT");
    if (out_dir.empty() && env && *env) out_dir = env;
    acs::io::RunConfig cfg;
    try {
        cfg = acs::io::load_config(config_path);
    } catch (const acs::Error& e) {
        log->error("{}", e.what());
        return acs::io::write_failure(out_dir.empty() ? cfg.output : out_dir, "validation", e.what(),
                                      acs::io::kValidation);
    }
    if (seed) cfg.seed = *seed;
    if (threads) cfg.threads = *threads;
    if (out_dir.empty()) out_dir = cfg.output;

    log->info("{} on {} -> {}", cfg.command, cfg.spec.describe(), out_dir);
    const int rc = acs::io::run_command(cfg, out_dir);
    switch (rc) {
    case acs::io::kOk: log->info("done"); break;
    case acs::io::kPathStall: log->warn("continuity path stalled; see {}/report.json", out_dir); break;
    case acs::io::kDiagnostics: log->warn("diagnostics failed; see {}/report.json", out_dir); break;
    case acs::io::kValidation: log->error("invalid input; see {}/report.json", out_dir); break;
    default: log->error("run failed; see {}/report.json", out_dir); break;
    }
    return rc;
}

#pragma once
// Run configuration, orchestration and output files for the acsoliton tool.

#include "acs/cone_geometry.hpp"
#include "acs/ma_solver.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace acs::io {

inline constexpr int kSchemaVersion = 1;

enum ExitCode : int {
    kOk = 0,
    kInternal = 1,
    kValidation = 2,
    kPathStall = 3,
    kDiagnostics = 4,
};

struct GridBlock {
    int N = 2048;
    double x_min = -6.0, x_max = 30.0;
    std::vector<int> ladder;   // empty: {N/4, N/2, N}
    std::vector<int> levels() const;
};

struct DiagnosticsBlock {
    bool curvature = true;
    int uniqueness_seeds = 0;
};

struct FamilyBlock {
    double a_end = 0.5;
    double scale_end = 0.0;   // 0: same base_curvature_scale as the start
    int steps = 8;
};

struct FlowBlock {
    int nodes = 201;
    double eps = 0.2, eps2 = 0.1;
    double t_end = 10.0;
    double dt = 5e-5;
    bool round_start = false;   // Fubini-Study initial data
};

struct VerifyBlock {
    std::string run_dir;   // directory holding profile.csv and report.json of an earlier solve
    double tolerance = 1e-12;
};

struct OracleBlock {
    int points = 10;
    double h = 1e-3;
};

struct RunConfig {
    int schema_version = kSchemaVersion;
    std::string command = "solve";   // solve | family | flow | verify | oracle
    ConeSpec spec;
    GridBlock grid;
    SolverConfig solver;
    DiagnosticsBlock diagnostics;
    FamilyBlock family;
    FlowBlock flow;
    VerifyBlock verify;
    OracleBlock oracle;
    std::uint64_t seed = 1;
    int threads = 1;
    std::string output = "out";
};

// strict: unknown keys and schema mismatches throw ValidationError
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);
std::string dump_config(const RunConfig& cfg);

// writes the run's files into out_dir and returns the exit code; never throws
int run_command(const RunConfig& cfg, const std::string& out_dir);
// failure record for runs that never reached run_command (unreadable config); returns code
int write_failure(const std::string& out_dir, const std::string& kind, const std::string& message, int code);

struct ProfileRow {
    double x, rho, phi, alpha, beta, F, residual;
};
std::vector<ProfileRow> read_profile(const std::string& path);

} // namespace acs::io

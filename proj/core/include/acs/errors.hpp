#pragma once
#include <stdexcept>
#include <string>

namespace acs {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ValidationError : Error { using Error::Error; };
struct DomainError : Error { using Error::Error; };
struct IncompatibleFamilyError : Error { using Error::Error; };
struct ChartError : Error { using Error::Error; };
struct InconsistentBackgroundError : Error { using Error::Error; };
struct FlowError : Error { using Error::Error; };

struct ConstructionError : Error {
    int node;
    ConstructionError(const std::string& m, int node_) : Error(m), node(node_) {}
};

// omega_phi lost positivity
struct NonKahlerError : Error {
    int node;
    NonKahlerError(const std::string& m, int node_) : Error(m), node(node_) {}
};

struct NoConvergenceError : Error {
    using Error::Error;
};

struct StepFailureError : Error {
    int node;
    StepFailureError(const std::string& m, int node_) : Error(m), node(node_) {}
};

struct PathStallError : Error {
    double t_stall;
    int node;
    PathStallError(const std::string& m, double t, int node_) : Error(m), t_stall(t), node(node_) {}
};

} // namespace acs

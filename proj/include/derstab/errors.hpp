#pragma once

#include <stdexcept>
#include <string>

namespace derstab {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Input / model construction
struct ParseError : Error { using Error::Error; };
struct TopologyError : Error { using Error::Error; };
struct IndexError : Error { using Error::Error; };
struct FileError : Error { using Error::Error; };

// State-space assembly
struct DimensionError : Error { using Error::Error; };
struct AssumptionError : Error { using Error::Error; };
struct SparsityError : Error { using Error::Error; };

// Numerics
struct EigenFailure : Error { using Error::Error; };
struct ExplosionError : Error { using Error::Error; };
struct InfeasibleError : Error { using Error::Error; };
struct UnboundedError : Error { using Error::Error; };
struct DegenerateError : Error { using Error::Error; };
struct DivideByZero : Error { using Error::Error; };
struct PowerFlowDiverged : Error { using Error::Error; };

// Simulation bookkeeping
struct MismatchedScenario : Error { using Error::Error; };

}  // namespace derstab

#pragma once

#include <stdexcept>
#include <string>

namespace tsl {

struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct CapExceeded : Error {
    explicit CapExceeded(const std::string& what) : Error("cap exceeded: " + what) {}
};

struct MalformedPartition : Error {
    explicit MalformedPartition(const std::string& what) : Error("malformed partition: " + what) {}
};

struct MalformedDecomposition : Error {
    explicit MalformedDecomposition(const std::string& what)
        : Error("malformed decomposition: " + what) {}
};

struct InvalidTree : Error {
    explicit InvalidTree(const std::string& what) : Error("invalid tree: " + what) {}
};

struct PreconditionFailed : Error {
    explicit PreconditionFailed(const std::string& what) : Error("precondition failed: " + what) {}
};

struct NonDyadicCoefficient : Error {
    explicit NonDyadicCoefficient(const std::string& what)
        : Error("non-dyadic coefficient: " + what) {}
};

struct SupplyExhausted : Error {
    explicit SupplyExhausted(const std::string& what) : Error("supply exhausted: " + what) {}
};

struct SchemaMismatch : Error {
    explicit SchemaMismatch(const std::string& what) : Error("schema mismatch: " + what) {}
};

struct ParseError : Error {
    explicit ParseError(const std::string& what) : Error("parse error: " + what) {}
};

}  // namespace tsl

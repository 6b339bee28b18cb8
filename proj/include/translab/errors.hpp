#pragma once

#include <stdexcept>
#include <string>

namespace translab {

struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Config/schema mismatch: bad manifest, undeclared flag, missing price entry.
struct ConfigError : Error {
    explicit ConfigError(const std::string& what) : Error(what) {}
};

// Malformed serialized payload (manifest, run log, script, tool args).
struct SchemaError : Error {
    explicit SchemaError(const std::string& what) : Error(what) {}
};

// Trace canonicalization failure, e.g. a path that cannot be made
// workspace-relative. Indicates a confinement bug, not bad user input.
struct CanonicalError : Error {
    explicit CanonicalError(const std::string& what) : Error(what) {}
};

// Harness-level failure distinct from a program failing its tests
// (missing executable, unreadable workspace).
struct HarnessError : Error {
    explicit HarnessError(const std::string& what) : Error(what) {}
};

// Model backend failures.
struct BackendError : Error {
    explicit BackendError(const std::string& what) : Error(what) {}
};
struct TransportError : BackendError {
    explicit TransportError(const std::string& what) : BackendError(what) {}
};
struct ProtocolError : BackendError {
    explicit ProtocolError(const std::string& what) : BackendError(what) {}
};

}  // namespace translab

#pragma once

#include <stdexcept>

namespace radpair {

// Malformed or schema-violating run configuration (CLI exit code 2).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Violated physics contract: non-Hermitian Hamiltonian, broken projector
// algebra, invalid density matrix, negative rates (CLI exit code 3).
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Filesystem failure while writing outputs (CLI exit code 4).
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace radpair

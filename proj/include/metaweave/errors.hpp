#pragma once

#include <stdexcept>
#include <string>

namespace metaweave {

// Error categories map onto CLI exit codes: input_error -> 2,
// numeric_error -> 3, network_error -> 4.
struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NetworkError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace metaweave

#ifndef UNICP_ERRORS_HPP
#define UNICP_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace unicp {

// Error taxonomy mirrors the CLI exit codes: input_error -> 1,
// runtime_abort -> 2, io_error -> 3.
struct input_error : std::runtime_error {
    explicit input_error(const std::string& what) : std::runtime_error(what) {}
};

struct runtime_abort : std::runtime_error {
    explicit runtime_abort(const std::string& what) : std::runtime_error(what) {}
};

struct io_error : std::runtime_error {
    explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace unicp

#endif

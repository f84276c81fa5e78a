#pragma once

#include <stdexcept>
#include <string>

namespace varigen {

// Recoverable failure while loading or processing data. The CLI maps these
// to exit code 2.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad configuration: missing path, knob out of range, unknown key. The CLI
// maps these to exit code 1.
struct ConfigError : Error {
  using Error::Error;
};

[[noreturn]] inline void fail(const std::string& msg) { throw Error(msg); }

}  // namespace varigen

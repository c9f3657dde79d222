#pragma once

#include <stdexcept>
#include <string>

namespace hermdens {

/* Error taxonomy shared by all modules.  The CLI maps these to exit codes:
 * parse failures 2, precision_error 3, capability_error 4,
 * verification_error 5.  config_error means the caller wired incompatible
 * objects together (mixed precision or mixed delta) and is a logic bug. */

struct config_error : std::logic_error {
    explicit config_error(const std::string& msg) : std::logic_error(msg) {}
};

struct precision_error : std::runtime_error {
    explicit precision_error(const std::string& msg) : std::runtime_error(msg) {}
};

struct capability_error : std::runtime_error {
    explicit capability_error(const std::string& msg) : std::runtime_error(msg) {}
};

struct verification_error : std::runtime_error {
    explicit verification_error(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace hermdens

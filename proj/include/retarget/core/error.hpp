#pragma once

#include <stdexcept>
#include <string>

namespace retarget {

// Runtime failure tagged with the subsystem it came from. The CLI turns these
// into "ERROR:<module>:<message>" lines and exit code 2.
class ModuleError : public std::runtime_error {
public:
    ModuleError(std::string module, const std::string& message)
        : std::runtime_error(message), module_(std::move(module)) {}

    const std::string& module() const { return module_; }

private:
    std::string module_;
};

}  // namespace retarget

#pragma once

#include <stdexcept>
#include <string>

namespace immunotrack {

// Every failure surfaced by the library carries a module-qualified code such
// as "ingest.BadPrice" so the CLI can print a stable one-line diagnostic.
class Error : public std::runtime_error {
public:
    Error(std::string module, std::string code, const std::string& message)
        : std::runtime_error(module + "." + code + ": " + message),
          module_(std::move(module)),
          code_(std::move(code)) {}

    const std::string& module() const noexcept { return module_; }
    const std::string& code() const noexcept { return code_; }
    std::string qualified_code() const { return module_ + "." + code_; }

private:
    std::string module_;
    std::string code_;
};

}  // namespace immunotrack

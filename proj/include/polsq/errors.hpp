#pragma once

#include <stdexcept>
#include <string>

namespace polsq {

/// A configuration or parameter value that violates a physical invariant.
/// `key` names the offending field; `line` is the 1-based config line, or 0
/// when the value did not come from a file.
class ValidationError : public std::runtime_error {
public:
    ValidationError(std::string key, const std::string& what, int line = 0)
        : std::runtime_error(format(key, what, line)), key_(std::move(key)), detail_(what), line_(line) {}

    const std::string& key() const noexcept { return key_; }
    /// The message without key and line prefix.
    const std::string& detail() const noexcept { return detail_; }
    int line() const noexcept { return line_; }

private:
    static std::string format(const std::string& key, const std::string& what, int line) {
        std::string out;
        if (line > 0) out += "line " + std::to_string(line) + ": ";
        if (!key.empty()) out += key + ": ";
        return out + what;
    }

    std::string key_;
    std::string detail_;
    int line_;
};

/// Instability, singular transfer matrix, or any other numerical breakdown.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace polsq

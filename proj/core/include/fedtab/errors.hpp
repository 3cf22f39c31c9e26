#pragma once

#include <stdexcept>
#include <string>

namespace fedtab {

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& m) : std::runtime_error("config error: " + m) {}
};

struct ShapeError : std::runtime_error {
    explicit ShapeError(const std::string& m) : std::runtime_error("shape error: " + m) {}
};

struct ProtocolError : std::runtime_error {
    explicit ProtocolError(const std::string& m) : std::runtime_error("protocol error: " + m) {}
};

struct DealerError : std::runtime_error {
    explicit DealerError(const std::string& m) : std::runtime_error("dealer error: " + m) {}
};

struct RangeError : std::runtime_error {
    explicit RangeError(const std::string& m) : std::runtime_error("range error: " + m) {}
};

struct RoleError : std::runtime_error {
    explicit RoleError(const std::string& m) : std::runtime_error("role error: " + m) {}
};

struct InputError : std::runtime_error {
    explicit InputError(const std::string& m) : std::runtime_error("input error: " + m) {}
};

}  // namespace fedtab

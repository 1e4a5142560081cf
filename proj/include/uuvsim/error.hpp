#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace uuvsim {

enum class ErrorKind {
    SingularAttitude,
    SingularTransform,
    NonPositiveEffectiveMass,
    NonFinite,
    DisconnectedGraph,
    NoPinnedVehicle,
    NotPositiveDefinite,
    IndexOutOfRange,
    MissingDelta,
    NonPositiveGain,
    InvalidArgument,
    InvalidScenario,
    EmptyLog,
};

std::string_view to_string(ErrorKind kind);

/// Every library failure carries a kind so callers (the CLI in particular)
/// can map it onto an exit code without parsing messages.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace uuvsim

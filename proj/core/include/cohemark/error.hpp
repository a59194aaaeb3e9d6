#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cohemark {

enum class Errc {
    InvalidArgument,
    RemoteUnavailable,
    DimensionMismatch,
    InsufficientData,
    NumericalFailure,
    EmbedderMismatch,
    IoFailure,
    SchemaVersionMismatch,
    RankOutOfRange,
    LmUnavailable,
    EmptyInput,
    EmptyResponse,
};

std::string_view to_string(Errc code);

/// Every failure raised by the toolkit carries one of the Errc codes so that
/// callers (the CLI in particular) can map it to an exit status.
class Error : public std::runtime_error {
  public:
    Error(Errc code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    [[nodiscard]] Errc code() const noexcept { return code_; }

  private:
    Errc code_;
};

}  // namespace cohemark

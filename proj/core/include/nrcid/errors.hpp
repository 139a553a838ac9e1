#ifndef NRCID_ERRORS_HPP
#define NRCID_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace nrcid {

// Every failure the library reports carries one of these kinds so callers
// (notably the CLI exit-code map) can dispatch without string matching.
enum class ErrorKind {
    Config,           // bad run configuration / flag combination
    InvalidSpec,      // a *Spec value violates its invariants
    InvalidInput,     // operation preconditions violated by data
    DegenerateData,   // data cannot support the requested operation
    InvalidDataset,   // dataset layout/session/rate problems
    InvalidSymbol,    // symbol outside the model alphabet
    InvalidState,     // e.g. identify against an empty registry
    Capacity,         // parameter combination exceeds count arithmetic
    Io,               // filesystem read/write failure
    DecodeVersion,    // serialized blob has an unsupported version tag
    DecodeTruncated,  // serialized blob ends early
    DecodeChecksum,   // serialized blob checksum mismatch
    DecodeParse,      // serialized blob is malformed
    Internal,         // invariant violation inside the library
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
    throw Error(kind, message);
}

inline bool is_decode_error(ErrorKind kind) {
    return kind == ErrorKind::DecodeVersion || kind == ErrorKind::DecodeTruncated ||
           kind == ErrorKind::DecodeChecksum || kind == ErrorKind::DecodeParse;
}

}  // namespace nrcid

#endif

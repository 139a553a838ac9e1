#include "nrcid/errors.hpp"

namespace nrcid {

const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Config: return "config error";
        case ErrorKind::InvalidSpec: return "invalid spec";
        case ErrorKind::InvalidInput: return "invalid input";
        case ErrorKind::DegenerateData: return "degenerate data";
        case ErrorKind::InvalidDataset: return "invalid dataset";
        case ErrorKind::InvalidSymbol: return "invalid symbol";
        case ErrorKind::InvalidState: return "invalid state";
        case ErrorKind::Capacity: return "capacity error";
        case ErrorKind::Io: return "i/o error";
        case ErrorKind::DecodeVersion: return "decode error (version mismatch)";
        case ErrorKind::DecodeTruncated: return "decode error (truncated)";
        case ErrorKind::DecodeChecksum: return "decode error (checksum mismatch)";
        case ErrorKind::DecodeParse: return "decode error (malformed)";
        case ErrorKind::Internal: return "internal error";
    }
    return "error";
}

}  // namespace nrcid

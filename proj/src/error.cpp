#include "genolang/error.hpp"

namespace genolang {

const char* to_string(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::format: return "format error";
    case ErrorKind::schema: return "schema error";
    case ErrorKind::value: return "value error";
    case ErrorKind::duplicate_id: return "duplicate id";
    case ErrorKind::empty_sequence: return "empty sequence";
    case ErrorKind::short_sequence: return "sequence shorter than k";
    case ErrorKind::degenerate_sequence: return "degenerate sequence";
    case ErrorKind::stratification: return "stratification error";
    case ErrorKind::single_class: return "single-class labels";
    case ErrorKind::dimension: return "dimension mismatch";
    case ErrorKind::architecture: return "architecture error";
    case ErrorKind::divergence: return "training diverged";
    case ErrorKind::spec: return "spec error";
    case ErrorKind::config: return "configuration error";
    case ErrorKind::io: return "i/o error";
    case ErrorKind::contract: return "contract violation";
    }
    return "error";
}

} // namespace genolang

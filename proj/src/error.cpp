#include "rcbench/error.hpp"

namespace rcbench {

const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::schema: return "schema error";
        case ErrorKind::parse: return "parse error";
        case ErrorKind::label: return "label error";
        case ErrorKind::argument: return "argument error";
        case ErrorKind::shape: return "shape error";
        case ErrorKind::init: return "init error";
        case ErrorKind::singular: return "singularity error";
        case ErrorKind::degenerate: return "degenerate-distribution error";
        case ErrorKind::io: return "I/O error";
    }
    return "error";
}

}  // namespace rcbench

#include "slipflow/error.hpp"

namespace slipflow {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::geometry: return "geometry";
    case ErrorKind::configuration: return "configuration";
    case ErrorKind::meshing: return "meshing";
    case ErrorKind::import: return "import";
    case ErrorKind::data: return "data";
    case ErrorKind::compatibility: return "compatibility";
    case ErrorKind::solver: return "solver";
    case ErrorKind::non_convergence: return "non-convergence";
    case ErrorKind::branch_degeneracy: return "branch-degeneracy";
    case ErrorKind::numerical_rank: return "numerical-rank";
    case ErrorKind::multivalued_stream: return "multivalued-stream";
    case ErrorKind::io: return "io";
  }
  return "unknown";
}

}  // namespace slipflow

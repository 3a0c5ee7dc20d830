#include "svp/error.hpp"

namespace svp {

const char* errc_name(errc c) {
    switch (c) {
        case errc::non_symmetric: return "NonSymmetric";
        case errc::no_convergence: return "NoConvergence";
        case errc::index_out_of_range: return "IndexOutOfRange";
        case errc::rank_exceeded: return "RankExceeded";
        case errc::length_mismatch: return "LengthMismatch";
        case errc::bad_size: return "BadSize";
        case errc::bad_partition: return "BadPartition";
        case errc::bad_spec: return "BadSpec";
        case errc::not_binary: return "NotBinary";
        case errc::non_positive_input: return "NonPositiveInput";
        case errc::too_few_trials: return "TooFewTrials";
        case errc::zero_matrix: return "ZeroMatrix";
        case errc::rank_deficient: return "RankDeficient";
        case errc::assignment_ambiguous: return "AssignmentAmbiguous";
        case errc::block_too_small: return "BlockTooSmall";
        case errc::universe_mismatch: return "UniverseMismatch";
        case errc::bad_density: return "BadDensity";
        case errc::bound_violated: return "BoundViolated";
        case errc::shape_mismatch: return "ShapeMismatch";
        case errc::size_cap: return "SizeCap";
        case errc::io_error: return "IoError";
    }
    return "UnknownError";
}

} // namespace svp

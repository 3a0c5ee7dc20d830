#pragma once

#include <stdexcept>
#include <string>

namespace svp {

// Every failure the library raises deliberately carries one of these codes.
// Numeric preconditions on bound evaluations do NOT throw; they come back as
// flagged values (see bounds.hpp). Exceptions are for structural misuse.
enum class errc {
    non_symmetric,
    no_convergence,
    index_out_of_range,
    rank_exceeded,
    length_mismatch,
    bad_size,
    bad_partition,
    bad_spec,
    not_binary,
    non_positive_input,
    too_few_trials,
    zero_matrix,
    rank_deficient,
    assignment_ambiguous,
    block_too_small,
    universe_mismatch,
    bad_density,
    bound_violated,
    shape_mismatch,
    size_cap,
    io_error,
};

const char* errc_name(errc c);

class error : public std::runtime_error {
public:
    error(errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

    errc code() const noexcept { return code_; }

private:
    errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) {
    throw error(code, what);
}

inline void require(bool ok, errc code, const std::string& what) {
    if (!ok) fail(code, what);
}

} // namespace svp

#pragma once

#include <stdexcept>
#include <string>

namespace mobius {

/// Machine-readable failure classes. Every throwing operation in the library
/// reports one of these codes; the CLI maps them onto distinct exit codes.
enum class errc {
    not_prime,
    reducible_polynomial,
    degree_mismatch,
    division_by_zero,
    too_large,
    field_too_small,
    degenerate_points,
    identical_points,
    identical_circles,
    singular_map,
    point_not_on_circle,
    point_on_circle,
    circle_through_infinity,
    message_circle_through_infinity,
    message_not_on_base_line,
    key_on_base_line,
    tag_is_base_line,
    wrong_characteristic,
    invalid_key,
    candidate_stream_exhausted,
    keysource_exhausted,
    malformed_tag,
    length_mismatch,
    invalid_container,
    key_mismatch,
    bad_params,
    io_error,
    internal,
};

inline const char* errc_name(errc c) {
    switch (c) {
    case errc::not_prime: return "NotPrime";
    case errc::reducible_polynomial: return "ReduciblePolynomial";
    case errc::degree_mismatch: return "DegreeMismatch";
    case errc::division_by_zero: return "DivisionByZero";
    case errc::too_large: return "TooLarge";
    case errc::field_too_small: return "FieldTooSmall";
    case errc::degenerate_points: return "DegeneratePoints";
    case errc::identical_points: return "IdenticalPoints";
    case errc::identical_circles: return "IdenticalCircles";
    case errc::singular_map: return "SingularMap";
    case errc::point_not_on_circle: return "PointNotOnCircle";
    case errc::point_on_circle: return "PointOnCircle";
    case errc::circle_through_infinity: return "CircleThroughInfinity";
    case errc::message_circle_through_infinity: return "MessageCircleThroughInfinity";
    case errc::message_not_on_base_line: return "MessageNotOnBaseLine";
    case errc::key_on_base_line: return "KeyOnBaseLine";
    case errc::tag_is_base_line: return "TagIsBaseLine";
    case errc::wrong_characteristic: return "WrongCharacteristic";
    case errc::invalid_key: return "InvalidKey";
    case errc::candidate_stream_exhausted: return "CandidateStreamExhausted";
    case errc::keysource_exhausted: return "KeysourceExhausted";
    case errc::malformed_tag: return "MalformedTag";
    case errc::length_mismatch: return "LengthMismatch";
    case errc::invalid_container: return "InvalidContainer";
    case errc::key_mismatch: return "KeyMismatch";
    case errc::bad_params: return "BadParams";
    case errc::io_error: return "IoError";
    case errc::internal: return "Internal";
    }
    return "Unknown";
}

class error : public std::runtime_error {
public:
    error(errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

    errc code() const noexcept { return code_; }

private:
    errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) { throw error(code, what); }

} // namespace mobius

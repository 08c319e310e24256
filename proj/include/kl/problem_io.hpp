#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "kl/linalg.hpp"
#include "kl/model.hpp"

namespace kl {

struct ProblemFile {
    KLQuery query;
    /// Optional directed-sampling directions for the oracle.
    std::vector<Vector> directions;
    /// FNV-1a 64-bit hash of the raw file bytes, 16 hex digits.
    std::string digest;
};

/// Parses a problem document. Malformed JSON raises ParseError naming the byte offset, line and column;
/// schema violations raise ParseError naming the JSON pointer of the offending field.
ProblemFile parse_problem(std::string_view text);

/// Reads and parses a file; unreadable files raise InvalidArgument.
ProblemFile load_problem(const std::string& path);

std::string fnv1a_hex(std::string_view bytes);

}  // namespace kl

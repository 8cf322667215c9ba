#pragma once

#include <stdexcept>
#include <string>

namespace wardrop {

// Malformed game/CRG structure, bad ids, dimension mismatches.
class StructuralError : public std::runtime_error {
public:
    explicit StructuralError(const std::string& what) : std::runtime_error(what) {}
};

// Input file or JSON document does not match the expected schema.
class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace wardrop

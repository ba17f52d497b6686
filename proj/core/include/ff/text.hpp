#pragma once

#include <span>
#include <string>
#include <string_view>

#include "ff/fsl.hpp"
#include "ff/opcode.hpp"

namespace ff {

// Canonical snippet text: one opcode per line, either a primitive name or
//
//     const <type> <literal>
//
// Tensor literals are bare numbers (rank 0) or row-major nested brackets,
// e.g. `[[1,2],[3,4]]`. Tuple literals list typed members:
// `(grid [[1]], int_pair [0,0], color 3)`. Blank lines and lines starting
// with '#' are ignored by compile and never produced by decompile.
Code compile(std::string_view text, const Fsl& fsl);
std::string decompile(std::span<const Opcode> code, const Fsl& fsl);

std::string format_literal(const Value& v, const TypeSet& types);
Value parse_literal(std::string_view text, TypeId type, const TypeSet& types);

}  // namespace ff

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ff/fsl.hpp"
#include "ff/value.hpp"

namespace ff {

struct Opcode {
    enum class Kind : std::uint8_t { Call = 0, Push = 1 };

    Kind kind = Kind::Call;
    PrimitiveId primitive{};
    Value constant;

    static Opcode call(PrimitiveId id) { return Opcode{Kind::Call, id, Value()}; }
    static Opcode push(Value v) { return Opcode{Kind::Push, PrimitiveId{}, std::move(v)}; }

    bool is_call() const noexcept { return kind == Kind::Call; }
    bool is_push() const noexcept { return kind == Kind::Push; }

    bool operator==(const Opcode& other) const;
    std::size_t hash() const;
};

using Code = std::vector<Opcode>;

std::size_t hash_code(std::span<const Opcode> code);

struct CodeHash {
    std::size_t operator()(const Code& code) const { return hash_code(code); }
};

Code concat(std::span<const Opcode> a, std::span<const Opcode> b);

}  // namespace ff

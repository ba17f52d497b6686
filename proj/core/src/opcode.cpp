#include "ff/opcode.hpp"

namespace ff {

bool Opcode::operator==(const Opcode& other) const {
    if (kind != other.kind) return false;
    if (is_call()) return primitive == other.primitive;
    return constant == other.constant;
}

std::size_t Opcode::hash() const {
    if (is_call()) return 0x51ed270b27e5f3a1ULL ^ primitive.value;
    return 0x2545f4914f6cdd1dULL ^ constant.hash();
}

std::size_t hash_code(std::span<const Opcode> code) {
    std::size_t seed = code.size();
    for (const auto& op : code) seed ^= op.hash() + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2);
    return seed;
}

Code concat(std::span<const Opcode> a, std::span<const Opcode> b) {
    Code out;
    out.reserve(a.size() + b.size());
    out.insert(out.end(), a.begin(), a.end());
    out.insert(out.end(), b.begin(), b.end());
    return out;
}

}  // namespace ff

#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ff/types.hpp"
#include "ff/value.hpp"

namespace ff {

struct ResourceLimits {
    std::size_t max_steps = 1024;
    std::size_t max_stack_depth = 256;
    std::size_t max_tensor_cells = 1'000'000;
};

struct PrimitiveId {
    std::uint16_t value = 0;

    auto operator<=>(const PrimitiveId&) const = default;
};

struct PrimitiveSignature {
    // Leftmost argument sits deepest on the stack.
    std::vector<TypeId> args;
    TypeId ret;

    bool operator==(const PrimitiveSignature&) const = default;
};

// Kernel stack shufflers. They rearrange the stack instead of returning a
// value, so they carry no typed signature and never produce results.
enum class StackEffect : std::uint8_t { Swap, Duplicate, Drop, SplitTuple, MakeTuple };

struct CallContext {
    const TypeSet& types;
    const ResourceLimits& limits;
};

// Returns a Value conforming to the signature's return type, or an error
// Value. Primitives never throw.
using PrimitiveFn = std::function<Value(std::span<const Value> args, const CallContext& ctx)>;

struct Primitive {
    std::string name;
    PrimitiveSignature signature;
    PrimitiveFn fn;
    std::optional<StackEffect> stack_effect;
    int tuple_arity = 0;  // MakeTuple only
    double cost_hint = 1.0;
    bool kernel = false;

    bool is_stack_op() const noexcept { return stack_effect.has_value(); }
};

// A field specific language: the type set T plus its primitives. Kernel
// types and kernel primitives are installed by the constructor.
class Fsl {
public:
    Fsl();

    TypeSet& types() noexcept { return types_; }
    const TypeSet& types() const noexcept { return types_; }

    PrimitiveId add(Primitive primitive);

    const Primitive& get(PrimitiveId id) const;
    std::optional<PrimitiveId> find(std::string_view name) const;
    PrimitiveId require(std::string_view name) const;
    bool contains(PrimitiveId id) const noexcept { return id.value < primitives_.size(); }
    std::size_t size() const noexcept { return primitives_.size(); }
    std::span<const Primitive> primitives() const noexcept { return primitives_; }

    // Well-known kernel types.
    TypeId int_type() const noexcept { return int_; }
    TypeId real_type() const noexcept { return real_; }
    TypeId bool_type() const noexcept { return bool_; }

private:
    TypeSet types_;
    std::vector<Primitive> primitives_;
    std::unordered_map<std::string, PrimitiveId> by_name_;
    TypeId int_{}, real_{}, bool_{};
};

namespace kernel {
inline constexpr std::string_view kSwapTop = "swap_top";
inline constexpr std::string_view kDuplicateTop = "duplicate_top";
inline constexpr std::string_view kDropTop = "drop_top";
inline constexpr std::string_view kSplitTuple = "split_tuple";
inline constexpr std::string_view kMakeTuple2 = "make_tuple_2";
inline constexpr std::string_view kMakeTuple3 = "make_tuple_3";
inline constexpr std::string_view kHcf = "hcf";
}  // namespace kernel

}  // namespace ff

template <>
struct std::hash<ff::PrimitiveId> {
    std::size_t operator()(ff::PrimitiveId id) const noexcept { return id.value; }
};

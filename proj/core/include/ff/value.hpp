#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "ff/error.hpp"
#include "ff/types.hpp"

namespace ff {

// Dense row-major tensor. Integer, boolean and color elements share the
// int32 buffer; reals use doubles.
struct Tensor {
    std::vector<int> shape;
    std::variant<std::vector<std::int32_t>, std::vector<double>> data;

    std::size_t cell_count() const noexcept;
    bool is_real() const noexcept { return data.index() == 1; }
    const std::vector<std::int32_t>& ints() const { return std::get<0>(data); }
    const std::vector<double>& reals() const { return std::get<1>(data); }

    bool operator==(const Tensor&) const = default;
};

struct ErrorInfo {
    ErrorCode code = ErrorCode::PrimitiveError;
    std::string message;
    std::size_t opcode_index = 0;

    bool operator==(const ErrorInfo&) const = default;
};

class Value;
using Tuple = std::vector<Value>;

// Immutable typed datum. Copies share the payload, so Values are cheap to
// pass around and safe to read from many threads.
class Value {
public:
    Value();

    static Value tensor(TypeId type, Tensor tensor);
    static Value tuple(TypeId type, Tuple members);
    static Value error(ErrorCode code, std::string message, std::size_t opcode_index = 0);

    TypeId type() const noexcept { return type_; }
    Category category() const noexcept;
    bool is_error() const noexcept { return category() == Category::Error; }
    bool is_tensor() const noexcept { return category() == Category::Tensor; }
    bool is_tuple() const noexcept { return category() == Category::Tuple; }

    const Tensor& as_tensor() const;
    const Tuple& members() const;
    const ErrorInfo& error_info() const;

    // Total tensor cells held, recursively through tuples.
    std::size_t cell_count() const;

    // Same payload with a different declared type (used for widening and
    // for retyping a tensor as a conforming subtype).
    Value retyped(TypeId type) const;

    bool operator==(const Value& other) const;

    std::size_t hash() const;

private:
    using Payload = std::variant<Tensor, Tuple, ErrorInfo>;

    Value(TypeId type, std::shared_ptr<const Payload> payload)
        : type_(type), payload_(std::move(payload)) {}

    TypeId type_;
    std::shared_ptr<const Payload> payload_;
};

// Converts an integer tensor Value to reals, keeping the shape.
Value widen_to_real(const Value& v, TypeId real_type);

// Checks a Value's payload against its declared type (shape, element
// category, tuple layout). Used when values enter from outside the executor.
bool well_formed(const TypeSet& types, const Value& v);

}  // namespace ff

#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace ff {

struct TypeId {
    std::uint16_t value = 0;

    auto operator<=>(const TypeId&) const = default;
};

enum class Category : std::uint8_t { Tensor, Tuple, Error };

enum class Element : std::uint8_t { Any, Integer, Real, Boolean, Color };

std::string_view to_string(Element element) noexcept;

// Extent that matches any size. Only meaningful on declared types: a value's
// shape is always concrete.
inline constexpr int kAnyExtent = -1;

struct TypeDescriptor {
    TypeId id;
    std::string name;
    Category category = Category::Tensor;
    Element element = Element::Any;
    std::optional<std::vector<int>> shape;
    std::optional<TypeId> parent;
    // Tuple members. With `repeated` set the tuple holds zero or more values
    // of members[0].
    std::vector<TypeId> members;
    bool repeated = false;
};

// The set T of every type used by a language. Ids are dense and assigned in
// registration order; the error type, the generic tensor and the generic
// tuple always occupy the first three slots.
class TypeSet {
public:
    static constexpr TypeId kError{0};
    static constexpr TypeId kTensor{1};
    static constexpr TypeId kTuple{2};

    TypeSet();

    TypeId add_tensor(std::string name, Element element, std::optional<std::vector<int>> shape,
                      TypeId parent);
    TypeId add_tuple(std::string name, std::vector<TypeId> members, bool repeated = false,
                     TypeId parent = kTuple);

    const TypeDescriptor& get(TypeId id) const;
    std::optional<TypeId> find(std::string_view name) const;
    TypeId require(std::string_view name) const;
    bool contains(TypeId id) const noexcept { return id.value < types_.size(); }
    std::size_t size() const noexcept { return types_.size(); }

    bool is_ancestor(TypeId ancestor, TypeId type) const;

    // Covariant in returns, contravariant in arguments: `actual` may stand in
    // wherever `expected` is declared.
    bool conforms(TypeId actual, TypeId expected) const;

    // True when conformance relies on integer -> real widening.
    bool needs_widening(TypeId actual, TypeId expected) const;

private:
    TypeId add(TypeDescriptor descriptor);

    std::vector<TypeDescriptor> types_;
    std::unordered_map<std::string, TypeId> by_name_;
};

bool shape_matches(const std::vector<int>& concrete, const std::optional<std::vector<int>>& declared);

}  // namespace ff

template <>
struct std::hash<ff::TypeId> {
    std::size_t operator()(ff::TypeId id) const noexcept { return id.value; }
};

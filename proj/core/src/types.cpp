#include "ff/types.hpp"

#include "ff/error.hpp"

namespace ff {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::None: return "none";
    case ErrorCode::TypeMismatch: return "type-mismatch";
    case ErrorCode::PrimitiveError: return "primitive-error";
    case ErrorCode::StackUnderflow: return "stack-underflow";
    case ErrorCode::LimitExceeded: return "limit-exceeded";
    case ErrorCode::UnknownPrimitive: return "unknown-primitive";
    case ErrorCode::MalformedLiteral: return "malformed-literal";
    case ErrorCode::DuplicateName: return "duplicate-name";
    case ErrorCode::UnknownType: return "unknown-type";
    case ErrorCode::UnknownField: return "unknown-field";
    case ErrorCode::NotASnippet: return "not-a-snippet";
    case ErrorCode::InsufficientCodebase: return "insufficient-codebase";
    case ErrorCode::DegenerateDataset: return "degenerate-dataset";
    case ErrorCode::EmptyInput: return "empty-input";
    case ErrorCode::ParseError: return "parse-error";
    case ErrorCode::InvalidColor: return "invalid-color";
    case ErrorCode::InvalidDimensions: return "invalid-dimensions";
    case ErrorCode::ShapeMismatch: return "shape-mismatch";
    case ErrorCode::IoError: return "io-error";
    case ErrorCode::VersionMismatch: return "version-mismatch";
    case ErrorCode::CorruptFile: return "corrupt-file";
    case ErrorCode::MissingFile: return "missing-file";
    case ErrorCode::FieldMismatch: return "field-mismatch";
    case ErrorCode::InvalidArgument: return "invalid-argument";
    }
    return "unknown";
}

std::string_view to_string(Element element) noexcept {
    switch (element) {
    case Element::Any: return "any";
    case Element::Integer: return "integer";
    case Element::Real: return "real";
    case Element::Boolean: return "boolean";
    case Element::Color: return "color";
    }
    return "unknown";
}

namespace {

bool widens(Element from, Element to) {
    return from == Element::Integer && to == Element::Real;
}

}  // namespace

bool shape_matches(const std::vector<int>& concrete, const std::optional<std::vector<int>>& declared) {
    if (!declared) return true;
    if (declared->size() != concrete.size()) return false;
    for (std::size_t i = 0; i < concrete.size(); ++i) {
        if ((*declared)[i] != kAnyExtent && (*declared)[i] != concrete[i]) return false;
    }
    return true;
}

TypeSet::TypeSet() {
    add({.name = "error", .category = Category::Error});
    add({.name = "tensor", .category = Category::Tensor, .element = Element::Any});
    add({.name = "tuple", .category = Category::Tuple});
}

TypeId TypeSet::add(TypeDescriptor descriptor) {
    if (by_name_.contains(descriptor.name)) {
        throw Error(ErrorCode::DuplicateName, "type '" + descriptor.name + "' already registered");
    }
    if (types_.size() >= 0xFFFF) throw Error(ErrorCode::InvalidArgument, "type set is full");
    descriptor.id = TypeId{static_cast<std::uint16_t>(types_.size())};
    by_name_.emplace(descriptor.name, descriptor.id);
    types_.push_back(std::move(descriptor));
    return types_.back().id;
}

TypeId TypeSet::add_tensor(std::string name, Element element, std::optional<std::vector<int>> shape,
                           TypeId parent) {
    if (!contains(parent) || get(parent).category != Category::Tensor) {
        throw Error(ErrorCode::UnknownType, "tensor type '" + name + "' needs a tensor parent");
    }
    const auto& p = get(parent);
    if (p.element != Element::Any && p.element != element) {
        throw Error(ErrorCode::InvalidArgument,
                    "type '" + name + "' changes the element category of its parent");
    }
    if (shape) {
        // A shaped type must descend from the unshaped tensor of its element.
        bool rooted = false;
        for (std::optional<TypeId> cur = parent; cur && !rooted; cur = get(*cur).parent) {
            const auto& a = get(*cur);
            rooted = !a.shape && a.element == element;
        }
        if (!rooted) {
            throw Error(ErrorCode::InvalidArgument,
                        "shaped type '" + name + "' must descend from an unshaped " +
                            std::string(to_string(element)) + " tensor");
        }
    }
    return add({.name = std::move(name),
                .category = Category::Tensor,
                .element = element,
                .shape = std::move(shape),
                .parent = parent});
}

TypeId TypeSet::add_tuple(std::string name, std::vector<TypeId> members, bool repeated, TypeId parent) {
    if (!contains(parent) || get(parent).category != Category::Tuple) {
        throw Error(ErrorCode::UnknownType, "tuple type '" + name + "' needs a tuple parent");
    }
    for (TypeId m : members) {
        if (!contains(m)) throw Error(ErrorCode::UnknownType, "tuple '" + name + "' has unknown member");
        if (m == kError) throw Error(ErrorCode::InvalidArgument, "tuples cannot hold the error type");
    }
    if (repeated && members.size() != 1) {
        throw Error(ErrorCode::InvalidArgument, "repeated tuple '" + name + "' needs exactly one member");
    }
    return add({.name = std::move(name),
                .category = Category::Tuple,
                .parent = parent,
                .members = std::move(members),
                .repeated = repeated});
}

const TypeDescriptor& TypeSet::get(TypeId id) const {
    if (!contains(id)) throw Error(ErrorCode::UnknownType, "type id " + std::to_string(id.value));
    return types_[id.value];
}

std::optional<TypeId> TypeSet::find(std::string_view name) const {
    auto it = by_name_.find(std::string(name));
    if (it == by_name_.end()) return std::nullopt;
    return it->second;
}

TypeId TypeSet::require(std::string_view name) const {
    if (auto id = find(name)) return *id;
    throw Error(ErrorCode::UnknownType, "unknown type '" + std::string(name) + "'");
}

bool TypeSet::is_ancestor(TypeId ancestor, TypeId type) const {
    std::optional<TypeId> cur = get(type).parent;
    while (cur) {
        if (*cur == ancestor) return true;
        cur = types_[cur->value].parent;
    }
    return false;
}

bool TypeSet::needs_widening(TypeId actual, TypeId expected) const {
    if (actual == expected || is_ancestor(expected, actual)) return false;
    const auto& a = get(actual);
    const auto& e = get(expected);
    if (a.category != Category::Tensor || e.category != Category::Tensor) return false;
    if (!widens(a.element, e.element)) return false;
    if (!e.shape) return true;
    if (!a.shape || a.shape->size() != e.shape->size()) return false;
    for (std::size_t i = 0; i < e.shape->size(); ++i) {
        if ((*e.shape)[i] != kAnyExtent && (*a.shape)[i] != (*e.shape)[i]) return false;
    }
    return true;
}

bool TypeSet::conforms(TypeId actual, TypeId expected) const {
    if (actual == expected) return true;
    if (is_ancestor(expected, actual)) return true;
    return needs_widening(actual, expected);
}

}  // namespace ff

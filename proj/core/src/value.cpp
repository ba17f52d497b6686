#include "ff/value.hpp"

#include <bit>
#include <functional>

namespace ff {

std::size_t Tensor::cell_count() const noexcept {
    return std::visit([](const auto& v) { return v.size(); }, data);
}

Value::Value()
    : Value(TypeSet::kError, std::make_shared<const Payload>(ErrorInfo{ErrorCode::PrimitiveError, "empty value", 0})) {}

Value Value::tensor(TypeId type, Tensor tensor) {
    return Value(type, std::make_shared<const Payload>(std::move(tensor)));
}

Value Value::tuple(TypeId type, Tuple members) {
    return Value(type, std::make_shared<const Payload>(std::move(members)));
}

Value Value::error(ErrorCode code, std::string message, std::size_t opcode_index) {
    return Value(TypeSet::kError,
                 std::make_shared<const Payload>(ErrorInfo{code, std::move(message), opcode_index}));
}

Category Value::category() const noexcept {
    switch (payload_->index()) {
    case 0: return Category::Tensor;
    case 1: return Category::Tuple;
    default: return Category::Error;
    }
}

const Tensor& Value::as_tensor() const {
    if (auto* t = std::get_if<Tensor>(payload_.get())) return *t;
    throw Error(ErrorCode::TypeMismatch, "value is not a tensor");
}

const Tuple& Value::members() const {
    if (auto* t = std::get_if<Tuple>(payload_.get())) return *t;
    throw Error(ErrorCode::TypeMismatch, "value is not a tuple");
}

const ErrorInfo& Value::error_info() const {
    if (auto* e = std::get_if<ErrorInfo>(payload_.get())) return *e;
    throw Error(ErrorCode::TypeMismatch, "value is not an error");
}

std::size_t Value::cell_count() const {
    switch (payload_->index()) {
    case 0: return std::get<Tensor>(*payload_).cell_count();
    case 1: {
        std::size_t n = 0;
        for (const auto& m : std::get<Tuple>(*payload_)) n += m.cell_count();
        return n;
    }
    default: return 0;
    }
}

Value Value::retyped(TypeId type) const { return Value(type, payload_); }

bool Value::operator==(const Value& other) const {
    if (type_ != other.type_) return false;
    if (payload_ == other.payload_) return true;
    return *payload_ == *other.payload_;
}

namespace {

inline void mix(std::size_t& seed, std::size_t v) {
    seed ^= v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2);
}

}  // namespace

std::size_t Value::hash() const {
    std::size_t seed = type_.value;
    switch (payload_->index()) {
    case 0: {
        const auto& t = std::get<Tensor>(*payload_);
        for (int d : t.shape) mix(seed, static_cast<std::size_t>(d));
        if (t.is_real()) {
            for (double x : t.reals()) mix(seed, std::bit_cast<std::uint64_t>(x));
        } else {
            for (std::int32_t x : t.ints()) mix(seed, static_cast<std::size_t>(x));
        }
        break;
    }
    case 1:
        for (const auto& m : std::get<Tuple>(*payload_)) mix(seed, m.hash());
        break;
    default: {
        const auto& e = std::get<ErrorInfo>(*payload_);
        mix(seed, static_cast<std::size_t>(e.code));
        mix(seed, std::hash<std::string>{}(e.message));
        break;
    }
    }
    return seed;
}

Value widen_to_real(const Value& v, TypeId real_type) {
    const Tensor& t = v.as_tensor();
    if (t.is_real()) return v.retyped(real_type);
    std::vector<double> reals(t.ints().begin(), t.ints().end());
    return Value::tensor(real_type, Tensor{t.shape, std::move(reals)});
}

bool well_formed(const TypeSet& types, const Value& v) {
    if (!types.contains(v.type())) return false;
    const auto& d = types.get(v.type());
    if (d.category != v.category()) return false;
    switch (d.category) {
    case Category::Error: return v.error_info().code != ErrorCode::None;
    case Category::Tensor: {
        const Tensor& t = v.as_tensor();
        std::size_t cells = 1;
        for (int e : t.shape) {
            if (e < 0) return false;
            cells *= static_cast<std::size_t>(e);
        }
        if (cells != t.cell_count()) return false;
        if (!shape_matches(t.shape, d.shape)) return false;
        if (d.element == Element::Real) return t.is_real();
        if (d.element != Element::Any && t.is_real()) return false;
        // Inherited shape constraints along the parent chain.
        for (auto p = d.parent; p; p = types.get(*p).parent) {
            if (!shape_matches(t.shape, types.get(*p).shape)) return false;
        }
        return true;
    }
    case Category::Tuple: {
        const Tuple& m = v.members();
        if (d.repeated) {
            for (const auto& x : m) {
                if (!types.conforms(x.type(), d.members[0]) || !well_formed(types, x)) return false;
            }
            return true;
        }
        if (d.members.empty()) {
            for (const auto& x : m) {
                if (!well_formed(types, x)) return false;
            }
            return true;
        }
        if (m.size() != d.members.size()) return false;
        for (std::size_t i = 0; i < m.size(); ++i) {
            if (!types.conforms(m[i].type(), d.members[i]) || !well_formed(types, m[i])) return false;
        }
        return true;
    }
    }
    return false;
}

}  // namespace ff

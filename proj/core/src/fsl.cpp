#include "ff/fsl.hpp"

namespace ff {

Fsl::Fsl() {
    const TypeId int_tensor = types_.add_tensor("int_tensor", Element::Integer, std::nullopt, TypeSet::kTensor);
    int_ = types_.add_tensor("int", Element::Integer, std::vector<int>{}, int_tensor);
    const TypeId real_tensor = types_.add_tensor("real_tensor", Element::Real, std::nullopt, TypeSet::kTensor);
    real_ = types_.add_tensor("real", Element::Real, std::vector<int>{}, real_tensor);
    const TypeId bool_tensor = types_.add_tensor("bool_tensor", Element::Boolean, std::nullopt, TypeSet::kTensor);
    bool_ = types_.add_tensor("bool", Element::Boolean, std::vector<int>{}, bool_tensor);

    auto stack_op = [this](std::string_view name, StackEffect effect, int arity = 0) {
        add(Primitive{.name = std::string(name),
                      .signature = {{}, TypeSet::kError},
                      .stack_effect = effect,
                      .tuple_arity = arity,
                      .kernel = true});
    };
    stack_op(kernel::kSwapTop, StackEffect::Swap);
    stack_op(kernel::kDuplicateTop, StackEffect::Duplicate);
    stack_op(kernel::kDropTop, StackEffect::Drop);
    stack_op(kernel::kSplitTuple, StackEffect::SplitTuple);
    stack_op(kernel::kMakeTuple2, StackEffect::MakeTuple, 2);
    stack_op(kernel::kMakeTuple3, StackEffect::MakeTuple, 3);

    add(Primitive{.name = std::string(kernel::kHcf),
                  .signature = {{}, TypeSet::kError},
                  .fn = [](std::span<const Value>, const CallContext&) {
                      return Value::error(ErrorCode::PrimitiveError, "halt and catch fire");
                  },
                  .kernel = true});
}

PrimitiveId Fsl::add(Primitive primitive) {
    if (by_name_.contains(primitive.name)) {
        throw Error(ErrorCode::DuplicateName, "primitive '" + primitive.name + "' already registered");
    }
    if (!primitive.is_stack_op()) {
        for (TypeId a : primitive.signature.args) {
            if (!types_.contains(a)) {
                throw Error(ErrorCode::UnknownType, "primitive '" + primitive.name + "' has an unknown argument type");
            }
        }
        if (!types_.contains(primitive.signature.ret)) {
            throw Error(ErrorCode::UnknownType, "primitive '" + primitive.name + "' has an unknown return type");
        }
        if (!primitive.fn) {
            throw Error(ErrorCode::InvalidArgument, "primitive '" + primitive.name + "' has no implementation");
        }
    }
    if (primitive.cost_hint < 0.0) {
        throw Error(ErrorCode::InvalidArgument, "primitive '" + primitive.name + "' has a negative cost hint");
    }
    if (primitives_.size() >= 0xFFFF) throw Error(ErrorCode::InvalidArgument, "FSL is full");
    PrimitiveId id{static_cast<std::uint16_t>(primitives_.size())};
    by_name_.emplace(primitive.name, id);
    primitives_.push_back(std::move(primitive));
    return id;
}

const Primitive& Fsl::get(PrimitiveId id) const {
    if (!contains(id)) throw Error(ErrorCode::UnknownPrimitive, "primitive id " + std::to_string(id.value));
    return primitives_[id.value];
}

std::optional<PrimitiveId> Fsl::find(std::string_view name) const {
    auto it = by_name_.find(std::string(name));
    if (it == by_name_.end()) return std::nullopt;
    return it->second;
}

PrimitiveId Fsl::require(std::string_view name) const {
    if (auto id = find(name)) return *id;
    throw Error(ErrorCode::UnknownPrimitive, "unknown primitive '" + std::string(name) + "'");
}

}  // namespace ff

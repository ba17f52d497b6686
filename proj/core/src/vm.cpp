#include "ff/vm.hpp"

#include <array>
#include <string>

namespace ff {

namespace {

class Executor {
public:
    Executor(const Fsl& fsl, TypeId range, const ResourceLimits& limits)
        : fsl_(fsl), types_(fsl.types()), range_(range), limits_(limits), ctx_{fsl.types(), limits} {}

    ExecutionTrace run(StackState initial, std::span<const Opcode> code) {
        trace_.final_stack = std::move(initial);
        auto& stack = trace_.final_stack.entries;
        if (stack.size() > limits_.max_stack_depth) {
            fail(0, ErrorCode::LimitExceeded, "initial stack exceeds depth limit");
            return std::move(trace_);
        }
        for (std::size_t i = 0; i < code.size(); ++i) {
            if (trace_.executed >= limits_.max_steps) {
                fail(i, ErrorCode::LimitExceeded, "step limit reached");
                break;
            }
            ++trace_.executed;
            ++trace_.final_stack.steps;
            if (!step(i, code[i])) break;
            if (stack.size() > limits_.max_stack_depth) {
                if (!trace_.results.empty() && trace_.results.back().index == i) trace_.results.pop_back();
                fail(i, ErrorCode::LimitExceeded, "stack depth limit exceeded");
                break;
            }
        }
        return std::move(trace_);
    }

private:
    bool fail(std::size_t index, ErrorCode code, std::string message) {
        trace_.status = Status::Error;
        trace_.error_at = index;
        trace_.error = ErrorInfo{code, std::move(message), index};
        return false;
    }

    bool step(std::size_t i, const Opcode& op) {
        auto& stack = trace_.final_stack.entries;
        if (op.is_push()) {
            if (op.constant.cell_count() > limits_.max_tensor_cells) {
                return fail(i, ErrorCode::LimitExceeded, "constant exceeds tensor cell limit");
            }
            stack.push_back(op.constant);
            return true;
        }
        if (!fsl_.contains(op.primitive)) return fail(i, ErrorCode::UnknownPrimitive, "unresolved primitive");
        const Primitive& prim = fsl_.get(op.primitive);
        if (prim.is_stack_op()) return stack_op(i, prim);

        const auto& sig = prim.signature;
        const std::size_t arity = sig.args.size();
        if (stack.size() < arity) return fail(i, ErrorCode::StackUnderflow, prim.name + " needs " + std::to_string(arity) + " arguments");

        args_.assign(stack.end() - static_cast<std::ptrdiff_t>(arity), stack.end());
        for (std::size_t a = 0; a < arity; ++a) {
            const TypeId actual = args_[a].type();
            if (!types_.conforms(actual, sig.args[a])) {
                return fail(i, ErrorCode::TypeMismatch,
                            prim.name + " argument " + std::to_string(a) + ": expected " + types_.get(sig.args[a]).name +
                                ", got " + types_.get(actual).name);
            }
            if (types_.needs_widening(actual, sig.args[a])) args_[a] = widen_to_real(args_[a], sig.args[a]);
        }

        Value out = prim.fn(args_, ctx_);
        if (out.is_error()) {
            const auto& e = out.error_info();
            return fail(i, e.code == ErrorCode::None ? ErrorCode::PrimitiveError : e.code, prim.name + ": " + e.message);
        }
        if (!types_.conforms(out.type(), sig.ret)) {
            return fail(i, ErrorCode::TypeMismatch, prim.name + " returned a value outside its signature");
        }
        if (out.cell_count() > limits_.max_tensor_cells) {
            return fail(i, ErrorCode::LimitExceeded, prim.name + " exceeded the tensor cell limit");
        }
        stack.resize(stack.size() - arity);
        if (types_.conforms(out.type(), range_)) trace_.results.push_back({i, out});
        stack.push_back(std::move(out));
        return true;
    }

    bool stack_op(std::size_t i, const Primitive& prim) {
        auto& stack = trace_.final_stack.entries;
        switch (*prim.stack_effect) {
        case StackEffect::Swap:
            if (stack.size() < 2) return fail(i, ErrorCode::StackUnderflow, "swap_top needs two entries");
            std::swap(stack[stack.size() - 1], stack[stack.size() - 2]);
            return true;
        case StackEffect::Duplicate:
            if (stack.empty()) return fail(i, ErrorCode::StackUnderflow, "duplicate_top on empty stack");
            stack.push_back(stack.back());
            return true;
        case StackEffect::Drop:
            if (stack.empty()) return fail(i, ErrorCode::StackUnderflow, "drop_top on empty stack");
            stack.pop_back();
            return true;
        case StackEffect::SplitTuple: {
            if (stack.empty()) return fail(i, ErrorCode::StackUnderflow, "split_tuple on empty stack");
            if (!stack.back().is_tuple()) return fail(i, ErrorCode::TypeMismatch, "split_tuple needs a tuple on top");
            Tuple members = stack.back().members();
            stack.pop_back();
            for (auto& m : members) stack.push_back(std::move(m));
            return true;
        }
        case StackEffect::MakeTuple: {
            const auto k = static_cast<std::size_t>(prim.tuple_arity);
            if (stack.size() < k) return fail(i, ErrorCode::StackUnderflow, prim.name + " needs " + std::to_string(k) + " entries");
            for (std::size_t a = stack.size() - k; a < stack.size(); ++a) {
                if (stack[a].is_error()) return fail(i, ErrorCode::TypeMismatch, "tuples cannot hold errors");
            }
            Tuple members(stack.end() - static_cast<std::ptrdiff_t>(k), stack.end());
            stack.resize(stack.size() - k);
            stack.push_back(Value::tuple(TypeSet::kTuple, std::move(members)));
            return true;
        }
        }
        return fail(i, ErrorCode::UnknownPrimitive, "unknown stack effect");
    }

    const Fsl& fsl_;
    const TypeSet& types_;
    TypeId range_;
    const ResourceLimits& limits_;
    CallContext ctx_;
    ExecutionTrace trace_;
    std::vector<Value> args_;
};

}  // namespace

ExecutionTrace execute_core(StackState initial, std::span<const Opcode> code, const Fsl& fsl, TypeId range,
                            const ResourceLimits& limits) {
    return Executor(fsl, range, limits).run(std::move(initial), code);
}

}  // namespace ff

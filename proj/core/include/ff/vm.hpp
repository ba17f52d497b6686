#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ff/fsl.hpp"
#include "ff/opcode.hpp"
#include "ff/value.hpp"

namespace ff {

struct StackState {
    std::vector<Value> entries;  // top = back()
    std::size_t steps = 0;       // opcodes executed since the state was seeded

    bool operator==(const StackState&) const = default;
};

enum class Status : std::uint8_t { Ok, Error };

struct CodeResult {
    std::size_t index;  // opcode index within the executed code
    Value value;

    bool operator==(const CodeResult&) const = default;
};

struct ExecutionTrace {
    StackState final_stack;
    std::vector<CodeResult> results;
    Status status = Status::Ok;
    std::size_t error_at = 0;
    ErrorInfo error{ErrorCode::None, {}, 0};
    std::size_t executed = 0;

    bool ok() const noexcept { return status == Status::Ok; }
    bool operator==(const ExecutionTrace&) const = default;
};

// The core: runs `code` once, front to back, from `initial`. Every call's
// arguments are type checked, every non-constant opcode whose value conforms
// to `range` is collected, and the first failure stops execution. Failures are
// reported in the trace; nothing escapes as an exception.
ExecutionTrace execute_core(StackState initial, std::span<const Opcode> code, const Fsl& fsl, TypeId range,
                            const ResourceLimits& limits = {});

}  // namespace ff

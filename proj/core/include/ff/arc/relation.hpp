#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "ff/arc/task.hpp"
#include "ff/search.hpp"

namespace ff::arc {

// sigma[c] is the color c maps to; -1 for colors that never occur.
using ColorMap = std::array<std::int32_t, kColors>;

// The unique map sending every yhat cell onto the matching y cell, across
// all pairs jointly. Empty when shapes differ or no consistent map exists.
std::optional<ColorMap> find_color_map(std::span<const Grid> yhat, std::span<const Grid> y);

// Recolor steps (from, to) realising `sigma` on grids whose colors are all
// in `present`; at most `max_steps` of them, else empty.
std::optional<std::vector<std::pair<std::int32_t, std::int32_t>>> recolor_chain(const ColorMap& sigma,
                                                                                 std::array<bool, kColors> present,
                                                                                 std::size_t max_steps = 3);

// [const color a, const color b, recolor] per step.
Code recolor_code(std::span<const std::pair<std::int32_t, std::int32_t>> steps, const FormalField& field);

// Single pair. Throws shape-mismatch; empty when yhat == y or no color map
// (with at most three recolors) explains the difference.
std::optional<CodeItem> suggest_patch(const Grid& yhat, const Grid& y, const FormalField& field);

// Joint version over all examples, as used by the search. Non-grid values or
// differing shapes give no patch.
std::optional<Code> suggest_patch(std::span<const Value> outputs, std::span<const Value> targets,
                                  const FormalField& field);

PatchHook patch_hook(FieldPtr field);

// Field, codebase (resolved against `tasks`), evaluations, priors, values,
// and the reward model at `reward_model`, or the handcrafted one when no
// path is given. Throws missing-file and field-mismatch.
FormalRelation build_arc_relation(const std::vector<ArcTask>& tasks, const std::filesystem::path& codebase,
                                  const std::optional<std::filesystem::path>& reward_model, FieldPtr field = nullptr);

}  // namespace ff::arc

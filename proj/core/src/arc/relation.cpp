#include "ff/arc/relation.hpp"

#include <algorithm>

namespace ff::arc {

std::optional<ColorMap> find_color_map(std::span<const Grid> yhat, std::span<const Grid> y) {
    if (yhat.size() != y.size() || yhat.empty()) return std::nullopt;
    ColorMap sigma;
    sigma.fill(-1);
    for (std::size_t k = 0; k < yhat.size(); ++k) {
        if (yhat[k].height != y[k].height || yhat[k].width != y[k].width) return std::nullopt;
        for (std::size_t i = 0; i < yhat[k].cells.size(); ++i) {
            const auto a = yhat[k].cells[i];
            const auto b = y[k].cells[i];
            if (a < 0 || a >= kColors || b < 0 || b >= kColors) return std::nullopt;
            auto& s = sigma[static_cast<std::size_t>(a)];
            if (s < 0) s = b;
            if (s != b) return std::nullopt;
        }
    }
    return sigma;
}

std::optional<std::vector<std::pair<std::int32_t, std::int32_t>>> recolor_chain(const ColorMap& sigma,
                                                                                 std::array<bool, kColors> present,
                                                                                 std::size_t max_steps) {
    // pending[a] = b for every color that still has to move.
    std::array<std::int32_t, kColors> pending;
    pending.fill(-1);
    for (std::int32_t c = 0; c < kColors; ++c) {
        const auto s = sigma[static_cast<std::size_t>(c)];
        if (s >= 0 && s != c) pending[static_cast<std::size_t>(c)] = s;
    }
    std::array<bool, kColors> taken = present;
    for (auto s : sigma) {
        if (s >= 0) taken[static_cast<std::size_t>(s)] = true;
    }
    std::vector<std::pair<std::int32_t, std::int32_t>> steps;
    auto is_source = [&](std::int32_t c) { return pending[static_cast<std::size_t>(c)] >= 0; };
    for (;;) {
        bool any = false;
        bool moved = false;
        for (std::int32_t a = 0; a < kColors; ++a) {
            const auto b = pending[static_cast<std::size_t>(a)];
            if (b < 0) continue;
            any = true;
            if (is_source(b)) continue;
            steps.emplace_back(a, b);
            pending[static_cast<std::size_t>(a)] = -1;
            moved = true;
            break;
        }
        if (!any) break;
        if (moved) continue;
        // Only cycles remain: park the lowest source on an unused color.
        std::int32_t a = 0;
        while (!is_source(a)) ++a;
        std::int32_t t = 0;
        while (t < kColors && taken[static_cast<std::size_t>(t)]) ++t;
        if (t == kColors) return std::nullopt;
        taken[static_cast<std::size_t>(t)] = true;
        steps.emplace_back(a, t);
        pending[static_cast<std::size_t>(t)] = pending[static_cast<std::size_t>(a)];
        pending[static_cast<std::size_t>(a)] = -1;
    }
    if (steps.empty() || steps.size() > max_steps) return std::nullopt;
    return steps;
}

Code recolor_code(std::span<const std::pair<std::int32_t, std::int32_t>> steps, const FormalField& field) {
    const TypeId color = field.types().require("color");
    const PrimitiveId recolor = field.fsl().require("recolor");
    Code code;
    for (auto [a, b] : steps) {
        code.push_back(Opcode::push(color_value(a, color)));
        code.push_back(Opcode::push(color_value(b, color)));
        code.push_back(Opcode::call(recolor));
    }
    return code;
}

namespace {

std::optional<Code> patch_for(std::span<const Grid> yhat, std::span<const Grid> y, const FormalField& field) {
    const auto sigma = find_color_map(yhat, y);
    if (!sigma) return std::nullopt;
    std::array<bool, kColors> present{};
    for (const auto& g : yhat) {
        for (auto c : g.cells) present[static_cast<std::size_t>(c)] = true;
    }
    const auto steps = recolor_chain(*sigma, present);
    if (!steps) return std::nullopt;
    return recolor_code(*steps, field);
}

}  // namespace

std::optional<CodeItem> suggest_patch(const Grid& yhat, const Grid& y, const FormalField& field) {
    if (yhat.height != y.height || yhat.width != y.width) {
        throw Error(ErrorCode::ShapeMismatch, "patch needs equally shaped grids");
    }
    auto code = patch_for(std::span(&yhat, 1), std::span(&y, 1), field);
    if (!code) return std::nullopt;
    return make_item(std::move(*code), field.fsl(), ItemOrigin::Allele);
}

std::optional<Code> suggest_patch(std::span<const Value> outputs, std::span<const Value> targets,
                                  const FormalField& field) {
    if (outputs.size() != targets.size() || outputs.empty()) return std::nullopt;
    std::vector<Grid> yhat, y;
    for (std::size_t i = 0; i < outputs.size(); ++i) {
        if (!outputs[i].is_tensor() || !targets[i].is_tensor()) return std::nullopt;
        if (outputs[i].as_tensor().shape.size() != 2 || outputs[i].as_tensor().is_real()) return std::nullopt;
        yhat.push_back(to_grid(outputs[i]));
        y.push_back(to_grid(targets[i]));
    }
    return patch_for(yhat, y, field);
}

PatchHook patch_hook(FieldPtr field) {
    return [field](std::span<const Value> outputs, std::span<const Value> targets) {
        return suggest_patch(outputs, targets, *field);
    };
}

FormalRelation build_arc_relation(const std::vector<ArcTask>& tasks, const std::filesystem::path& codebase,
                                  const std::optional<std::filesystem::path>& reward_model, FieldPtr field) {
    if (!field) field = make_field();
    FormalRelation rel;
    rel.field = field;
    rel.codebase = std::make_shared<const Codebase>(Codebase::load(codebase, field, task_resolver(tasks, field)));
    rel.reward = reward_model ? RewardModel::load(*reward_model) : RewardModel::handcrafted();
    rel.patch = patch_hook(field);
    return rel;
}

}  // namespace ff::arc

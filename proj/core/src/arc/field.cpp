#include "ff/arc/field.hpp"

namespace ff::arc {

ArcTypes ArcTypes::resolve(const TypeSet& types) {
    return ArcTypes{types.require("color"), types.require("grid"), types.require("int"),
                    types.require("int_pair"), types.require("object"), types.require("objects")};
}

Value grid_value(const Grid& g, TypeId grid_type) {
    return Value::tensor(grid_type, Tensor{{g.height, g.width}, g.cells});
}

Value color_value(std::int32_t color, TypeId color_type) {
    return Value::tensor(color_type, Tensor{{}, std::vector<std::int32_t>{color}});
}

Value int_value(std::int32_t v, TypeId int_type) {
    return Value::tensor(int_type, Tensor{{}, std::vector<std::int32_t>{v}});
}

Value object_value(const Object& o, const ArcTypes& t) {
    Value pos = Value::tensor(t.int_pair, Tensor{{2}, std::vector<std::int32_t>{o.row, o.col}});
    return Value::tuple(t.object, {grid_value(o.mask, t.grid), std::move(pos), color_value(o.color, t.color)});
}

Grid to_grid(const Value& v) {
    const Tensor& t = v.as_tensor();
    if (t.shape.size() != 2 || t.is_real()) throw Error(ErrorCode::TypeMismatch, "value is not a grid");
    Grid g;
    g.height = t.shape[0];
    g.width = t.shape[1];
    g.cells = t.ints();
    return g;
}

Object to_object(const Value& v) {
    const Tuple& m = v.members();
    if (m.size() != 3) throw Error(ErrorCode::TypeMismatch, "value is not an object");
    const auto& pos = m[1].as_tensor().ints();
    if (pos.size() != 2) throw Error(ErrorCode::TypeMismatch, "object position must be a pair");
    return Object{to_grid(m[0]), pos[0], pos[1], m[2].as_tensor().ints().at(0)};
}

namespace {

std::int32_t scalar(const Value& v) { return v.as_tensor().ints().at(0); }

Grid arg_grid(const Value& v) {
    Grid g = to_grid(v);
    if (!valid_grid(g)) throw Hcf("invalid grid argument");
    return g;
}

std::vector<Object> arg_objects(const Value& v) {
    std::vector<Object> out;
    for (const auto& m : v.members()) out.push_back(to_object(m));
    return out;
}

Value objects_value(const std::vector<Object>& objects, const ArcTypes& t) {
    Tuple members;
    members.reserve(objects.size());
    for (const auto& o : objects) members.push_back(object_value(o, t));
    return Value::tuple(t.objects, std::move(members));
}

// Wraps a grid computation as a primitive body: Hcf and malformed inputs
// become error values, oversized results are cut off by the cell limit.
template <class F>
PrimitiveFn guarded(F body) {
    return [body](std::span<const Value> args, const CallContext& ctx) -> Value {
        try {
            Value out = body(args);
            if (out.cell_count() > ctx.limits.max_tensor_cells) {
                return Value::error(ErrorCode::PrimitiveError, "result exceeds tensor cell limit");
            }
            return out;
        } catch (const Hcf& e) {
            return Value::error(ErrorCode::PrimitiveError, e.what());
        } catch (const std::exception& e) {
            return Value::error(ErrorCode::PrimitiveError, e.what());
        }
    };
}

using GridUnary = Grid (*)(const Grid&);

PrimitiveLibrary::Factory unary(GridUnary op) {
    return [op](const TypeSet& types) {
        const auto t = ArcTypes::resolve(types);
        return Primitive{.signature = {{t.grid}, t.grid},
                         .fn = guarded([op, t](std::span<const Value> a) { return grid_value(op(arg_grid(a[0])), t.grid); })};
    };
}

void install_types(TypeSet& types) {
    const TypeId color_tensor = types.add_tensor("color_tensor", Element::Color, std::nullopt, TypeSet::kTensor);
    const TypeId color = types.add_tensor("color", Element::Color, std::vector<int>{}, color_tensor);
    const TypeId grid = types.add_tensor("grid", Element::Color, std::vector<int>{kAnyExtent, kAnyExtent}, color_tensor);
    const TypeId int_pair = types.add_tensor("int_pair", Element::Integer, std::vector<int>{2}, types.require("int_tensor"));
    const TypeId object = types.add_tuple("object", {grid, int_pair, color});
    types.add_tuple("objects", {object}, true);
}

PrimitiveLibrary build_library() {
    PrimitiveLibrary lib("arc");
    lib.set_type_installer(install_types);
    lib.add_kind("grid", "grid", "ARC picture: 1-30 x 1-30 cells of colors 0-9");
    lib.add_kind("color", "color", "ARC color code 0-9");
    lib.add_kind("object", "object", "connected same-color region: (mask, position, color)");

    lib.add("identity_grid", unary([](const Grid& g) { return g; }));
    lib.add("mirror_horizontal", unary(ops::mirror_horizontal));
    lib.add("mirror_vertical", unary(ops::mirror_vertical));
    lib.add("rotate_90", unary(ops::rotate_90));
    lib.add("rotate_180", unary(ops::rotate_180));
    lib.add("rotate_270", unary(ops::rotate_270));
    lib.add("transpose", unary(ops::transpose));

    lib.add("recolor", [](const TypeSet& types) {
        const auto t = ArcTypes::resolve(types);
        return Primitive{.signature = {{t.grid, t.color, t.color}, t.grid},
                         .fn = guarded([t](std::span<const Value> a) {
                             return grid_value(ops::recolor(arg_grid(a[0]), scalar(a[1]), scalar(a[2])), t.grid);
                         })};
    });
    lib.add("recolor_all", [](const TypeSet& types) {
        const auto t = ArcTypes::resolve(types);
        return Primitive{.signature = {{t.grid, t.color}, t.grid},
                         .fn = guarded([t](std::span<const Value> a) {
                             return grid_value(ops::recolor_all(arg_grid(a[0]), scalar(a[1])), t.grid);
                         })};
    });
    lib.add("crop_to_content", unary(ops::crop_to_content));
    lib.add("pad_to", [](const TypeSet& types) {
        const auto t = ArcTypes::resolve(types);
        return Primitive{.signature = {{t.grid, t.int_type, t.int_type, t.color}, t.grid},
                         .fn = guarded([t](std::span<const Value> a) {
                             return grid_value(ops::pad_to(arg_grid(a[0]), scalar(a[1]), scalar(a[2]), scalar(a[3])),
                                               t.grid);
                         })};
    });
    lib.add("tile", [](const TypeSet& types) {
        const auto t = ArcTypes::resolve(types);
        return Primitive{.signature = {{t.grid, t.int_type, t.int_type}, t.grid},
                         .fn = guarded([t](std::span<const Value> a) {
                             return grid_value(ops::tile(arg_grid(a[0]), scalar(a[1]), scalar(a[2])), t.grid);
                         })};
    });
    lib.add("scale_up", [](const TypeSet& types) {
        const auto t = ArcTypes::resolve(types);
        return Primitive{.signature = {{t.grid, t.int_type}, t.grid},
                         .fn = guarded([t](std::span<const Value> a) {
                             return grid_value(ops::scale_up(arg_grid(a[0]), scalar(a[1])), t.grid);
                         })};
    });
    lib.add("most_common_color", [](const TypeSet& types) {
        const auto t = ArcTypes::resolve(types);
        return Primitive{.signature = {{t.grid}, t.color},
                         .fn = guarded([t](std::span<const Value> a) {
                             return color_value(ops::most_common_color(arg_grid(a[0])), t.color);
                         })};
    });
    lib.add("least_common_color", [](const TypeSet& types) {
        const auto t = ArcTypes::resolve(types);
        return Primitive{.signature = {{t.grid}, t.color},
                         .fn = guarded([t](std::span<const Value> a) {
                             return color_value(ops::least_common_color(arg_grid(a[0])), t.color);
                         })};
    });
    lib.add("detect_objects", [](const TypeSet& types) {
        const auto t = ArcTypes::resolve(types);
        return Primitive{.signature = {{t.grid}, t.objects},
                         .fn = guarded([t](std::span<const Value> a) {
                             return objects_value(ops::detect_objects(arg_grid(a[0])), t);
                         })};
    });
    lib.add("filter_symmetric", [](const TypeSet& types) {
        const auto t = ArcTypes::resolve(types);
        return Primitive{.signature = {{t.objects}, t.objects},
                         .fn = guarded([t](std::span<const Value> a) {
                             return objects_value(ops::filter_symmetric(arg_objects(a[0])), t);
                         })};
    });
    lib.add("largest_object", [](const TypeSet& types) {
        const auto t = ArcTypes::resolve(types);
        return Primitive{.signature = {{t.objects}, t.object},
                         .fn = guarded([t](std::span<const Value> a) {
                             return object_value(ops::largest_object(arg_objects(a[0])), t);
                         })};
    });
    lib.add("paint_object", [](const TypeSet& types) {
        const auto t = ArcTypes::resolve(types);
        return Primitive{.signature = {{t.grid, t.object}, t.grid},
                         .fn = guarded([t](std::span<const Value> a) {
                             return grid_value(ops::paint_object(arg_grid(a[0]), to_object(a[1])), t.grid);
                         })};
    });
    lib.add("replace_background", [](const TypeSet& types) {
        const auto t = ArcTypes::resolve(types);
        return Primitive{.signature = {{t.grid, t.color}, t.grid},
                         .fn = guarded([t](std::span<const Value> a) {
                             return grid_value(ops::replace_background(arg_grid(a[0]), scalar(a[1])), t.grid);
                         })};
    });
    return lib;
}

}  // namespace

const PrimitiveLibrary& library() {
    static const PrimitiveLibrary lib = build_library();
    return lib;
}

std::string default_manifest() {
    return R"({"name": "arc", "domain": "grid", "range": "grid", "primitives": "all"})";
}

FieldPtr make_field() { return load_field_manifest(default_manifest(), library()); }

}  // namespace ff::arc

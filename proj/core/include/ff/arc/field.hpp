#pragma once

#include <string>

#include "ff/arc/grid.hpp"
#include "ff/field.hpp"

namespace ff::arc {

// Type ids of the ARC kinds inside a particular type set.
struct ArcTypes {
    TypeId color;
    TypeId grid;
    TypeId int_type;
    TypeId int_pair;
    TypeId object;
    TypeId objects;

    static ArcTypes resolve(const TypeSet& types);
};

Value grid_value(const Grid& g, TypeId grid_type);
Value color_value(std::int32_t color, TypeId color_type);
Value int_value(std::int32_t v, TypeId int_type);
Value object_value(const Object& o, const ArcTypes& t);

// Throws type-mismatch when the value is not a rank-2 integer tensor.
Grid to_grid(const Value& v);
Object to_object(const Value& v);

// The compiled-in ARC primitive library (20 grid primitives plus the ARC
// types and kinds).
const PrimitiveLibrary& library();

// Manifest text for the stock ARC field: every library primitive.
std::string default_manifest();

// The stock ARC field built from default_manifest().
FieldPtr make_field();

}  // namespace ff::arc

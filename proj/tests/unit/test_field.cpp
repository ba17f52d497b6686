#include <doctest.h>

#include "ff/arc/field.hpp"
#include <fstream>
#include <sstream>

#include "ff/text.hpp"

using namespace ff;

namespace {

struct Arc {
    FieldPtr field = arc::make_field();
    arc::ArcTypes t = arc::ArcTypes::resolve(field->types());

    Value grid(const arc::Grid& g) const { return arc::grid_value(g, t.grid); }
    Code code(std::string_view text) const { return compile(text, field->fsl()); }
};

}  // namespace

TEST_SUITE("field") {

TEST_CASE("field-level core") {
    Arc a;
    SUBCASE("identity") {
        const auto tr = run_code(*a.field, a.grid({{5}}), a.code("identity_grid"));
        REQUIRE(tr.results.size() == 1);
        CHECK(tr.results[0].index == 0);
        CHECK(arc::to_grid(tr.results[0].value) == arc::Grid{{5}});
    }
    SUBCASE("recolor 1 to 2") {
        const auto tr = run_code(*a.field, a.grid({{1, 0}, {0, 1}}), a.code("const color 1\nconst color 2\nrecolor"));
        REQUIRE(tr.results.size() == 1);
        CHECK(tr.results[0].index == 2);
        CHECK(arc::to_grid(tr.results[0].value) == arc::Grid{{2, 0}, {0, 2}});
    }
    SUBCASE("hcf") {
        CHECK_FALSE(run_code(*a.field, a.grid({{1}}), a.code("hcf")).ok());
    }
}

TEST_CASE("snippet classification") {
    Arc a;
    const Value x = a.grid({{1, 2}});
    CHECK(is_snippet(*a.field, x, a.code("rotate_90\nmirror_vertical")));
    CHECK_FALSE(is_snippet(*a.field, x, a.code("rotate_90\nconst grid [[1]]")));
    CHECK_FALSE(is_snippet(*a.field, x, a.code("swap_top\nrotate_90")));
    CHECK_FALSE(is_snippet(*a.field, x, a.code("most_common_color")));
    CHECK_FALSE(is_snippet(*a.field, x, Code{}));
}

TEST_CASE("continuing from a stack state") {
    Arc a;
    const auto first = run_code(*a.field, a.grid({{1, 2}}), a.code("rotate_90"));
    const auto rest = run_from(*a.field, first.final_stack, a.code("rotate_90"));
    const auto whole = run_code(*a.field, a.grid({{1, 2}}), a.code("rotate_90\nrotate_90"));
    CHECK(rest.final_stack.entries == whole.final_stack.entries);
}

TEST_CASE("registry") {
    FieldRegistry reg;
    const auto id = reg.register_field(arc::make_field());
    CHECK(reg.find("arc") == reg.get(id));
    CHECK(reg.find("arc")->fsl().size() == 7 + 20);
    CHECK(reg.find("nope") == nullptr);
    try {
        reg.register_field(arc::make_field());
        FAIL("duplicate accepted");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DuplicateName);
    }
}

TEST_CASE("primitive registration errors") {
    Fsl fsl;
    const TypeId i = fsl.int_type();
    auto fn = [](std::span<const Value> a, const CallContext&) { return a[0]; };
    fsl.add(Primitive{.name = "id", .signature = {{i}, i}, .fn = fn});
    try {
        fsl.add(Primitive{.name = "id", .signature = {{i}, i}, .fn = fn});
        FAIL("duplicate accepted");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DuplicateName);
    }
    try {
        fsl.add(Primitive{.name = "ghost", .signature = {{TypeId{999}}, i}, .fn = fn});
        FAIL("unknown type accepted");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::UnknownType);
    }
}

TEST_CASE("field manifests") {
    const auto& lib = arc::library();
    auto small = load_field_manifest(R"({"name": "mini", "domain": "grid", "range": "grid",
        "primitives": ["rotate_90", "mirror_horizontal"], "limits": {"max_steps": 64}})", lib);
    CHECK(small->name() == "mini");
    CHECK(small->limits().max_steps == 64);
    CHECK(small->fsl().find("rotate_90").has_value());
    CHECK_FALSE(small->fsl().find("transpose").has_value());

    auto err = [&](std::string_view text) {
        try {
            load_field_manifest(text, lib);
        } catch (const Error& e) {
            return e.code();
        }
        return ErrorCode::None;
    };
    CHECK(err("{") == ErrorCode::ParseError);
    CHECK(err(R"({"name": "m", "domain": "grid", "range": "grid", "primitives": ["warp"]})") == ErrorCode::UnknownPrimitive);
    CHECK(err(R"({"name": "m", "domain": "blob", "range": "grid", "primitives": "all"})") == ErrorCode::UnknownType);
    CHECK(err(R"({"name": "m", "domain": "grid", "range": "grid", "primitives": ["most_common_color"]})") ==
          ErrorCode::InvalidArgument);
}

TEST_CASE("the shipped field manifest matches the stock field") {
    std::ifstream in(std::string(FF_TEST_DATA_DIR) + "/fields/arc.json");
    REQUIRE(in);
    std::stringstream s;
    s << in.rdbuf();
    auto f = load_field_manifest(s.str(), arc::library());
    CHECK(f->fsl().size() == arc::make_field()->fsl().size());
}

}

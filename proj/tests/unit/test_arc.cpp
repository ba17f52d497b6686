#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "ff/arc/field.hpp"
#include "ff/arc/relation.hpp"
#include "ff/arc/task.hpp"
#include "ff/text.hpp"
#include "properties.hpp"

using namespace ff;
using namespace ff::arc;

namespace {

ErrorCode parse_error(std::string_view text) {
    try {
        parse_task(text, "t");
    } catch (const Error& e) {
        return e.code();
    }
    return ErrorCode::None;
}

Grid apply(const Code& code, const Grid& g, const FormalField& field) {
    const auto t = ArcTypes::resolve(field.types());
    const auto tr = run_code(field, grid_value(g, t.grid), code);
    REQUIRE(tr.ok());
    REQUIRE_FALSE(tr.results.empty());
    return to_grid(tr.results.back().value);
}

// Every map from the colors present in yhat onto 0-9 that carries yhat to y.
std::vector<ColorMap> brute_force_maps(const Grid& yhat, const Grid& y) {
    std::vector<std::int32_t> present;
    for (auto c : yhat.cells)
        if (std::find(present.begin(), present.end(), c) == present.end()) present.push_back(c);
    std::vector<ColorMap> out;
    std::size_t total = 1;
    for (std::size_t i = 0; i < present.size(); ++i) total *= kColors;
    for (std::size_t code = 0; code < total; ++code) {
        ColorMap m;
        m.fill(-1);
        std::size_t rest = code;
        for (auto c : present) {
            m[c] = static_cast<std::int32_t>(rest % kColors);
            rest /= kColors;
        }
        bool ok = true;
        for (std::size_t i = 0; i < yhat.cells.size() && ok; ++i) ok = m[yhat.cells[i]] == y.cells[i];
        if (ok) out.push_back(m);
    }
    return out;
}

}  // namespace

TEST_SUITE("arc-domain") {

TEST_CASE("primitive examples") {
    CHECK(ops::rotate_90(Grid{{1, 2}, {3, 4}}) == Grid{{3, 1}, {4, 2}});
    CHECK(ops::mirror_horizontal(Grid{{1, 2}, {3, 4}}) == Grid{{2, 1}, {4, 3}});
    CHECK(ops::mirror_vertical(Grid{{1, 2}, {3, 4}}) == Grid{{3, 4}, {1, 2}});
    CHECK(ops::transpose(Grid{{1, 2, 3}}) == Grid{{1}, {2}, {3}});
    CHECK(ops::crop_to_content(Grid{{0, 0, 0}, {0, 3, 0}, {0, 0, 0}}) == Grid{{3}});
    CHECK(ops::tile(Grid{{1, 2}}, 2, 1) == Grid{{1, 2, 1, 2}});
    CHECK(ops::scale_up(Grid{{1, 2}}, 2) == Grid{{1, 1, 2, 2}, {1, 1, 2, 2}});
    CHECK(ops::pad_to(Grid{{1}}, 2, 2, 7) == Grid{{1, 7}, {7, 7}});
    CHECK(ops::most_common_color(Grid{{1, 2, 2}}) == 2);
    CHECK(ops::least_common_color(Grid{{1, 2, 2}}) == 1);
    CHECK(ops::replace_background(Grid{{0, 1}, {0, 0}}, 5) == Grid{{5, 1}, {5, 5}});
    CHECK(ops::recolor_all(Grid{{0, 1}, {2, 0}}, 4) == Grid{{0, 4}, {4, 0}});
    std::mt19937_64 rng(3);
    for (int i = 0; i < 50; ++i) {
        const Grid g = testing::random_grid(rng, 10, 10);
        CHECK(ops::recolor(g, 5, 5) == g);
    }
}

TEST_CASE("objects") {
    const Grid g{{0, 1, 0, 2}, {0, 1, 0, 2}, {0, 0, 0, 2}, {3, 0, 0, 0}};
    const auto objects = ops::detect_objects(g);
    REQUIRE(objects.size() == 3);
    const auto big = ops::largest_object(objects);
    CHECK(big.color == 2);
    CHECK(big.row == 0);
    CHECK(big.col == 3);
    CHECK(big.mask == Grid{{1}, {1}, {1}});
    CHECK(ops::paint_object(Grid(4, 4, 0), big) == Grid{{0, 0, 0, 2}, {0, 0, 0, 2}, {0, 0, 0, 2}, {0, 0, 0, 0}});
    CHECK(ops::filter_symmetric(objects).size() == 3);
    const Grid tl{{1, 1, 1, 0}, {0, 1, 0, 0}, {0, 0, 0, 2}, {0, 0, 2, 2}};
    const auto sym = ops::filter_symmetric(ops::detect_objects(tl));  // the T survives, the L does not
    REQUIRE(sym.size() == 1);
    CHECK(sym[0].color == 1);
    CHECK_THROWS_AS(ops::largest_object({}), Hcf);
}

TEST_CASE("bounds fire hcf") {
    const Grid wide(16, 30, 1);
    CHECK_THROWS_AS(ops::tile(wide, 2, 1), Hcf);
    CHECK_THROWS_AS(ops::scale_up(Grid(20, 20, 1), 2), Hcf);
    CHECK_THROWS_AS(ops::crop_to_content(Grid(3, 3, 0)), Hcf);
    CHECK_THROWS_AS(ops::recolor(Grid(1, 1, 0), 0, 10), Hcf);
    CHECK_THROWS_AS(ops::pad_to(Grid(3, 3, 0), 2, 2, 0), Hcf);

    auto field = make_field();
    const auto t = ArcTypes::resolve(field->types());
    const auto tr = run_code(*field, grid_value(wide, t.grid), compile("const int 2\nconst int 1\ntile", field->fsl()));
    CHECK_FALSE(tr.ok());
    CHECK(tr.error_at == 2);
}

TEST_CASE("algebra on random grids") {
    const auto rep = testing::grid_algebra(2000, 5);
    for (const auto& m : rep.messages) MESSAGE(m);
    CHECK(rep.failures == 0);
}

TEST_CASE("task documents") {
    const auto task = parse_task(R"({"train":[{"input":[[1]],"output":[[2]]}],"test":[{"input":[[1]]}]})", "mini");
    CHECK(task.train.size() == 1);
    CHECK(task.test.size() == 1);
    CHECK_FALSE(task.test[0].output.has_value());
    CHECK(parse_task(task_to_json(task), "mini").train[0].output == task.train[0].output);

    CHECK(parse_error(R"({"train":[{"input":[[10]],"output":[[2]]}],"test":[{"input":[[1]]}]})") == ErrorCode::InvalidColor);
    std::string wide = "[[0";
    for (int i = 0; i < 30; ++i) wide += ",0";
    wide += "]]";
    CHECK(parse_error(R"({"train":[{"input":)" + wide + R"(,"output":[[2]]}],"test":[{"input":[[1]]}]})") ==
          ErrorCode::InvalidDimensions);
    CHECK(parse_error(R"({"train":[{"input":[[1],[1,2]],"output":[[2]]}],"test":[{"input":[[1]]}]})") ==
          ErrorCode::InvalidDimensions);
    CHECK(parse_error(R"({"train":[],"test":[{"input":[[1]]}]})") == ErrorCode::ParseError);
    CHECK(parse_error(R"({"train":[{"input":[[1]]}],"test":[{"input":[[1]]}]})") == ErrorCode::ParseError);
    CHECK(parse_error("not json") == ErrorCode::ParseError);
    try {
        load_task("/nonexistent/task.json");
        FAIL("missing file accepted");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::MissingFile);
    }
}

TEST_CASE("shipped tasks load and expose example ids") {
    const auto files = task_files(testing::data_dir() / "easy" / "tasks");
    CHECK(files.size() == 10);
    const auto task = load_task(files.front());
    CHECK(task.id == "easy_01");
    auto field = make_field();
    const auto ex = train_examples(task, *field);
    CHECK(ex.at(0).id == "easy_01:train:0");
    const auto resolve = task_resolver({task}, field);
    CHECK(resolve("easy_01:train:1").input == ex.at(1).input);
    CHECK_THROWS_AS(resolve("easy_01:train:99"), Error);
    const auto dir = directory_resolver(testing::data_dir() / "easy" / "tasks", field);
    CHECK(dir("easy_02:test:0").id == "easy_02:test:0");
}

TEST_CASE("patch suggestion") {
    auto field = make_field();
    SUBCASE("all ones to all fours") {
        const Grid a(3, 3, 1), b(3, 3, 4);
        const auto maps = brute_force_maps(a, b);
        REQUIRE(maps.size() == 1);
        CHECK(maps[0][1] == 4);
        const auto item = suggest_patch(a, b, *field);
        REQUIRE(item);
        CHECK(decompile(item->opcodes, field->fsl()) == "const color 1\nconst color 4\nrecolor");
        CHECK(item->origin == ItemOrigin::Allele);
        CHECK(apply(item->opcodes, a, *field) == b);
    }
    SUBCASE("equal grids") { CHECK_FALSE(suggest_patch(Grid{{1, 2}}, Grid{{1, 2}}, *field)); }
    SUBCASE("structure differs") {
        const Grid a{{1, 2}, {1, 2}}, b{{1, 2}, {2, 1}};
        CHECK(brute_force_maps(a, b).empty());
        CHECK_FALSE(suggest_patch(a, b, *field));
    }
    SUBCASE("swap needs a parking color") {
        const Grid a{{1, 2}}, b{{2, 1}};
        const auto item = suggest_patch(a, b, *field);
        REQUIRE(item);
        CHECK(item->opcodes.size() == 9);
        CHECK(apply(item->opcodes, a, *field) == b);
    }
    SUBCASE("shape mismatch") {
        try {
            suggest_patch(Grid{{1}}, Grid{{1, 1}}, *field);
            FAIL("expected shape mismatch");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::ShapeMismatch);
        }
    }
    SUBCASE("random pairs agree with exhaustive enumeration") {
        std::mt19937_64 rng(17);
        for (int i = 0; i < 300; ++i) {
            const Grid a = testing::random_grid(rng, 4, 3);
            Grid b = a;
            if (i % 3 == 0) {
                b = testing::random_grid(rng, 1, 10);
                b = Grid(a.height, a.width, b.cells[0]);
                b.cells[0] = static_cast<std::int32_t>(rng() % 10);
            } else {
                std::array<std::int32_t, kColors> perm;
                for (int c = 0; c < kColors; ++c) perm[c] = static_cast<std::int32_t>(rng() % 10);
                for (auto& c : b.cells) c = perm[c];
            }
            const auto maps = brute_force_maps(a, b);
            REQUIRE(maps.size() <= 1);
            const auto sigma = find_color_map(std::span(&a, 1), std::span(&b, 1));
            CHECK(sigma.has_value() == (maps.size() == 1));
            if (!sigma) {
                CHECK_FALSE(suggest_patch(a, b, *field));
                continue;
            }
            for (auto c : a.cells) CHECK((*sigma)[c] == maps[0][c]);
            const auto item = suggest_patch(a, b, *field);
            if (item) {
                CHECK(item->opcodes.size() <= 9);
                CHECK(apply(item->opcodes, a, *field) == b);
            } else {
                int moved = 0;
                for (int c = 0; c < kColors; ++c) moved += (*sigma)[c] >= 0 && (*sigma)[c] != c;
                CHECK((a == b || moved >= 3));
            }
        }
    }
}

TEST_CASE("relation construction") {
    std::vector<ArcTask> tasks;
    for (const auto& f : task_files(testing::data_dir() / "seed" / "tasks")) tasks.push_back(load_task(f));
    const auto rel = build_arc_relation(tasks, testing::data_dir() / "seed" / "codebase.txt", std::nullopt);
    CHECK(rel.reward.kind() == RewardModel::Kind::HandcraftedLinear);
    CHECK(rel.codebase->size() == 48);
    CHECK(rel.patch);

    const auto dir = std::filesystem::temp_directory_path() / "ff_relation_test";
    std::filesystem::create_directories(dir);
    {
        std::ofstream out(dir / "other.txt");
        out << "entry other seed_01_flip:train:0 handcrafted\nmirror_horizontal\nend\n";
    }
    try {
        build_arc_relation(tasks, dir / "other.txt", std::nullopt);
        FAIL("field mismatch accepted");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::FieldMismatch);
    }
    try {
        build_arc_relation(tasks, dir / "absent.txt", std::nullopt);
        FAIL("missing codebase accepted");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::MissingFile);
    }
    std::filesystem::remove_all(dir);
}

}

#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "ff/arc/field.hpp"
#include "ff/arc/relation.hpp"
#include "ff/search.hpp"
#include "ff/text.hpp"
#include "properties.hpp"

using namespace ff;

namespace {

testing::SearchFixture fixture(const char* task) {
    return testing::search_fixture(testing::data_dir() / "easy" / "tasks" / (std::string(task) + ".json"));
}

// Hand-picked item base over the ARC field.
std::shared_ptr<const ItemBase> items_of(const FormalField& field, const std::vector<std::string>& texts) {
    auto base = std::make_shared<ItemBase>();
    for (const auto& t : texts) {
        CodeItem item = make_item(compile(t, field.fsl()), field.fsl());
        item.prior = 0.5;
        base->add(std::move(item));
    }
    return base;
}

std::vector<Example> rotate_examples(const FormalField& field) {
    const auto t = arc::ArcTypes::resolve(field.types());
    std::vector<Example> ex;
    const std::vector<arc::Grid> ins{{{1, 2}, {3, 4}}, {{0, 5, 5}}, {{7}, {8}}};
    for (std::size_t i = 0; i < ins.size(); ++i)
        ex.push_back({"r:" + std::to_string(i), arc::grid_value(ins[i], t.grid), arc::grid_value(arc::ops::rotate_90(ins[i]), t.grid)});
    return ex;
}

FormalRelation plain_relation(FieldPtr field) {
    FormalRelation rel;
    rel.field = std::move(field);
    return rel;
}

}  // namespace

TEST_SUITE("search") {

TEST_CASE("ucb values") {
    SearchConfig c;
    c.f = 0.5;
    c.g = 1;
    c.h = 1;
    CHECK(ucb_score(0.5, 0, 0, 10, c) == doctest::Approx(0.5 * (1 + std::log(21.0)) * std::sqrt(10.0)));
    CHECK(ucb_score(0.5, 0, 0, 10, c) == doctest::Approx(6.3949).epsilon(1e-4));
    CHECK(ucb_score(0.9, 0, 0, 0, c) == 0.0);
    CHECK(ucb_score(0.9, 2, 1, 0, c) == doctest::Approx(0.5));
    SearchConfig d;
    d.f = 1;
    d.g = 1;
    d.h = 0;
    CHECK(ucb_score(1, 4, 2, 4, d) == doctest::Approx(std::log(5.0) * 2 / 5 + 0.5));
    CHECK(ucb_score(1, 4, 2, 4, d) == doctest::Approx(1.1438).epsilon(1e-4));
}

TEST_CASE("ucb matches a straight-line evaluation") {
    const auto rep = testing::ucb_oracle(10000, 21);
    for (const auto& m : rep.messages) MESSAGE(m);
    CHECK(rep.cases == 10000);
    CHECK(rep.failures == 0);
}

TEST_CASE("config validation") {
    auto bad = [](auto mutate) {
        SearchConfig c;
        mutate(c);
        try {
            validate(c);
        } catch (const Error& e) {
            return e.code() == ErrorCode::InvalidArgument;
        }
        return false;
    };
    CHECK(bad([](SearchConfig& c) { c.f = 0; }));
    CHECK(bad([](SearchConfig& c) { c.discount = 0; }));
    CHECK(bad([](SearchConfig& c) { c.discount = 1.5; }));
    CHECK(bad([](SearchConfig& c) { c.width = 0; }));
    CHECK(bad([](SearchConfig& c) { c.max_depth = 0; }));
    CHECK_NOTHROW(validate(SearchConfig{}));
}

TEST_CASE("selection") {
    SearchConfig c;
    SUBCASE("fresh tree") {
        SearchTree t;
        CHECK(select(t, c) == std::vector<NodeId>{0});
    }
    SUBCASE("prior dominance") {
        SearchTree t;
        t[0].expanded = true;
        const NodeId a = t.add_child(0, 0, 0.1);
        const NodeId b = t.add_child(0, 1, 0.9);
        backpropagate(t, a, 0.5, c);
        backpropagate(t, b, 0.5, c);
        CHECK(select(t, c) == std::vector<NodeId>{0, b});
        t[b].closed = true;
        CHECK(select(t, c) == std::vector<NodeId>{0, a});
    }
    SUBCASE("ties go to the lower id") {
        SearchTree t;
        t[0].expanded = true;
        t.add_child(0, 0, 0.5);
        t.add_child(0, 1, 0.5);
        CHECK(select(t, c).back() == 1);
    }
    SUBCASE("replayed against the formula") {
        SearchConfig big = c;
        big.h = 5.0;
        SearchTree t;
        t[0].expanded = true;
        const NodeId a = t.add_child(0, 0, 0.5);
        const NodeId b = t.add_child(0, 1, 0.5);
        t[a].n = 100;
        t[a].r = 10;
        t[b].n = 1;
        t[b].r = 1;
        t[0].n = 101;
        int picked_b = 0;
        for (int step = 0; step < 200; ++step) {
            const auto& A = t[a];
            const auto& B = t[b];
            const double n0 = static_cast<double>(t[0].n);
            const double sa = testing::ucb_reference(A.u, static_cast<double>(A.n), A.r, n0, big.f, big.g, big.h);
            const double sb = testing::ucb_reference(B.u, static_cast<double>(B.n), B.r, n0, big.f, big.g, big.h);
            const NodeId want = sb > sa ? b : a;
            const auto path = select(t, big);
            REQUIRE(path.size() == 2);
            CHECK(path[1] == want);
            picked_b += path[1] == b;
            backpropagate(t, path[1], 0.1, big);
        }
        CHECK(picked_b > 0);
        CHECK(picked_b < 200);
    }
    SUBCASE("depth limit stops descent") {
        SearchConfig shallow = c;
        shallow.max_depth = 1;
        SearchTree t;
        t[0].expanded = true;
        const NodeId a = t.add_child(0, 0, 0.5);
        t[a].expanded = true;
        t.add_child(a, 1, 0.5);
        backpropagate(t, a, 0.1, shallow);
        CHECK(select(t, shallow) == std::vector<NodeId>{0, a});
    }
}

TEST_CASE("backpropagation") {
    SearchConfig c;
    SearchTree t;
    NodeId at = 0;
    for (int d = 0; d < 4; ++d) at = t.add_child(at, 0, 1.0);
    backpropagate(t, at, 1.0, c);
    CHECK(t[0].r == doctest::Approx(std::pow(0.95, 4)).epsilon(1e-12));
    CHECK(t[0].r == doctest::Approx(0.8145).epsilon(1e-4));
    CHECK(t[at].r == 1.0);
    for (NodeId id : t.path(at)) CHECK(t[id].n == 1);

    SearchConfig flat = c;
    flat.discount = 1.0;
    SearchTree u;
    NodeId leaf = 0;
    for (int d = 0; d < 3; ++d) leaf = u.add_child(leaf, 0, 1.0);
    backpropagate(u, leaf, 0.7, flat);
    for (NodeId id : u.path(leaf)) CHECK(u[id].r == 0.7);
    backpropagate(u, leaf, 0.0, flat);
    CHECK(u[0].n == 2);
    CHECK(u[0].r == 0.7);
}

TEST_CASE("equal rewards lose weight geometrically with depth") {
    const auto rep = testing::regularization(0.95);
    for (const auto& m : rep.messages) MESSAGE(m);
    CHECK(rep.cases == 8);
    CHECK(rep.failures == 0);
}

TEST_CASE("expansion") {
    auto field = arc::make_field();
    const auto ex = rotate_examples(*field);
    SearchConfig c;
    c.patch = false;
    SUBCASE("items failing everywhere are discarded") {
        SearchEngine e(plain_relation(field), items_of(*field, {"hcf\nrotate_90", "const int 40\nscale_up"}), ex, c);
        CHECK(e.expand(0).empty());
        CHECK(e.tree()[0].closed);
        CHECK(e.done());
    }
    SUBCASE("a solving item becomes a closed solution child") {
        SearchEngine e(plain_relation(field), items_of(*field, {"mirror_vertical", "rotate_90"}), ex, c);
        const auto kids = e.expand(0);
        CHECK(kids.size() == 2);
        int solutions = 0;
        for (NodeId k : kids) {
            CHECK(e.tree()[k].n == 1);
            if (e.tree()[k].solution) {
                ++solutions;
                CHECK(e.tree()[k].closed);
                CHECK(e.tree()[k].reward == 1.0);
                CHECK(decompile(e.snippet(k), field->fsl()) == "rotate_90");
            }
        }
        CHECK(solutions == 1);
        CHECK(e.tree()[0].n == 2);
    }
    SUBCASE("width caps the children") {
        SearchConfig narrow = c;
        narrow.width = 3;
        SearchEngine e(plain_relation(field),
                       items_of(*field, {"mirror_vertical", "mirror_horizontal", "rotate_90", "rotate_180", "rotate_270", "transpose",
                                         "identity_grid", "crop_to_content", "const int 2\nscale_up", "const color 1\nrecolor_all"}),
                       ex, narrow);
        CHECK(e.expand(0).size() <= 3);
    }
    SUBCASE("duplicate states are pruned") {
        SearchEngine e(plain_relation(field), items_of(*field, {"identity_grid", "rotate_180\nrotate_180", "mirror_vertical"}), ex, c);
        const auto kids = e.expand(0);
        CHECK(kids.size() == 1);  // both identities reproduce the root state
    }
}

TEST_CASE("engine runs") {
    auto field = arc::make_field();
    const auto ex = rotate_examples(*field);
    SUBCASE("single solving item") {
        SearchConfig c;
        const auto out = run_search(plain_relation(field), ex, items_of(*field, {"rotate_90"}), c, "rot");
        REQUIRE(out.solved());
        CHECK(out.iterations == 1);
        CHECK(out.solutions[0].exact == std::vector<double>{1, 1, 1});
    }
    SUBCASE("zero budget") {
        SearchConfig c;
        c.node_budget = 0;
        const auto out = run_search(plain_relation(field), ex, items_of(*field, {"rotate_90"}), c, "rot");
        CHECK_FALSE(out.solved());
        CHECK(out.nodes_expanded == 0);
        CHECK(out.iterations == 0);
    }
    SUBCASE("two-item composition") {
        SearchConfig c;
        const auto out = run_search(plain_relation(field), ex, items_of(*field, {"mirror_horizontal", "transpose", "rotate_180"}), c);
        REQUIRE(out.solved());
        CHECK(verify_solution(*field, ex, out.solutions[0].snippet));
    }
}

TEST_CASE("easy task search is deterministic and sound") {
    auto fx = fixture("easy_02");
    SearchConfig c;
    c.node_budget = 2000;
    c.seed = 4;
    const auto a = run_search(fx.relation, fx.examples, fx.items, c, fx.task.id);
    const auto b = run_search(fx.relation, fx.examples, fx.items, c, fx.task.id);
    CHECK(format_report(a, *fx.field, false) == format_report(b, *fx.field, false));
    CHECK(a.solved());
    for (const auto& s : a.solutions) CHECK(verify_solution(*fx.field, fx.examples, s.snippet));
    CHECK(format_report(a, *fx.field, false).find("wall_time_ms") == std::string::npos);
}

TEST_CASE("cached states agree with recomputation") {
    auto fx = fixture("easy_05");
    SearchConfig c;
    c.node_budget = 400;
    SearchEngine e(fx.relation, fx.items, fx.examples, c, fx.task.id);
    e.run();
    REQUIRE(e.nodes_created() >= 400);
    for (NodeId id = 0; id < e.tree().size(); id += 7) CHECK(*e.state(id) == e.recompute_state(id));
    for (NodeId id = 1; id < e.tree().size(); ++id) {
        const auto& n = e.tree()[id];
        CHECK(n.n >= 1);
        CHECK(n.depth == e.tree()[n.parent].depth + 1);
        CHECK(n.depth <= c.max_depth);
    }
}

TEST_CASE("save and restore") {
    auto fx = fixture("easy_05");
    SearchConfig c;
    c.max_solutions = 1000;
    c.node_budget = 1000;
    SearchEngine straight(fx.relation, fx.items, fx.examples, c, fx.task.id);
    straight.run();

    SearchConfig half = c;
    half.node_budget = 500;
    SearchEngine first(fx.relation, fx.items, fx.examples, half, fx.task.id);
    first.run();
    const std::string bytes = first.save_bytes();
    auto resumed = SearchEngine::restore_bytes(bytes, fx.relation, fx.items, fx.examples, fx.task.id);
    CHECK(resumed.tree() == first.tree());
    CHECK(resumed.iterations() == first.iterations());
    resumed.set_node_budget(1000);
    resumed.run();
    CHECK(resumed.tree() == straight.tree());
    CHECK(format_report(resumed.outcome(), *fx.field, false) == format_report(straight.outcome(), *fx.field, false));

    const auto path = std::filesystem::temp_directory_path() / "ff_state_test.bin";
    first.save(path);
    CHECK(SearchEngine::restore(path, fx.relation, fx.items, fx.examples, fx.task.id).tree() == first.tree());
    std::filesystem::remove(path);

    auto code_of = [&](std::string b, const std::shared_ptr<const ItemBase>& items) {
        try {
            SearchEngine::restore_bytes(b, fx.relation, items, fx.examples, fx.task.id);
        } catch (const Error& e) {
            return e.code();
        }
        return ErrorCode::None;
    };
    CHECK(code_of(bytes.substr(0, bytes.size() / 2), fx.items) == ErrorCode::CorruptFile);
    CHECK(code_of(bytes.substr(0, 10), fx.items) == ErrorCode::CorruptFile);
    std::string flipped = bytes;
    flipped[bytes.size() / 2] ^= 0x20;
    CHECK(code_of(flipped, fx.items) == ErrorCode::CorruptFile);
    std::string version = bytes;
    version[4] = 9;
    CHECK(code_of(version, fx.items) == ErrorCode::VersionMismatch);
    auto other = items_of(*fx.field, {"rotate_90"});
    CHECK(code_of(bytes, other) == ErrorCode::InvalidArgument);
    try {
        SearchEngine::restore("/nonexistent/state.bin", fx.relation, fx.items, fx.examples);
        FAIL("missing state accepted");
    } catch (const Error& e) {
        CHECK((e.code() == ErrorCode::MissingFile || e.code() == ErrorCode::IoError));
    }
}

}

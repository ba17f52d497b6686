#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "ff/arc/field.hpp"
#include "ff/arc/task.hpp"
#include "ff/text.hpp"
#include "properties.hpp"

using namespace ff;

namespace {

// Integer toy field: X = Y = num, plus an auxiliary tag type.
struct Toy {
    FieldPtr field;
    TypeId num, tag;

    explicit Toy(const std::vector<std::string>& prims) {
        Fsl fsl;
        num = fsl.types().add_tensor("num", Element::Integer, std::vector<int>{}, fsl.types().require("int_tensor"));
        tag = fsl.types().add_tensor("tag", Element::Integer, std::vector<int>{}, fsl.types().require("int_tensor"));
        for (const auto& name : prims) fsl.add(make(name));
        auto f = std::make_shared<FormalField>("toy", std::move(fsl), Kind{"num", num, ""}, Kind{"num", num, ""});
        field = f;
    }

    Primitive make(const std::string& name) const {
        // name -> signature; bodies add a per-name offset to the argument sum
        std::vector<TypeId> args{num};
        TypeId ret = num;
        if (name.starts_with("to_tag")) ret = tag;
        if (name.starts_with("from_tag")) args = {tag};
        if (name == "add" || name == "mul") args = {num, num};
        if (name == "add_tag") args = {num, tag};
        const std::int32_t offset = static_cast<std::int32_t>(name.size());
        return Primitive{.name = name, .signature = {args, ret},
                         .fn = [ret, offset](std::span<const Value> a, const CallContext&) {
                             std::int32_t s = offset;
                             for (const auto& v : a) s += v.as_tensor().ints()[0];
                             return Value::tensor(ret, Tensor{{}, std::vector<std::int32_t>{s % 1000}});
                         }};
    }

    Value n(std::int32_t v) const { return Value::tensor(num, Tensor{{}, std::vector<std::int32_t>{v}}); }
    Code code(std::string_view text) const { return compile(text, field->fsl()); }

    Example example(std::string id, std::int32_t x, std::string_view snippet) const {
        const auto tr = run_code(*field, n(x), code(snippet));
        REQUIRE(tr.ok());
        return Example{std::move(id), n(x), tr.results.back().value};
    }

    void add(Codebase& cb, const std::string& id, std::string_view snippet, std::int32_t x = 1) const {
        cb.add(CodebaseEntry{code(snippet), id}, example(id, x, snippet));
    }
};

std::vector<std::string> texts(const std::vector<CodeItem>& items, const Fsl& fsl) {
    std::vector<std::string> out;
    for (const auto& i : items) out.push_back(decompile(i.opcodes, fsl) + "\n");
    return out;
}

}  // namespace

TEST_SUITE("codebase") {

TEST_CASE("splitting cuts after every range result") {
    Toy toy({"inc", "dec", "to_tag", "from_tag", "add_tag"});
    const auto items = split_snippet(*toy.field, toy.n(1), toy.code("inc\ndec"));
    CHECK(texts(items, toy.field->fsl()) == std::vector<std::string>{"inc\n", "dec\n"});

    auto arc_field = arc::make_field();
    const auto t = arc::ArcTypes::resolve(arc_field->types());
    const Value x = arc::grid_value({{0, 1}, {0, 2}}, t.grid);
    CHECK(split_snippet(*arc_field, x, compile("const color 2\nrecolor_all", arc_field->fsl())).size() == 1);
    const Code tuple_code = compile("detect_objects\nlargest_object\nsplit_tuple\ndrop_top\ndrop_top\nrotate_90", arc_field->fsl());
    const auto tr = run_code(*arc_field, x, tuple_code);
    REQUIRE(tr.results.size() == 1);
    CHECK(tr.results[0].index == 5);
    const auto one = split_snippet(*arc_field, x, tuple_code);
    REQUIRE(one.size() == 1);
    CHECK(one[0].opcodes == tuple_code);
}

TEST_CASE("seed codebase splits round trip") {
    auto field = arc::make_field();
    const auto cb = testing::seed_codebase(field);
    REQUIRE(cb->size() == 48);
    for (std::size_t i = 0; i < cb->size(); ++i) {
        const auto& snippet = cb->entry(i).snippet;
        const auto items = split_snippet(*field, cb->example_of(i).input, snippet);
        Code joined;
        StackState state{{cb->example_of(i).input}, 0};
        for (const auto& item : items) {
            joined.insert(joined.end(), item.opcodes.begin(), item.opcodes.end());
            CHECK(satisfies_final_opcode_rule(item.opcodes, field->fsl(), field->range().type));
            const auto tr = run_from(*field, state, item.opcodes);
            REQUIRE(tr.ok());
            REQUIRE(tr.results.size() == 1);
            CHECK(tr.results[0].index + 1 == item.opcodes.size());
            state = tr.final_stack;
        }
        CHECK(joined == snippet);
    }
}

TEST_CASE("forms") {
    auto field = arc::make_field();
    const Fsl& fsl = field->fsl();
    const auto f1 = make_form(compile("const color 1\nrecolor_all", fsl), fsl);
    const auto f2 = make_form(compile("const color 7\nrecolor_all", fsl), fsl);
    const auto f3 = make_form(compile("const color 7\nreplace_background", fsl), fsl);
    CHECK(f1 == f2);
    CHECK(f1 == f3);  // same argument and return types
    CHECK_FALSE(f1 == make_form(compile("rotate_90", fsl), fsl));
    CHECK(make_form(compile("swap_top", fsl), fsl).steps[0].stack_effect >= 0);
}

TEST_CASE("alleles") {
    auto field = arc::make_field();
    const Fsl& fsl = field->fsl();
    const auto t = arc::ArcTypes::resolve(field->types());
    const CodeItem item = make_item(compile("const color 1\nrecolor_all", fsl), fsl);
    ConstantPool pool;
    for (int c : {1, 2, 4, 2}) pool.observe(arc::color_value(c, t.color));
    const auto alleles = make_alleles(item, pool);
    CHECK(texts(alleles, fsl) == std::vector<std::string>{"const color 2\nrecolor_all\n", "const color 4\nrecolor_all\n"});
    for (const auto& a : alleles) CHECK(a.form == item.form);
    CHECK(make_alleles(make_item(compile("rotate_90", fsl), fsl), pool).empty());
    ConstantPool single;
    single.observe(arc::color_value(1, t.color));
    CHECK(make_alleles(item, single).empty());
}

TEST_CASE("substitution") {
    auto field = arc::make_field();
    const Fsl& fsl = field->fsl();
    const auto subs = texts(mutate_substitute(make_item(compile("mirror_horizontal", fsl), fsl), fsl), fsl);
    CHECK(std::find(subs.begin(), subs.end(), "mirror_vertical\n") != subs.end());
    CHECK(subs.size() == 7);  // the other grid -> grid primitives

    Toy unique({"inc", "to_tag", "from_tag"});
    CHECK(mutate_substitute(make_item(unique.code("inc"), unique.field->fsl()), unique.field->fsl()).empty());

    // to_tag has 2 same-signature alternatives, from_tag has 3
    Toy counting({"to_tag", "to_tag2", "to_tag3", "from_tag", "from_tag2", "from_tag3", "from_tag4", "inc"});
    const Fsl& cf = counting.field->fsl();
    const CodeItem pair = make_item(counting.code("to_tag\nfrom_tag"), cf);
    const auto muts = mutate_substitute(pair, cf);
    std::size_t oracle = 0;
    for (const auto& op : pair.opcodes) {
        for (const auto& p : cf.primitives())
            oracle += !p.is_stack_op() && p.signature == cf.get(op.primitive).signature && p.name != cf.get(op.primitive).name;
    }
    CHECK(oracle == 5);
    CHECK(muts.size() == oracle);
    for (const auto& m : muts) {
        CHECK(m.form == pair.form);
        CHECK(m.origin == ItemOrigin::Substitution);
    }
}

TEST_CASE("deletion and insertion") {
    Toy toy({"inc", "dec", "to_tag", "add_tag"});
    const Fsl& fsl = toy.field->fsl();
    CHECK(mutate_delete(make_item(toy.code("inc"), fsl), fsl).empty());
    const auto del = texts(mutate_delete(make_item(toy.code("to_tag\nadd_tag"), fsl), fsl), fsl);
    CHECK(del == std::vector<std::string>{"add_tag\n"});

    // 6 shufflers + inc, dec, to_tag, add_tag are candidates; only the
    // shufflers and to_tag keep add_tag the sole range result, at 2 positions.
    const CodeItem item = make_item(toy.code("to_tag\nadd_tag"), fsl);
    const auto cands = insertion_candidates(item, fsl);
    CHECK(cands.size() == 10);
    const auto ins = mutate_insert(item, fsl, toy.num);
    CHECK(ins.size() <= 2 * cands.size());
    CHECK(ins.size() == 14);
    for (const auto& m : ins) CHECK(satisfies_final_opcode_rule(m.opcodes, fsl, toy.num));
}

TEST_CASE("priors") {
    Toy toy({"inc", "dec", "neg"});
    Codebase cb(toy.field);
    for (int i = 0; i < 10; ++i) toy.add(cb, "ex" + std::to_string(i), i < 3 ? "inc\ndec" : "dec\ndec", i);
    const Fsl& fsl = toy.field->fsl();
    const PriorFunction u(cb);
    CodeItem inc = make_item(toy.code("inc"), fsl);
    inc.prior = u(inc);
    CHECK(inc.prior == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(u(make_item(toy.code("dec"), fsl)) == doctest::Approx(1.0));
    auto subs = mutate_substitute(inc, fsl);
    REQUIRE_FALSE(subs.empty());
    CHECK(u(subs[0]) == doctest::Approx(0.15).epsilon(1e-12));
    CHECK(u(make_item(toy.code("neg"), fsl)) == doctest::Approx(0.01));
    CodeItem deep = subs[0];
    deep.parent_prior = 0.001;
    CHECK(u(deep) == doctest::Approx(0.01));
    CHECK(compute_prior(inc, cb) == doctest::Approx(0.3));
}

TEST_CASE("item base construction") {
    MutationBudget none = MutationBudget::uniform(0);
    SUBCASE("unique signatures, no budget") {
        Toy toy({"inc", "add"});
        Codebase cb(toy.field);
        toy.add(cb, "a", "inc\nduplicate_top\nadd");
        const auto base = build_item_base(cb, none);
        CHECK(base.size() == 2);
        CHECK(base.count(ItemOrigin::Split) == 2);
    }
    SUBCASE("one alternative per call") {
        Toy toy({"inc", "dec", "add", "mul"});
        Codebase cb(toy.field);
        toy.add(cb, "a", "inc\nduplicate_top\nadd");
        MutationBudget budget = MutationBudget::uniform(MutationBudget::kUnlimited);
        budget.insertions = 0;
        budget.deletions = 0;
        const auto base = build_item_base(cb, budget);
        CHECK(base.size() == 4);
        CHECK(base.count(ItemOrigin::Substitution) == 2);
        CHECK(base.find(toy.code("dec")).has_value());
        CHECK(base.find(toy.code("duplicate_top\nmul")).has_value());
        const auto& sub = base[*base.find(toy.code("dec"))];
        CHECK(sub.prior == doctest::Approx(0.5));
        CHECK(sub.parent == *base.find(toy.code("inc")));
    }
    SUBCASE("duplicates keep the larger prior") {
        ItemBase base;
        Toy toy({"inc"});
        CodeItem a = make_item(toy.code("inc"), toy.field->fsl());
        a.prior = 0.2;
        CodeItem b = a;
        b.prior = 0.5;
        CHECK(base.add(a) == base.add(b));
        CHECK(base.size() == 1);
        CHECK(base[0].prior == 0.5);
        CHECK(base.by_return_type(toy.num).size() == 1);
        CHECK(base.by_form(a.form).size() == 1);
    }
    SUBCASE("sampling is seeded and respects the budget") {
        auto field = arc::make_field();
        const auto cb = testing::seed_codebase(field);
        const auto a = build_item_base(*cb, {}, 3);
        const auto b = build_item_base(*cb, {}, 3);
        CHECK(a.fingerprint() == b.fingerprint());
        CHECK(a.count(ItemOrigin::Insertion) == 200);
        CHECK(a.count(ItemOrigin::Split) == 16);
        for (const auto& item : a.items()) {
            CHECK(item.prior >= 0.01);
            CHECK(item.prior <= 1.0);
        }
    }
}

TEST_CASE("mutants of the seed codebase keep their parent's form") {
    auto field = arc::make_field();
    const auto cb = testing::seed_codebase(field);
    const Fsl& fsl = field->fsl();
    const auto pool = ConstantPool::collect(*cb);
    std::size_t checked = 0;
    for (std::size_t i = 0; i < cb->size(); ++i) {
        for (const auto& item : split_snippet(*field, cb->example_of(i).input, cb->entry(i).snippet)) {
            for (const auto& m : mutate_substitute(item, fsl)) {
                CHECK(make_form(m.opcodes, fsl) == item.form);
                ++checked;
            }
            for (const auto& m : make_alleles(item, pool)) CHECK(make_form(m.opcodes, fsl) == item.form);
        }
    }
    CHECK(checked > 0);
}

TEST_CASE("codebase persistence") {
    Toy toy({"inc", "dec"});
    Codebase cb(toy.field);
    toy.add(cb, "a", "inc\ndec", 4);
    toy.add(cb, "b", "dec", 2);
    const std::string text = cb.serialize();
    std::map<std::string, Example> known{{"a", *cb.find_example("a")}, {"b", *cb.find_example("b")}};
    auto resolve = [&](std::string_view id) { return known.at(std::string(id)); };
    const auto back = Codebase::parse(text, toy.field, resolve);
    CHECK(back.size() == 2);
    CHECK(back.serialize() == text);

    auto err = [&](std::string_view t) {
        try {
            Codebase::parse(t, toy.field, resolve);
        } catch (const Error& e) {
            return e.code();
        }
        return ErrorCode::None;
    };
    CHECK(err("entry arc a handcrafted\ninc\nend\n") == ErrorCode::FieldMismatch);
    CHECK(err("entry toy a handcrafted\ninc\n") == ErrorCode::ParseError);
    CHECK(err("entry toy a sometimes\ninc\nend\n") == ErrorCode::ParseError);
    CHECK(err("entry toy a handcrafted\ndec\nend\n") == ErrorCode::NotASnippet);
    CHECK(err("entry toy a handcrafted\nwarp\nend\n") == ErrorCode::UnknownPrimitive);

    const auto path = std::filesystem::temp_directory_path() / "ff_codebase_test.txt";
    { std::ofstream(path) << text; }
    Codebase::append(path, CodebaseEntry{toy.code("inc\ndec"), "a", Provenance::FoundBySearch}, *toy.field);
    const auto grown = Codebase::load(path, toy.field, resolve);
    CHECK(grown.size() == 3);
    CHECK(grown.entry(2).provenance == Provenance::FoundBySearch);
    std::filesystem::remove(path);
}

}

#include "ff/codebase.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <unordered_set>

#include "ff/text.hpp"

namespace ff {

std::string_view to_string(Provenance p) noexcept {
    return p == Provenance::Handcrafted ? "handcrafted" : "found-by-search";
}

std::string_view to_string(ItemOrigin o) noexcept {
    switch (o) {
    case ItemOrigin::Split: return "split";
    case ItemOrigin::Allele: return "allele";
    case ItemOrigin::Substitution: return "substitution";
    case ItemOrigin::Insertion: return "insertion";
    case ItemOrigin::Deletion: return "deletion";
    }
    return "unknown";
}

// ---------------------------------------------------------------------------
// Codebase

Codebase::Codebase(FieldPtr field) : field_(std::move(field)) {
    if (!field_) throw Error(ErrorCode::InvalidArgument, "codebase needs a field");
}

namespace {

void check_entry(const FormalField& field, const CodebaseEntry& entry, const Example& example) {
    auto trace = run_code(field, example.input, entry.snippet);
    const bool snippet = trace.ok() && !trace.results.empty() && !entry.snippet.empty() &&
                         trace.results.back().index + 1 == entry.snippet.size();
    if (!snippet) {
        throw Error(ErrorCode::NotASnippet, "entry for '" + example.id + "' does not run to a " + field.range().name);
    }
    if (!(trace.results.back().value == example.output)) {
        throw Error(ErrorCode::NotASnippet, "entry for '" + example.id + "' does not reproduce its ground truth");
    }
}

}  // namespace

void Codebase::add(CodebaseEntry entry, Example example) {
    if (entry.example_id != example.id) {
        throw Error(ErrorCode::InvalidArgument, "entry example id does not match the example");
    }
    check_entry(*field_, entry, example);
    if (!example_index_.contains(example.id)) {
        example_index_.emplace(example.id, examples_.size());
        examples_.push_back(std::move(example));
    }
    entries_.push_back(std::move(entry));
}

const Example& Codebase::example_of(std::size_t i) const {
    return examples_[example_index_.at(entries_.at(i).example_id)];
}

const Example* Codebase::find_example(std::string_view id) const {
    auto it = example_index_.find(std::string(id));
    return it == example_index_.end() ? nullptr : &examples_[it->second];
}

void Codebase::revalidate() const {
    for (std::size_t i = 0; i < entries_.size(); ++i) check_entry(*field_, entries_[i], example_of(i));
}

std::string Codebase::format_record(const CodebaseEntry& entry, const FormalField& field) {
    std::string out = "entry " + field.name() + " " + entry.example_id + " " + std::string(to_string(entry.provenance)) + "\n";
    out += decompile(entry.snippet, field.fsl());
    out += "\nend\n";
    return out;
}

std::string Codebase::serialize() const {
    std::string out = "# formal fields codebase\n";
    for (const auto& e : entries_) out += format_record(e, *field_);
    return out;
}

Codebase Codebase::parse(std::string_view text, FieldPtr field, const ExampleResolver& resolve) {
    Codebase cb(std::move(field));
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream head(line);
        std::string tag, field_name, example_id, prov;
        head >> tag >> field_name >> example_id >> prov;
        if (tag != "entry" || prov.empty()) {
            throw Error(ErrorCode::ParseError, "codebase line " + std::to_string(line_no) + ": expected an entry header");
        }
        if (field_name != cb.field().name()) {
            throw Error(ErrorCode::FieldMismatch,
                        "codebase entry recorded for field '" + field_name + "', loading into '" + cb.field().name() + "'");
        }
        CodebaseEntry entry;
        entry.example_id = example_id;
        if (prov == "handcrafted") {
            entry.provenance = Provenance::Handcrafted;
        } else if (prov == "found-by-search") {
            entry.provenance = Provenance::FoundBySearch;
        } else {
            throw Error(ErrorCode::ParseError, "codebase line " + std::to_string(line_no) + ": unknown provenance '" + prov + "'");
        }
        std::string body;
        const std::size_t body_start = line_no + 1;
        bool closed = false;
        while (std::getline(in, line)) {
            ++line_no;
            if (line == "end") {
                closed = true;
                break;
            }
            body += line;
            body += '\n';
        }
        if (!closed) throw Error(ErrorCode::ParseError, "codebase record starting at line " + std::to_string(body_start - 1) + " has no end");
        try {
            entry.snippet = compile(body, cb.field().fsl());
        } catch (const CompileError& e) {
            throw Error(e.code(), "codebase record at line " + std::to_string(body_start - 1) + ": " + e.what());
        }
        const Example* known = cb.find_example(example_id);
        Example ex = known ? *known : resolve(example_id);
        cb.add(std::move(entry), std::move(ex));
    }
    return cb;
}

Codebase Codebase::load(const std::filesystem::path& path, FieldPtr field, const ExampleResolver& resolve) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::MissingFile, "cannot open codebase '" + path.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), std::move(field), resolve);
}

void Codebase::append(const std::filesystem::path& path, const CodebaseEntry& entry, const FormalField& field) {
    std::ofstream out(path, std::ios::binary | std::ios::app);
    if (!out) throw Error(ErrorCode::IoError, "cannot append to codebase '" + path.string() + "'");
    out << format_record(entry, field);
    if (!out) throw Error(ErrorCode::IoError, "write to '" + path.string() + "' failed");
}

// ---------------------------------------------------------------------------
// Forms and items

std::string Form::key() const {
    std::string k;
    for (const auto& s : steps) {
        k += '(';
        for (TypeId a : s.args) {
            k += std::to_string(a.value);
            k += ',';
        }
        k += ')';
        k += std::to_string(s.ret.value);
        if (s.stack_effect >= 0) {
            k += 's';
            k += std::to_string(s.stack_effect);
        }
        k += ';';
    }
    return k;
}

Form make_form(std::span<const Opcode> code, const Fsl& fsl) {
    Form f;
    f.steps.reserve(code.size());
    for (const auto& op : code) {
        if (op.is_push()) {
            f.steps.push_back({{}, op.constant.type()});
            continue;
        }
        const Primitive& p = fsl.get(op.primitive);
        if (p.is_stack_op()) {
            f.steps.push_back({{}, TypeSet::kError, static_cast<int>(*p.stack_effect) * 8 + p.tuple_arity});
        } else {
            f.steps.push_back({p.signature.args, p.signature.ret});
        }
    }
    return f;
}

CodeItem make_item(Code code, const Fsl& fsl, ItemOrigin origin) {
    CodeItem item;
    item.form = make_form(code, fsl);
    item.opcodes = std::move(code);
    item.origin = origin;
    return item;
}

namespace {

bool returns_range(const Opcode& op, const Fsl& fsl, TypeId range) {
    if (!op.is_call()) return false;
    const Primitive& p = fsl.get(op.primitive);
    return !p.is_stack_op() && fsl.types().conforms(p.signature.ret, range);
}

}  // namespace

bool satisfies_final_opcode_rule(std::span<const Opcode> code, const Fsl& fsl, TypeId range) {
    if (code.empty() || !returns_range(code.back(), fsl, range)) return false;
    for (std::size_t i = 0; i + 1 < code.size(); ++i) {
        if (returns_range(code[i], fsl, range)) return false;
    }
    return true;
}

std::vector<CodeItem> split_snippet(const FormalField& field, const Value& x, std::span<const Opcode> snippet) {
    auto trace = run_code(field, x, snippet);
    if (snippet.empty() || !trace.ok() || trace.results.empty() || trace.results.back().index + 1 != snippet.size()) {
        throw Error(ErrorCode::NotASnippet, "cannot split: code is not a snippet on this example");
    }
    std::vector<CodeItem> items;
    std::size_t start = 0;
    for (const auto& r : trace.results) {
        Code part(snippet.begin() + static_cast<std::ptrdiff_t>(start), snippet.begin() + static_cast<std::ptrdiff_t>(r.index) + 1);
        items.push_back(make_item(std::move(part), field.fsl(), ItemOrigin::Split));
        start = r.index + 1;
    }
    return items;
}

// ---------------------------------------------------------------------------
// Mutations

void ConstantPool::observe(const Value& v) {
    auto& bucket = values_[v.type()];
    if (std::find(bucket.begin(), bucket.end(), v) == bucket.end()) bucket.push_back(v);
}

std::span<const Value> ConstantPool::values_of(TypeId type) const {
    auto it = values_.find(type);
    if (it == values_.end()) return {};
    return it->second;
}

ConstantPool ConstantPool::collect(const Codebase& codebase) {
    ConstantPool pool;
    for (const auto& e : codebase.entries()) {
        for (const auto& op : e.snippet) {
            if (op.is_push()) pool.observe(op.constant);
        }
    }
    return pool;
}

namespace {

CodeItem derive(const CodeItem& parent, Code code, const Fsl& fsl, ItemOrigin origin) {
    CodeItem m = make_item(std::move(code), fsl, origin);
    m.parent_prior = parent.prior;
    return m;
}

}  // namespace

std::vector<CodeItem> make_alleles(const CodeItem& item, const ConstantPool& pool) {
    std::vector<CodeItem> out;
    for (std::size_t i = 0; i < item.opcodes.size(); ++i) {
        const Opcode& op = item.opcodes[i];
        if (!op.is_push()) continue;
        for (const Value& alt : pool.values_of(op.constant.type())) {
            if (alt == op.constant) continue;
            CodeItem m;
            m.opcodes = item.opcodes;
            m.opcodes[i] = Opcode::push(alt);
            m.form = item.form;
            m.origin = ItemOrigin::Allele;
            m.parent_prior = item.prior;
            out.push_back(std::move(m));
        }
    }
    return out;
}

std::vector<CodeItem> make_alleles(const CodeItem& item, const Codebase& codebase) {
    return make_alleles(item, ConstantPool::collect(codebase));
}

std::vector<CodeItem> mutate_substitute(const CodeItem& item, const Fsl& fsl) {
    std::vector<CodeItem> out;
    for (std::size_t i = 0; i < item.opcodes.size(); ++i) {
        const Opcode& op = item.opcodes[i];
        if (!op.is_call()) continue;
        const Primitive& p = fsl.get(op.primitive);
        if (p.is_stack_op()) continue;
        for (std::size_t k = 0; k < fsl.size(); ++k) {
            const PrimitiveId alt{static_cast<std::uint16_t>(k)};
            if (alt == op.primitive) continue;
            const Primitive& q = fsl.get(alt);
            if (q.is_stack_op() || !(q.signature == p.signature)) continue;
            Code code = item.opcodes;
            code[i] = Opcode::call(alt);
            out.push_back(derive(item, std::move(code), fsl, ItemOrigin::Substitution));
        }
    }
    return out;
}

std::vector<PrimitiveId> insertion_candidates(const CodeItem& item, const Fsl& fsl) {
    std::vector<PrimitiveId> out;
    std::vector<TypeId> returned;
    for (const auto& s : item.form.steps) {
        if (s.stack_effect < 0 && s.ret != TypeSet::kError) returned.push_back(s.ret);
    }
    for (std::size_t k = 0; k < fsl.size(); ++k) {
        const PrimitiveId id{static_cast<std::uint16_t>(k)};
        const Primitive& p = fsl.get(id);
        if (p.is_stack_op()) {
            out.push_back(id);
        } else if (!p.kernel && std::find(returned.begin(), returned.end(), p.signature.ret) != returned.end()) {
            out.push_back(id);
        }
    }
    return out;
}

std::vector<CodeItem> mutate_insert(const CodeItem& item, const Fsl& fsl, TypeId range) {
    std::vector<CodeItem> out;
    if (item.opcodes.empty()) return out;
    const auto candidates = insertion_candidates(item, fsl);
    for (std::size_t pos = 0; pos < item.opcodes.size(); ++pos) {
        for (PrimitiveId c : candidates) {
            Code code = item.opcodes;
            code.insert(code.begin() + static_cast<std::ptrdiff_t>(pos), Opcode::call(c));
            if (!satisfies_final_opcode_rule(code, fsl, range)) continue;
            out.push_back(derive(item, std::move(code), fsl, ItemOrigin::Insertion));
        }
    }
    return out;
}

std::vector<CodeItem> mutate_delete(const CodeItem& item, const Fsl& fsl) {
    std::vector<CodeItem> out;
    for (std::size_t pos = 0; pos + 1 < item.opcodes.size(); ++pos) {
        Code code = item.opcodes;
        code.erase(code.begin() + static_cast<std::ptrdiff_t>(pos));
        out.push_back(derive(item, std::move(code), fsl, ItemOrigin::Deletion));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Priors

PriorFunction::PriorFunction(const Codebase& codebase, PriorConfig config)
    : config_(config), codebase_size_(codebase.size()) {
    for (std::size_t i = 0; i < codebase.size(); ++i) {
        auto items = split_snippet(codebase.field(), codebase.example_of(i).input, codebase.entry(i).snippet);
        std::unordered_set<Code, CodeHash> seen;
        for (auto& it : items) {
            if (seen.insert(it.opcodes).second) ++counts_[it.opcodes];
        }
    }
}

std::size_t PriorFunction::occurrences(std::span<const Opcode> code) const {
    auto it = counts_.find(Code(code.begin(), code.end()));
    return it == counts_.end() ? 0 : it->second;
}

double PriorFunction::operator()(const CodeItem& item) const {
    double p = 0.0;
    if (item.origin == ItemOrigin::Split) {
        if (codebase_size_ > 0) p = static_cast<double>(occurrences(item.opcodes)) / static_cast<double>(codebase_size_);
    } else {
        p = item.parent_prior * config_.decay;
    }
    return std::clamp(p, config_.epsilon, 1.0);
}

double compute_prior(const CodeItem& item, const Codebase& codebase, PriorConfig config) {
    return PriorFunction(codebase, config)(item);
}

// ---------------------------------------------------------------------------
// Item base

std::size_t ItemBase::add(CodeItem item) {
    if (auto it = index_.find(item.opcodes); it != index_.end()) {
        CodeItem& existing = items_[it->second];
        if (item.prior > existing.prior) {
            existing.prior = item.prior;
            existing.origin = item.origin;
            existing.parent = item.parent;
            existing.parent_prior = item.parent_prior;
        }
        return it->second;
    }
    const std::size_t id = items_.size();
    index_.emplace(item.opcodes, id);
    by_form_[item.form.key()].push_back(id);
    if (!item.form.steps.empty()) by_return_[item.form.steps.back().ret].push_back(id);
    items_.push_back(std::move(item));
    return id;
}

std::optional<std::size_t> ItemBase::find(std::span<const Opcode> code) const {
    auto it = index_.find(Code(code.begin(), code.end()));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::span<const std::size_t> ItemBase::by_form(const Form& form) const {
    auto it = by_form_.find(form.key());
    if (it == by_form_.end()) return {};
    return it->second;
}

std::span<const std::size_t> ItemBase::by_return_type(TypeId type) const {
    auto it = by_return_.find(type);
    if (it == by_return_.end()) return {};
    return it->second;
}

std::size_t ItemBase::count(ItemOrigin origin) const {
    return static_cast<std::size_t>(
        std::count_if(items_.begin(), items_.end(), [origin](const CodeItem& i) { return i.origin == origin; }));
}

std::uint64_t ItemBase::fingerprint() const {
    std::uint64_t h = 0xcbf29ce484222325ULL ^ items_.size();
    for (const auto& it : items_) {
        h ^= hash_code(it.opcodes);
        h *= 0x100000001b3ULL;
    }
    return h;
}

ItemBase build_item_base(const Codebase& codebase, MutationBudget budget, std::uint64_t seed, PriorConfig prior_config) {
    const FormalField& field = codebase.field();
    const Fsl& fsl = field.fsl();
    const PriorFunction prior(codebase, prior_config);
    ItemBase base;

    for (std::size_t i = 0; i < codebase.size(); ++i) {
        for (auto& item : split_snippet(field, codebase.example_of(i).input, codebase.entry(i).snippet)) {
            item.prior = prior(item);
            base.add(std::move(item));
        }
    }
    const std::size_t split_count = base.size();
    const ConstantPool pool = ConstantPool::collect(codebase);
    std::mt19937_64 rng(seed);

    auto add_class = [&](std::size_t limit, auto&& mutate) {
        std::vector<CodeItem> candidates;
        std::unordered_set<Code, CodeHash> seen;
        for (std::size_t id = 0; id < split_count; ++id) {
            for (auto& m : mutate(base[id])) {
                if (base.find(m.opcodes) || !seen.insert(m.opcodes).second) continue;
                m.parent = id;
                candidates.push_back(std::move(m));
            }
        }
        std::vector<std::size_t> chosen(candidates.size());
        std::iota(chosen.begin(), chosen.end(), 0);
        if (candidates.size() > limit) {
            // Partial Fisher-Yates, then restore enumeration order.
            for (std::size_t k = 0; k < limit; ++k) {
                std::uniform_int_distribution<std::size_t> pick(k, chosen.size() - 1);
                std::swap(chosen[k], chosen[pick(rng)]);
            }
            chosen.resize(limit);
            std::sort(chosen.begin(), chosen.end());
        }
        for (std::size_t k : chosen) {
            CodeItem& m = candidates[k];
            m.prior = prior(m);
            base.add(std::move(m));
        }
    };

    add_class(budget.alleles, [&](const CodeItem& it) { return make_alleles(it, pool); });
    add_class(budget.substitutions, [&](const CodeItem& it) { return mutate_substitute(it, fsl); });
    add_class(budget.insertions, [&](const CodeItem& it) { return mutate_insert(it, fsl, field.range().type); });
    add_class(budget.deletions, [&](const CodeItem& it) { return mutate_delete(it, fsl); });
    return base;
}

}  // namespace ff

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ff/field.hpp"
#include "ff/opcode.hpp"

namespace ff {

enum class Provenance : std::uint8_t { Handcrafted, FoundBySearch };
std::string_view to_string(Provenance p) noexcept;

// A solved example: x and the ground truth for it.
struct Example {
    std::string id;
    Value input;
    Value output;
};

using ExampleResolver = std::function<Example(std::string_view id)>;

struct CodebaseEntry {
    Code snippet;
    std::string example_id;
    Provenance provenance = Provenance::Handcrafted;
};

// The codebase B: snippets paired with the example each one solves.
// Every entry is checked on insertion: the snippet must run on its example
// and its final result must equal the example's ground truth.
class Codebase {
public:
    explicit Codebase(FieldPtr field);

    void add(CodebaseEntry entry, Example example);

    const FormalField& field() const noexcept { return *field_; }
    const FieldPtr& field_ptr() const noexcept { return field_; }
    std::size_t size() const noexcept { return entries_.size(); }
    bool empty() const noexcept { return entries_.empty(); }
    std::span<const CodebaseEntry> entries() const noexcept { return entries_; }
    const CodebaseEntry& entry(std::size_t i) const { return entries_.at(i); }
    const Example& example_of(std::size_t i) const;
    const Example* find_example(std::string_view id) const;

    // Re-runs every entry; throws not-a-snippet on the first failure.
    void revalidate() const;

    // Text persistence, one record per entry:
    //
    //     entry <field> <example-id> <handcrafted|found-by-search>
    //     <canonical snippet text>
    //     end
    std::string serialize() const;
    static std::string format_record(const CodebaseEntry& entry, const FormalField& field);
    static Codebase parse(std::string_view text, FieldPtr field, const ExampleResolver& resolve);
    static Codebase load(const std::filesystem::path& path, FieldPtr field, const ExampleResolver& resolve);
    static void append(const std::filesystem::path& path, const CodebaseEntry& entry, const FormalField& field);

private:
    FieldPtr field_;
    std::vector<CodebaseEntry> entries_;
    std::vector<Example> examples_;
    std::unordered_map<std::string, std::size_t> example_index_;
};

enum class ItemOrigin : std::uint8_t { Split, Allele, Substitution, Insertion, Deletion };
std::string_view to_string(ItemOrigin o) noexcept;

struct FormStep {
    std::vector<TypeId> args;
    TypeId ret;
    int stack_effect = -1;  // kernel stack shufflers have no typed signature

    bool operator==(const FormStep&) const = default;
};

// Argument and return types per opcode. Items sharing a form are
// isomorphisms.
struct Form {
    std::vector<FormStep> steps;

    bool operator==(const Form&) const = default;
    std::string key() const;
};

Form make_form(std::span<const Opcode> code, const Fsl& fsl);

inline constexpr std::size_t kNoParent = std::numeric_limits<std::size_t>::max();

// A minimal snippet: only its last opcode yields a Y value.
struct CodeItem {
    Code opcodes;
    Form form;
    ItemOrigin origin = ItemOrigin::Split;
    std::size_t parent = kNoParent;  // ItemBase id of the item this one mutates
    double parent_prior = 0.0;
    double prior = 0.0;
};

CodeItem make_item(Code code, const Fsl& fsl, ItemOrigin origin = ItemOrigin::Split);

// Static minimality: the final opcode is a typed call returning a Y type and
// no earlier call does.
bool satisfies_final_opcode_rule(std::span<const Opcode> code, const Fsl& fsl, TypeId range);

// Cuts a snippet after every opcode that yields a Y result on x.
std::vector<CodeItem> split_snippet(const FormalField& field, const Value& x, std::span<const Opcode> snippet);

// Constant values seen anywhere in a codebase, per type, first-seen order.
class ConstantPool {
public:
    void observe(const Value& v);
    std::span<const Value> values_of(TypeId type) const;
    static ConstantPool collect(const Codebase& codebase);

private:
    std::map<TypeId, std::vector<Value>> values_;
};

std::vector<CodeItem> make_alleles(const CodeItem& item, const ConstantPool& pool);
std::vector<CodeItem> make_alleles(const CodeItem& item, const Codebase& codebase);
std::vector<CodeItem> mutate_substitute(const CodeItem& item, const Fsl& fsl);
// Candidates inserted before any opcode except past the final one: kernel
// stack shufflers plus typed primitives returning a type already in the form.
std::vector<PrimitiveId> insertion_candidates(const CodeItem& item, const Fsl& fsl);
std::vector<CodeItem> mutate_insert(const CodeItem& item, const Fsl& fsl, TypeId range);
std::vector<CodeItem> mutate_delete(const CodeItem& item, const Fsl& fsl);

struct PriorConfig {
    double decay = 0.5;     // per mutation step
    double epsilon = 0.01;  // floor
};

// u(q, B). Split items score by the fraction of codebase snippets that
// contain them; mutants inherit their parent's prior times the decay.
class PriorFunction {
public:
    PriorFunction(const Codebase& codebase, PriorConfig config = {});

    double operator()(const CodeItem& item) const;
    std::size_t occurrences(std::span<const Opcode> code) const;
    const PriorConfig& config() const noexcept { return config_; }

private:
    PriorConfig config_;
    std::size_t codebase_size_;
    std::unordered_map<Code, std::size_t, CodeHash> counts_;
};

double compute_prior(const CodeItem& item, const Codebase& codebase, PriorConfig config = {});

struct MutationBudget {
    static constexpr std::size_t kUnlimited = std::numeric_limits<std::size_t>::max();

    std::size_t alleles = 200;
    std::size_t substitutions = 200;
    std::size_t insertions = 200;
    std::size_t deletions = 200;

    static MutationBudget uniform(std::size_t n) { return {n, n, n, n}; }
};

// The searchable pool of items, deduplicated by opcode sequence.
class ItemBase {
public:
    // Adds or merges (max prior) and returns the item's id.
    std::size_t add(CodeItem item);

    std::size_t size() const noexcept { return items_.size(); }
    bool empty() const noexcept { return items_.empty(); }
    const CodeItem& operator[](std::size_t id) const { return items_.at(id); }
    std::span<const CodeItem> items() const noexcept { return items_; }
    std::optional<std::size_t> find(std::span<const Opcode> code) const;
    std::span<const std::size_t> by_form(const Form& form) const;
    std::span<const std::size_t> by_return_type(TypeId type) const;
    std::size_t count(ItemOrigin origin) const;

    // Order-sensitive digest of the opcode sequences, used to detect a state
    // file restored against a different item base.
    std::uint64_t fingerprint() const;

private:
    std::vector<CodeItem> items_;
    std::unordered_map<Code, std::size_t, CodeHash> index_;
    std::map<std::string, std::vector<std::size_t>> by_form_;
    std::map<TypeId, std::vector<std::size_t>> by_return_;
};

ItemBase build_item_base(const Codebase& codebase, MutationBudget budget = {}, std::uint64_t seed = 0,
                         PriorConfig prior = {});

}  // namespace ff

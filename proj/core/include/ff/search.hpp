#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "ff/codebase.hpp"
#include "ff/valuation.hpp"

namespace ff {

struct SearchConfig {
    double f = 0.5;
    double g = 1.0;
    double h = 1.0;
    double discount = 0.95;
    std::size_t max_depth = 8;
    std::size_t node_budget = 100'000;
    std::size_t width = 16;
    std::uint64_t seed = 0;
    std::size_t max_solutions = 1;
    std::size_t cache_bytes = std::size_t{512} << 20;
    bool prune_duplicates = true;
    bool patch = true;

    bool operator==(const SearchConfig&) const = default;
};

// Throws invalid-argument on f <= 0, discount outside (0, 1], zero width,
// zero depth or zero max_solutions.
void validate(const SearchConfig& config);

// Given every example's current output and target, proposes a suffix item
// that turns all outputs into their targets, or nothing.
using PatchHook = std::function<std::optional<Code>(std::span<const Value> outputs, std::span<const Value> targets)>;

// (F, B, e, u, v, w): everything a search needs in one field.
struct FormalRelation {
    FieldPtr field;
    std::shared_ptr<const Codebase> codebase;
    PriorConfig prior;
    ValueOptions value;
    RewardModel reward = RewardModel::handcrafted();
    PatchHook patch;

    double exact(const Value& yhat, const Value& y) const { return evaluate_exact(yhat, y); }
    double cells(const Value& yhat, const Value& y) const { return evaluate_cells(yhat, y); }
};

using NodeId = std::uint32_t;
inline constexpr NodeId kNoNode = std::numeric_limits<NodeId>::max();
inline constexpr std::uint32_t kNoItem = std::numeric_limits<std::uint32_t>::max();

struct SearchNode {
    NodeId parent = kNoNode;
    std::uint32_t item = kNoItem;
    std::uint64_t n = 0;
    double r = 0.0;
    double u = 1.0;
    double reward = 0.0;  // predicted at creation
    std::uint32_t depth = 0;
    bool expanded = false;
    bool closed = false;  // nothing left to explore below
    bool solution = false;
    std::vector<NodeId> children;
};

class SearchTree {
public:
    SearchTree();

    static constexpr NodeId root() noexcept { return 0; }
    std::size_t size() const noexcept { return nodes_.size(); }
    const SearchNode& operator[](NodeId id) const { return nodes_.at(id); }
    SearchNode& operator[](NodeId id) { return nodes_.at(id); }
    std::span<const SearchNode> nodes() const noexcept { return nodes_; }

    NodeId add_child(NodeId parent, std::uint32_t item, double prior);
    // Node ids from the root down to `id`, inclusive.
    std::vector<NodeId> path(NodeId id) const;

    bool operator==(const SearchTree&) const;

private:
    std::vector<SearchNode> nodes_;
};

// u (h + ln((n* + f) / f)) sqrt(n*) / (n + 1) + g r / n, the second term
// taken as 0 while n = 0.
double ucb_score(double u, double n, double r, double parent_visits, const SearchConfig& config);
double ucb_score(const SearchNode& child, std::uint64_t parent_visits, const SearchConfig& config);

// Descends by maximal UCB over open children (ties to the lowest id) and
// stops at the first unexpanded node or at max depth.
std::vector<NodeId> select(const SearchTree& tree, const SearchConfig& config);

// n += 1 and r += reward * discount^d for the leaf (d = 0) and each
// ancestor at distance d.
void backpropagate(SearchTree& tree, NodeId leaf, double reward, const SearchConfig& config);

struct Solution {
    Code snippet;
    std::vector<double> exact;  // per training example
    NodeId node = kNoNode;
};

struct SearchOutcome {
    std::string task;
    SearchConfig config;
    std::vector<Solution> solutions;
    std::size_t nodes_expanded = 0;
    std::size_t iterations = 0;
    double wall_time_ms = 0.0;
    std::optional<Code> best_partial;
    double best_reward = 0.0;
    std::size_t rejected = 0;  // solutions that failed cold re-verification

    bool solved() const noexcept { return !solutions.empty(); }
};

// Runs `snippet` from scratch on every example; true when each final
// result matches exactly.
bool verify_solution(const FormalField& field, std::span<const Example> examples, std::span<const Opcode> snippet,
                     std::vector<double>* exact = nullptr);

// Per-example state reached at a node. Failed examples keep an empty stack.
struct NodeState {
    std::vector<StackState> stacks;
    std::vector<std::uint8_t> failed;

    // Stack contents only; step counters depend on the path taken.
    bool operator==(const NodeState& other) const;
    std::size_t hash() const;
    std::size_t bytes() const;
};

class SearchEngine {
public:
    SearchEngine(FormalRelation relation, std::shared_ptr<const ItemBase> items, std::vector<Example> examples,
                 SearchConfig config, std::string task = {});

    // Loops select, expand, backpropagate until the node budget is spent,
    // enough solutions are found or the tree is exhausted.
    void run();
    // One iteration; false when there was nothing to do.
    bool step();
    bool done() const;

    // New children of `node`, each already backpropagated.
    std::vector<NodeId> expand(NodeId node);

    void set_node_budget(std::size_t budget) { config_.node_budget = budget; }

    const SearchTree& tree() const noexcept { return tree_; }
    const SearchConfig& config() const noexcept { return config_; }
    const FormalRelation& relation() const noexcept { return relation_; }
    std::size_t nodes_created() const noexcept { return tree_.size() - 1; }
    std::size_t iterations() const noexcept { return iterations_; }
    std::span<const Example> examples() const noexcept { return examples_; }
    std::span<const Code> patch_items() const noexcept { return patches_; }

    const Code& item_code(std::uint32_t item) const;
    Code snippet(NodeId node) const;

    // Cached when available, recomputed from the root otherwise.
    std::shared_ptr<const NodeState> state(NodeId node);
    NodeState recompute_state(NodeId node) const;
    std::size_t cached_bytes() const noexcept { return cache_bytes_; }

    SearchOutcome outcome() const;

    // Versioned, checksummed binary snapshot of the tree, counters, patch
    // items and RNG. Restoring needs the same item base and examples.
    void save(const std::filesystem::path& path) const;
    std::string save_bytes() const;
    static SearchEngine restore(const std::filesystem::path& path, FormalRelation relation,
                                std::shared_ptr<const ItemBase> items, std::vector<Example> examples,
                                std::string task = {});
    static SearchEngine restore_bytes(std::string_view bytes, FormalRelation relation,
                                      std::shared_ptr<const ItemBase> items, std::vector<Example> examples,
                                      std::string task = {});

private:
    NodeState apply(const NodeState& from, const Code& code) const;
    double child_reward(NodeId parent, const NodeState& parent_state, const NodeState& child_state,
                        std::uint32_t depth, bool& solved, std::vector<Value>& outputs) const;
    void close(NodeId node);
    void cache(NodeId node, std::shared_ptr<const NodeState> s);
    double item_prior(std::uint32_t item) const;
    std::uint64_t examples_fingerprint() const;

    FormalRelation relation_;
    std::shared_ptr<const ItemBase> items_;
    std::vector<Example> examples_;
    SearchConfig config_;
    std::string task_;
    SearchTree tree_;
    std::mt19937_64 rng_;
    std::vector<Code> patches_;
    std::vector<NodeId> solution_nodes_;
    std::size_t iterations_ = 0;
    std::size_t rejected_ = 0;
    double elapsed_ms_ = 0.0;
    std::unordered_map<NodeId, std::shared_ptr<const NodeState>> cache_;
    std::size_t cache_bytes_ = 0;
};

SearchOutcome run_search(const FormalRelation& relation, std::span<const Example> examples,
                         std::shared_ptr<const ItemBase> items, const SearchConfig& config, std::string task = {});

// Line-oriented record for one task; wall time only when asked for.
std::string format_report(const SearchOutcome& outcome, const FormalField& field, bool include_timing = true);
std::string format_config(const SearchConfig& config);

}  // namespace ff

#include "ff/search.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#include "ff/serialize.hpp"
#include "ff/text.hpp"

namespace ff {

void validate(const SearchConfig& c) {
    if (!(c.f > 0.0)) throw Error(ErrorCode::InvalidArgument, "f must be positive");
    if (!(c.discount > 0.0 && c.discount <= 1.0)) throw Error(ErrorCode::InvalidArgument, "discount must lie in (0, 1]");
    if (c.width == 0) throw Error(ErrorCode::InvalidArgument, "expansion width must be positive");
    if (c.max_depth == 0) throw Error(ErrorCode::InvalidArgument, "max depth must be positive");
    if (c.max_solutions == 0) throw Error(ErrorCode::InvalidArgument, "max solutions must be positive");
}

// ---------------------------------------------------------------------------
// Tree

SearchTree::SearchTree() { nodes_.emplace_back(); }

NodeId SearchTree::add_child(NodeId parent, std::uint32_t item, double prior) {
    const NodeId id = static_cast<NodeId>(nodes_.size());
    SearchNode node;
    node.parent = parent;
    node.item = item;
    node.u = prior;
    node.depth = nodes_.at(parent).depth + 1;
    nodes_.push_back(std::move(node));
    nodes_[parent].children.push_back(id);
    return id;
}

std::vector<NodeId> SearchTree::path(NodeId id) const {
    std::vector<NodeId> out;
    for (NodeId at = id; at != kNoNode; at = nodes_.at(at).parent) out.push_back(at);
    std::reverse(out.begin(), out.end());
    return out;
}

bool SearchTree::operator==(const SearchTree& other) const {
    if (nodes_.size() != other.nodes_.size()) return false;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        const auto& a = nodes_[i];
        const auto& b = other.nodes_[i];
        if (a.parent != b.parent || a.item != b.item || a.n != b.n || a.r != b.r || a.u != b.u || a.reward != b.reward ||
            a.depth != b.depth || a.expanded != b.expanded || a.closed != b.closed || a.solution != b.solution ||
            a.children != b.children) {
            return false;
        }
    }
    return true;
}

double ucb_score(double u, double n, double r, double parent_visits, const SearchConfig& c) {
    const double explore = u * (c.h + std::log((parent_visits + c.f) / c.f)) * std::sqrt(parent_visits) / (n + 1.0);
    const double exploit = n > 0.0 ? c.g * (r / n) : 0.0;
    return explore + exploit;
}

double ucb_score(const SearchNode& child, std::uint64_t parent_visits, const SearchConfig& c) {
    return ucb_score(child.u, static_cast<double>(child.n), child.r, static_cast<double>(parent_visits), c);
}

std::vector<NodeId> select(const SearchTree& tree, const SearchConfig& c) {
    std::vector<NodeId> path{SearchTree::root()};
    for (;;) {
        const SearchNode& node = tree[path.back()];
        if (!node.expanded || node.depth >= c.max_depth) break;
        NodeId best = kNoNode;
        double best_score = 0.0;
        for (NodeId child : node.children) {
            if (tree[child].closed) continue;
            const double s = ucb_score(tree[child], node.n, c);
            if (best == kNoNode || s > best_score || (s == best_score && child < best)) {
                best = child;
                best_score = s;
            }
        }
        if (best == kNoNode) break;
        path.push_back(best);
    }
    return path;
}

void backpropagate(SearchTree& tree, NodeId leaf, double reward, const SearchConfig& c) {
    double add = reward;
    for (NodeId at = leaf; at != kNoNode; at = tree[at].parent) {
        SearchNode& node = tree[at];
        node.n += 1;
        node.r += add;
        add *= c.discount;
    }
}

// ---------------------------------------------------------------------------
// Node states

bool NodeState::operator==(const NodeState& other) const {
    if (failed != other.failed || stacks.size() != other.stacks.size()) return false;
    for (std::size_t i = 0; i < stacks.size(); ++i) {
        if (!failed[i] && stacks[i].entries != other.stacks[i].entries) return false;
    }
    return true;
}

std::size_t NodeState::hash() const {
    std::size_t h = 0x84222325u;
    auto mix = [&h](std::size_t x) { h ^= x + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2); };
    for (std::size_t i = 0; i < stacks.size(); ++i) {
        mix(failed[i]);
        if (failed[i]) continue;
        mix(stacks[i].entries.size());
        for (const auto& v : stacks[i].entries) mix(v.hash());
    }
    return h;
}

std::size_t NodeState::bytes() const {
    std::size_t b = sizeof(NodeState) + failed.size();
    for (const auto& s : stacks) {
        b += sizeof(StackState);
        for (const auto& v : s.entries) b += 48 + v.cell_count() * sizeof(std::int32_t);
    }
    return b;
}

bool verify_solution(const FormalField& field, std::span<const Example> examples, std::span<const Opcode> snippet,
                     std::vector<double>* exact) {
    bool all = !examples.empty();
    if (exact) exact->clear();
    for (const auto& ex : examples) {
        const auto o = outcome_of(run_code(field, ex.input, snippet), snippet.size());
        const double e = o.error ? 0.0 : evaluate_exact(o.final, ex.output);
        if (exact) exact->push_back(e);
        all = all && e == 1.0;
    }
    return all;
}

// ---------------------------------------------------------------------------
// Engine

SearchEngine::SearchEngine(FormalRelation relation, std::shared_ptr<const ItemBase> items, std::vector<Example> examples,
                           SearchConfig config, std::string task)
    : relation_(std::move(relation)),
      items_(std::move(items)),
      examples_(std::move(examples)),
      config_(config),
      task_(std::move(task)),
      rng_(config.seed) {
    validate(config_);
    if (!relation_.field) throw Error(ErrorCode::InvalidArgument, "relation has no field");
    if (!items_) throw Error(ErrorCode::InvalidArgument, "search needs an item base");
    if (examples_.empty()) throw Error(ErrorCode::InvalidArgument, "search needs at least one example");
}

const Code& SearchEngine::item_code(std::uint32_t item) const {
    if (item < items_->size()) return (*items_)[item].opcodes;
    return patches_.at(item - items_->size());
}

double SearchEngine::item_prior(std::uint32_t item) const {
    if (item < items_->size()) return (*items_)[item].prior;
    return relation_.prior.epsilon;
}

Code SearchEngine::snippet(NodeId node) const {
    Code out;
    for (NodeId id : tree_.path(node)) {
        if (id == SearchTree::root()) continue;
        const Code& c = item_code(tree_[id].item);
        out.insert(out.end(), c.begin(), c.end());
    }
    return out;
}

NodeState SearchEngine::apply(const NodeState& from, const Code& code) const {
    NodeState out;
    out.stacks.resize(from.stacks.size());
    out.failed.assign(from.stacks.size(), 1);
    for (std::size_t i = 0; i < from.stacks.size(); ++i) {
        if (from.failed[i]) continue;
        auto trace = run_from(*relation_.field, from.stacks[i], code);
        if (!trace.ok() || trace.results.empty() || trace.results.back().index + 1 != code.size()) continue;
        out.stacks[i] = std::move(trace.final_stack);
        out.failed[i] = 0;
    }
    return out;
}

NodeState SearchEngine::recompute_state(NodeId node) const {
    NodeState s;
    for (const auto& ex : examples_) s.stacks.push_back(StackState{{ex.input}, 0});
    s.failed.assign(examples_.size(), 0);
    for (NodeId id : tree_.path(node)) {
        if (id == SearchTree::root()) continue;
        s = apply(s, item_code(tree_[id].item));
    }
    return s;
}

void SearchEngine::cache(NodeId node, std::shared_ptr<const NodeState> s) {
    const std::size_t b = s->bytes();
    if (cache_bytes_ + b > config_.cache_bytes) return;
    cache_bytes_ += b;
    cache_.emplace(node, std::move(s));
}

std::shared_ptr<const NodeState> SearchEngine::state(NodeId node) {
    if (auto it = cache_.find(node); it != cache_.end()) return it->second;
    auto s = std::make_shared<const NodeState>(recompute_state(node));
    cache(node, s);
    return s;
}

double SearchEngine::child_reward(NodeId parent, const NodeState& parent_state, const NodeState& child_state,
                                  std::uint32_t depth, bool& solved, std::vector<Value>& outputs) const {
    std::vector<ExampleOutcome> outcomes(examples_.size());
    std::vector<Value> targets;
    outputs.assign(examples_.size(), Value{});
    solved = true;
    for (std::size_t i = 0; i < examples_.size(); ++i) {
        targets.push_back(examples_[i].output);
        ExampleOutcome& o = outcomes[i];
        if (child_state.failed[i]) {
            solved = false;
            continue;
        }
        o.error = false;
        o.final = child_state.stacks[i].entries.back();
        outputs[i] = o.final;
        if (parent != SearchTree::root() && !parent_state.failed[i]) o.previous = parent_state.stacks[i].entries.back();
        if (evaluate_exact(o.final, examples_[i].output) != 1.0) solved = false;
    }
    if (solved) return 1.0;
    return relation_.reward.reward(assemble_value(outcomes, targets, depth, relation_.value));
}

void SearchEngine::close(NodeId node) {
    for (NodeId at = node; at != kNoNode; at = tree_[at].parent) {
        SearchNode& n = tree_[at];
        if (at != node) {
            if (!n.expanded) break;
            const bool all_closed =
                std::all_of(n.children.begin(), n.children.end(), [&](NodeId c) { return tree_[c].closed; });
            if (!all_closed) break;
        }
        n.closed = true;
    }
}

std::vector<NodeId> SearchEngine::expand(NodeId node) {
    std::vector<NodeId> created;
    SearchNode& target = tree_[node];
    if (target.expanded || target.closed) return created;
    target.expanded = true;
    if (target.depth >= config_.max_depth) {
        close(node);
        return created;
    }
    const auto parent_state = state(node);

    // Weighted sampling without replacement: key = ln(U) / prior, largest first.
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<std::pair<double, std::uint32_t>> order;
    order.reserve(items_->size());
    for (std::uint32_t i = 0; i < items_->size(); ++i) {
        double u = unit(rng_);
        if (u <= 0.0) u = std::numeric_limits<double>::min();
        order.emplace_back(std::log(u) / std::max((*items_)[i].prior, 1e-12), i);
    }
    std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
        return a.first != b.first ? a.first > b.first : a.second < b.second;
    });

    std::unordered_map<std::size_t, std::vector<std::shared_ptr<const NodeState>>> seen;
    if (config_.prune_duplicates) seen[parent_state->hash()].push_back(parent_state);
    auto duplicate = [&](const std::shared_ptr<const NodeState>& s) {
        if (!config_.prune_duplicates) return false;
        auto& bucket = seen[s->hash()];
        for (const auto& other : bucket) {
            if (*other == *s) return true;
        }
        bucket.push_back(s);
        return false;
    };

    const std::uint32_t depth = tree_[node].depth + 1;
    for (const auto& [key, item] : order) {
        if (created.size() >= config_.width) break;
        auto child_state = std::make_shared<const NodeState>(apply(*parent_state, (*items_)[item].opcodes));
        if (std::all_of(child_state->failed.begin(), child_state->failed.end(), [](auto f) { return f != 0; })) continue;
        if (duplicate(child_state)) continue;

        bool solved = false;
        std::vector<Value> outputs;
        const double reward = child_reward(node, *parent_state, *child_state, depth, solved, outputs);
        const NodeId child = tree_.add_child(node, item, (*items_)[item].prior);
        tree_[child].reward = reward;
        cache(child, child_state);
        created.push_back(child);

        if (solved) {
            tree_[child].solution = true;
            std::vector<double> exact;
            if (verify_solution(*relation_.field, examples_, snippet(child), &exact)) {
                solution_nodes_.push_back(child);
            } else {
                ++rejected_;
                tree_[child].solution = false;
            }
            backpropagate(tree_, child, reward, config_);
            close(child);
            continue;
        }
        backpropagate(tree_, child, reward, config_);

        // Color-map patch when every output already has the target's shape.
        if (!config_.patch || !relation_.patch || depth >= config_.max_depth) continue;
        const bool clean = std::none_of(child_state->failed.begin(), child_state->failed.end(), [](auto f) { return f != 0; });
        if (!clean) continue;
        std::vector<Value> targets;
        for (const auto& ex : examples_) targets.push_back(ex.output);
        std::optional<Code> patch;
        try {
            patch = relation_.patch(outputs, targets);
        } catch (const Error&) {
            patch.reset();
        }
        if (!patch || patch->empty()) continue;

        std::uint32_t patch_id = 0;
        auto found = std::find(patches_.begin(), patches_.end(), *patch);
        if (found == patches_.end()) {
            patches_.push_back(*patch);
            found = patches_.end() - 1;
        }
        patch_id = static_cast<std::uint32_t>(items_->size() + static_cast<std::size_t>(found - patches_.begin()));
        auto patched_state = std::make_shared<const NodeState>(apply(*child_state, *patch));
        bool patched_solved = false;
        std::vector<Value> patched_outputs;
        const double patched_reward =
            child_reward(child, *child_state, *patched_state, depth + 1, patched_solved, patched_outputs);
        if (!patched_solved) continue;
        tree_[child].expanded = true;
        const NodeId leaf = tree_.add_child(child, patch_id, std::max(relation_.prior.epsilon, item_prior(item) * relation_.prior.decay));
        tree_[leaf].reward = patched_reward;
        tree_[leaf].solution = true;
        cache(leaf, patched_state);
        created.push_back(leaf);
        std::vector<double> exact;
        if (verify_solution(*relation_.field, examples_, snippet(leaf), &exact)) {
            solution_nodes_.push_back(leaf);
        } else {
            ++rejected_;
            tree_[leaf].solution = false;
        }
        backpropagate(tree_, leaf, patched_reward, config_);
        close(leaf);
    }
    if (created.empty() || std::all_of(tree_[node].children.begin(), tree_[node].children.end(),
                                       [&](NodeId c) { return tree_[c].closed; })) {
        close(node);
    }
    return created;
}

bool SearchEngine::done() const {
    return nodes_created() >= config_.node_budget || solution_nodes_.size() >= config_.max_solutions ||
           tree_[SearchTree::root()].closed;
}

bool SearchEngine::step() {
    if (done()) return false;
    const auto path = select(tree_, config_);
    const NodeId leaf = path.back();
    ++iterations_;
    if (tree_[leaf].expanded) {
        // Reached max depth or a node with no open children.
        close(leaf);
        return true;
    }
    expand(leaf);
    return true;
}

void SearchEngine::run() {
    const auto start = std::chrono::steady_clock::now();
    while (step()) {
    }
    elapsed_ms_ += std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

SearchOutcome SearchEngine::outcome() const {
    SearchOutcome out;
    out.task = task_;
    out.config = config_;
    out.nodes_expanded = nodes_created();
    out.iterations = iterations_;
    out.wall_time_ms = elapsed_ms_;
    out.rejected = rejected_;
    for (NodeId id : solution_nodes_) {
        Solution s;
        s.node = id;
        s.snippet = snippet(id);
        verify_solution(*relation_.field, examples_, s.snippet, &s.exact);
        out.solutions.push_back(std::move(s));
    }
    NodeId best = kNoNode;
    for (NodeId id = 1; id < tree_.size(); ++id) {
        if (best == kNoNode || tree_[id].reward > tree_[best].reward) best = id;
    }
    if (best != kNoNode) {
        out.best_partial = snippet(best);
        out.best_reward = tree_[best].reward;
    }
    return out;
}

SearchOutcome run_search(const FormalRelation& relation, std::span<const Example> examples,
                         std::shared_ptr<const ItemBase> items, const SearchConfig& config, std::string task) {
    SearchEngine engine(relation, std::move(items), std::vector<Example>(examples.begin(), examples.end()), config,
                        std::move(task));
    engine.run();
    return engine.outcome();
}

// ---------------------------------------------------------------------------
// State file

namespace {

constexpr std::uint32_t kMagic = 0x54534646;  // "FFST"
constexpr std::uint32_t kVersion = 1;

void write_config(ByteWriter& w, const SearchConfig& c) {
    w.f64(c.f);
    w.f64(c.g);
    w.f64(c.h);
    w.f64(c.discount);
    w.u64(c.max_depth);
    w.u64(c.node_budget);
    w.u64(c.width);
    w.u64(c.seed);
    w.u64(c.max_solutions);
    w.u64(c.cache_bytes);
    w.u8(c.prune_duplicates);
    w.u8(c.patch);
}

SearchConfig read_config(ByteReader& r) {
    SearchConfig c;
    c.f = r.f64();
    c.g = r.f64();
    c.h = r.f64();
    c.discount = r.f64();
    c.max_depth = r.u64();
    c.node_budget = r.u64();
    c.width = r.u64();
    c.seed = r.u64();
    c.max_solutions = r.u64();
    c.cache_bytes = r.u64();
    c.prune_duplicates = r.u8() != 0;
    c.patch = r.u8() != 0;
    return c;
}

}  // namespace

std::uint64_t SearchEngine::examples_fingerprint() const {
    ByteWriter w;
    for (const auto& ex : examples_) {
        write_value(w, ex.input);
        write_value(w, ex.output);
    }
    return checksum(w.bytes());
}

std::string SearchEngine::save_bytes() const {
    ByteWriter w;
    w.u32(kMagic);
    w.u32(kVersion);
    w.u64(config_.seed);
    write_config(w, config_);
    std::ostringstream rng;
    rng << rng_;
    w.str(rng.str());
    w.u64(items_->fingerprint());
    w.u64(examples_fingerprint());
    w.u64(iterations_);
    w.u64(rejected_);
    w.f64(elapsed_ms_);
    w.u32(static_cast<std::uint32_t>(patches_.size()));
    for (const auto& p : patches_) write_code(w, p);
    w.u32(static_cast<std::uint32_t>(solution_nodes_.size()));
    for (NodeId id : solution_nodes_) w.u32(id);
    w.u32(static_cast<std::uint32_t>(tree_.size()));
    for (const auto& n : tree_.nodes()) {
        w.u32(n.parent);
        w.u32(n.item);
        w.u64(n.n);
        w.f64(n.r);
        w.f64(n.u);
        w.f64(n.reward);
        w.u8(static_cast<std::uint8_t>(n.expanded | (n.closed << 1) | (n.solution << 2)));
    }
    const std::uint64_t sum = checksum(w.bytes());
    w.u64(sum);
    const auto& b = w.bytes();
    return std::string(b.begin(), b.end());
}

void SearchEngine::save(const std::filesystem::path& path) const {
    const std::string bytes = save_bytes();
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write state file '" + path.string() + "'");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorCode::IoError, "write to '" + path.string() + "' failed");
}

SearchEngine SearchEngine::restore_bytes(std::string_view bytes, FormalRelation relation,
                                         std::shared_ptr<const ItemBase> items, std::vector<Example> examples,
                                         std::string task) {
    const std::span<const std::uint8_t> all(reinterpret_cast<const std::uint8_t*>(bytes.data()), bytes.size());
    if (all.size() < 16) throw Error(ErrorCode::CorruptFile, "state file truncated");
    {
        ByteReader head(all);
        if (head.u32() != kMagic) throw Error(ErrorCode::CorruptFile, "not a search state file");
        if (const auto v = head.u32(); v != kVersion) {
            throw Error(ErrorCode::VersionMismatch, "state file version " + std::to_string(v) + " is not supported");
        }
    }
    const auto payload = all.first(all.size() - 8);
    ByteReader tail(all.last(8));
    if (checksum(payload) != tail.u64()) throw Error(ErrorCode::CorruptFile, "state file checksum mismatch");

    ByteReader r(payload);
    r.u32();
    r.u32();
    r.u64();
    const SearchConfig config = read_config(r);
    SearchEngine e(std::move(relation), std::move(items), std::move(examples), config, std::move(task));
    {
        std::istringstream rng(r.str());
        rng >> e.rng_;
        if (!rng) throw Error(ErrorCode::CorruptFile, "bad RNG state");
    }
    if (r.u64() != e.items_->fingerprint()) {
        throw Error(ErrorCode::InvalidArgument, "state file was saved against a different item base");
    }
    if (r.u64() != e.examples_fingerprint()) {
        throw Error(ErrorCode::InvalidArgument, "state file was saved against different examples");
    }
    e.iterations_ = r.u64();
    e.rejected_ = r.u64();
    e.elapsed_ms_ = r.f64();
    const std::uint32_t patches = r.u32();
    for (std::uint32_t i = 0; i < patches; ++i) e.patches_.push_back(read_code(r));
    const std::uint32_t solutions = r.u32();
    for (std::uint32_t i = 0; i < solutions; ++i) e.solution_nodes_.push_back(r.u32());

    const std::uint32_t count = r.u32();
    if (count == 0) throw Error(ErrorCode::CorruptFile, "state file has no root");
    const std::size_t item_limit = e.items_->size() + e.patches_.size();
    for (std::uint32_t i = 0; i < count; ++i) {
        const NodeId parent = r.u32();
        const std::uint32_t item = r.u32();
        const bool root = i == 0;
        if (root != (parent == kNoNode) || (!root && (parent >= i || item >= item_limit))) {
            throw Error(ErrorCode::CorruptFile, "state file node table is inconsistent");
        }
        SearchNode* n = nullptr;
        if (root) {
            n = &e.tree_[SearchTree::root()];
        } else {
            n = &e.tree_[e.tree_.add_child(parent, item, 0.0)];
        }
        n->n = r.u64();
        n->r = r.f64();
        n->u = r.f64();
        n->reward = r.f64();
        const std::uint8_t flags = r.u8();
        n->expanded = flags & 1;
        n->closed = flags & 2;
        n->solution = flags & 4;
    }
    if (!r.at_end()) throw Error(ErrorCode::CorruptFile, "trailing bytes in state file");
    for (NodeId id : e.solution_nodes_) {
        if (id >= count) throw Error(ErrorCode::CorruptFile, "solution refers to a missing node");
    }
    return e;
}

SearchEngine SearchEngine::restore(const std::filesystem::path& path, FormalRelation relation,
                                   std::shared_ptr<const ItemBase> items, std::vector<Example> examples,
                                   std::string task) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot open state file '" + path.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return restore_bytes(ss.str(), std::move(relation), std::move(items), std::move(examples), std::move(task));
}

// ---------------------------------------------------------------------------
// Reports

namespace {

std::string num(double x) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, end);
}

void indent_code(std::ostringstream& out, const Code& code, const FormalField& field) {
    std::istringstream lines(decompile(code, field.fsl()));
    std::string line;
    while (std::getline(lines, line)) out << "  " << line << "\n";
}

}  // namespace

std::string format_config(const SearchConfig& c) {
    std::ostringstream out;
    out << "f=" << num(c.f) << " g=" << num(c.g) << " h=" << num(c.h) << " discount=" << num(c.discount)
        << " depth=" << c.max_depth << " width=" << c.width << " budget=" << c.node_budget
        << " max_solutions=" << c.max_solutions << " prune=" << (c.prune_duplicates ? 1 : 0)
        << " patch=" << (c.patch ? 1 : 0);
    return out.str();
}

std::string format_report(const SearchOutcome& o, const FormalField& field, bool include_timing) {
    std::ostringstream out;
    out << "task " << (o.task.empty() ? "-" : o.task) << "\n";
    out << "seed " << o.config.seed << "\n";
    out << "config " << format_config(o.config) << "\n";
    out << "status " << (o.solved() ? "solved" : "unsolved") << "\n";
    out << "nodes " << o.nodes_expanded << "\n";
    out << "iterations " << o.iterations << "\n";
    if (include_timing) out << "wall_time_ms " << static_cast<long long>(std::llround(o.wall_time_ms)) << "\n";
    out << "rejected " << o.rejected << "\n";
    for (std::size_t i = 0; i < o.solutions.size(); ++i) {
        const auto& s = o.solutions[i];
        out << "solution " << i + 1 << " exact";
        for (double e : s.exact) out << ' ' << num(e);
        out << "\n";
        indent_code(out, s.snippet, field);
    }
    if (o.best_partial) {
        out << "best_partial reward " << num(o.best_reward) << "\n";
        indent_code(out, *o.best_partial, field);
    }
    out << "end\n";
    return out.str();
}

}  // namespace ff

#include "ff/valuation.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

namespace ff {

namespace {

const Tensor& range_tensor(const Value& v) {
    if (!v.is_tensor()) throw Error(ErrorCode::TypeMismatch, "evaluation expects tensor values");
    return v.as_tensor();
}

double cell(const Tensor& t, std::size_t i) {
    return t.is_real() ? t.reals()[i] : static_cast<double>(t.ints()[i]);
}

}  // namespace

double evaluate_exact(const Value& yhat, const Value& y) {
    if (yhat.is_error() || y.is_error()) return 0.0;
    const Tensor& a = range_tensor(yhat);
    const Tensor& b = range_tensor(y);
    if (a.shape != b.shape) return 0.0;
    const std::size_t n = a.cell_count();
    for (std::size_t i = 0; i < n; ++i) {
        if (cell(a, i) != cell(b, i)) return 0.0;
    }
    return 1.0;
}

double evaluate_cells(const Value& yhat, const Value& y) {
    if (yhat.is_error() || y.is_error()) return 0.0;
    const Tensor& a = range_tensor(yhat);
    const Tensor& b = range_tensor(y);
    if (a.shape != b.shape) return 0.0;
    const std::size_t n = a.cell_count();
    if (n == 0) return 1.0;
    std::size_t same = 0;
    for (std::size_t i = 0; i < n; ++i) same += cell(a, i) == cell(b, i);
    return static_cast<double>(same) / static_cast<double>(n);
}

double aggregate_loss(std::span<const double> scores) {
    if (scores.empty()) throw Error(ErrorCode::EmptyInput, "no scores to aggregate");
    const double sum = std::accumulate(scores.begin(), scores.end(), 0.0);
    return 1.0 - sum / static_cast<double>(scores.size());
}

const std::array<std::string_view, kValueDims>& feature_names() {
    static const std::array<std::string_view, kValueDims> names{
        "cell_worst",  "cell_mean",  "cell_best",         "improve_worst", "improve_mean",
        "improve_best", "exact_worst", "exact_mean",     "exact_best",    "no_error_fraction",
        "length",      "error_flag", "bias"};
    return names;
}

ValueVector assemble_value(std::span<const ExampleOutcome> outcomes, std::span<const Value> targets, std::size_t items,
                           ValueOptions options) {
    ValueVector v;
    v[kBias] = 1.0;
    const std::size_t depth = std::max<std::size_t>(options.max_depth, 1);
    v[kLength] = std::min(1.0, static_cast<double>(items) / static_cast<double>(depth));
    if (outcomes.empty()) {
        v[kErrorFlag] = 1.0;
        return v;
    }

    struct Stat {
        double worst = 1.0, sum = 0.0, best = -1.0;
        void add(double x) {
            worst = std::min(worst, x);
            best = std::max(best, x);
            sum += x;
        }
    };
    Stat cells, improve, exact;
    std::size_t clean = 0;
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        const auto& o = outcomes[i];
        double c = 0.0, d = 0.0, e = 0.0;
        if (!o.error) {
            ++clean;
            c = evaluate_cells(o.final, targets[i]);
            e = evaluate_exact(o.final, targets[i]);
            if (o.previous) d = c - evaluate_cells(*o.previous, targets[i]);
        }
        cells.add(c);
        improve.add(d);
        exact.add(e);
    }
    const double n = static_cast<double>(outcomes.size());
    v[kCellWorst] = cells.worst;
    v[kCellMean] = cells.sum / n;
    v[kCellBest] = cells.best;
    v[kImproveWorst] = improve.worst;
    v[kImproveMean] = improve.sum / n;
    v[kImproveBest] = improve.best;
    v[kExactWorst] = exact.worst;
    v[kExactMean] = exact.sum / n;
    v[kExactBest] = exact.best;
    v[kNoErrorFraction] = static_cast<double>(clean) / n;
    v[kErrorFlag] = clean == 0 ? 1.0 : 0.0;
    return v;
}

std::size_t count_items(std::span<const Opcode> code, const FormalField& field) {
    std::size_t n = 0;
    for (const auto& op : code) {
        if (!op.is_call()) continue;
        const Primitive& p = field.fsl().get(op.primitive);
        if (!p.is_stack_op() && field.types().conforms(p.signature.ret, field.range().type)) ++n;
    }
    return n;
}

ExampleOutcome outcome_of(const ExecutionTrace& trace, std::size_t code_length) {
    ExampleOutcome o;
    if (!trace.ok() || trace.results.empty() || trace.results.back().index + 1 != code_length) return o;
    o.error = false;
    o.final = trace.results.back().value;
    if (trace.results.size() >= 2) o.previous = trace.results[trace.results.size() - 2].value;
    return o;
}

ValueVector value(std::span<const Example> examples, std::span<const Opcode> snippet, const FormalField& field,
                  ValueOptions options) {
    std::vector<ExampleOutcome> outcomes;
    std::vector<Value> targets;
    outcomes.reserve(examples.size());
    for (const auto& ex : examples) {
        outcomes.push_back(outcome_of(run_code(field, ex.input, snippet), snippet.size()));
        targets.push_back(ex.output);
    }
    return assemble_value(outcomes, targets, count_items(snippet, field), options);
}

std::string_view to_string(TrainingSource s) noexcept {
    switch (s) {
    case TrainingSource::Codebase: return "codebase";
    case TrainingSource::MutatedSnippet: return "mutated-snippet";
    case TrainingSource::WrongDomain: return "wrong-domain-element";
    }
    return "unknown";
}

// ---------------------------------------------------------------------------
// Reward dataset

namespace {

std::size_t pick(std::mt19937_64& rng, std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

// One random edit: swap a typed call for another typed primitive, drop an
// opcode, insert a primitive, or swap a constant for another observed one.
Code random_mutation(const Code& code, const Fsl& fsl, const ConstantPool& pool, std::mt19937_64& rng) {
    std::vector<PrimitiveId> typed, any;
    for (std::size_t k = 0; k < fsl.size(); ++k) {
        const PrimitiveId id{static_cast<std::uint16_t>(k)};
        const Primitive& p = fsl.get(id);
        if (p.name == kernel::kHcf) continue;
        any.push_back(id);
        if (!p.is_stack_op()) typed.push_back(id);
    }
    for (int attempt = 0; attempt < 16; ++attempt) {
        Code out = code;
        switch (pick(rng, 4)) {
        case 0: {
            const std::size_t i = pick(rng, out.size());
            if (!out[i].is_call() || typed.empty()) continue;
            out[i] = Opcode::call(typed[pick(rng, typed.size())]);
            break;
        }
        case 1:
            if (out.size() < 2) continue;
            out.erase(out.begin() + static_cast<std::ptrdiff_t>(pick(rng, out.size())));
            break;
        case 2:
            out.insert(out.begin() + static_cast<std::ptrdiff_t>(pick(rng, out.size() + 1)),
                       Opcode::call(any[pick(rng, any.size())]));
            break;
        default: {
            const std::size_t i = pick(rng, out.size());
            if (!out[i].is_push()) continue;
            auto alts = pool.values_of(out[i].constant.type());
            if (alts.empty()) continue;
            out[i] = Opcode::push(alts[pick(rng, alts.size())]);
            break;
        }
        }
        if (out != code) return out;
    }
    Code out = code;
    out.insert(out.begin(), Opcode::call(fsl.require(kernel::kDropTop)));
    return out;
}

}  // namespace

std::vector<TrainingExample> build_reward_dataset(const Codebase& codebase, DatasetOptions options) {
    if (codebase.size() < 2) {
        throw Error(ErrorCode::InsufficientCodebase, "reward dataset needs at least two codebase entries");
    }
    const FormalField& field = codebase.field();
    const ConstantPool pool = ConstantPool::collect(codebase);
    std::mt19937_64 rng(options.seed);
    std::vector<TrainingExample> out;

    for (std::size_t i = 0; i < codebase.size(); ++i) {
        const Code& snippet = codebase.entry(i).snippet;
        const Example& own = codebase.example_of(i);
        out.push_back({value(std::span(&own, 1), snippet, field, options.value), 1.0, TrainingSource::Codebase});

        for (std::size_t k = 0; k < options.negatives_per_positive; ++k) {
            TrainingExample neg;
            if (k % 2 == 0) {
                const Code mutant = random_mutation(snippet, field.fsl(), pool, rng);
                neg = {value(std::span(&own, 1), mutant, field, options.value), 0.0, TrainingSource::MutatedSnippet};
            } else {
                std::size_t j = pick(rng, codebase.size() - 1);
                if (j >= i) ++j;
                const Example& other = codebase.example_of(j);
                neg = {value(std::span(&other, 1), snippet, field, options.value), 0.0, TrainingSource::WrongDomain};
            }
            if (neg.value[kExactBest] >= 1.0) continue;
            out.push_back(neg);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Boosted trees

double RegressionTree::predict(const ValueVector& v) const {
    if (nodes.empty()) return 0.0;
    int at = 0;
    while (nodes[static_cast<std::size_t>(at)].feature >= 0) {
        const TreeNode& n = nodes[static_cast<std::size_t>(at)];
        at = v[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right;
    }
    return nodes[static_cast<std::size_t>(at)].value;
}

namespace {

class TreeBuilder {
public:
    TreeBuilder(std::span<const TrainingExample> data, std::span<const double> targets, const BoostingOptions& opt)
        : data_(data), targets_(targets), opt_(opt) {}

    RegressionTree build() {
        std::vector<std::size_t> idx(data_.size());
        std::iota(idx.begin(), idx.end(), 0);
        RegressionTree tree;
        grow(tree, idx, 0);
        return tree;
    }

private:
    double mean(const std::vector<std::size_t>& idx) const {
        double s = 0.0;
        for (auto i : idx) s += targets_[i];
        return idx.empty() ? 0.0 : s / static_cast<double>(idx.size());
    }

    int grow(RegressionTree& tree, const std::vector<std::size_t>& idx, std::size_t depth) {
        const int id = static_cast<int>(tree.nodes.size());
        tree.nodes.push_back({-1, 0.0, -1, -1, mean(idx)});
        if (depth >= opt_.max_depth || idx.size() < 2 * opt_.min_leaf) return id;

        double total = 0.0, total_sq = 0.0;
        for (auto i : idx) {
            total += targets_[i];
            total_sq += targets_[i] * targets_[i];
        }
        const double n = static_cast<double>(idx.size());
        const double parent_sse = total_sq - total * total / n;

        int best_feature = -1;
        double best_threshold = 0.0, best_sse = parent_sse - 1e-12;
        std::vector<std::size_t> order = idx;
        for (std::size_t f = 0; f < kValueDims; ++f) {
            std::stable_sort(order.begin(), order.end(),
                             [&](std::size_t a, std::size_t b) { return data_[a].value[f] < data_[b].value[f]; });
            double left = 0.0, left_sq = 0.0;
            for (std::size_t k = 0; k + 1 < order.size(); ++k) {
                const double t = targets_[order[k]];
                left += t;
                left_sq += t * t;
                const double here = data_[order[k]].value[f];
                const double next = data_[order[k + 1]].value[f];
                const std::size_t nl = k + 1, nr = order.size() - nl;
                if (here == next || nl < opt_.min_leaf || nr < opt_.min_leaf) continue;
                const double right = total - left, right_sq = total_sq - left_sq;
                const double sse = (left_sq - left * left / static_cast<double>(nl)) +
                                   (right_sq - right * right / static_cast<double>(nr));
                if (sse < best_sse) {
                    best_sse = sse;
                    best_feature = static_cast<int>(f);
                    best_threshold = here + (next - here) / 2.0;
                }
            }
        }
        if (best_feature < 0) return id;

        std::vector<std::size_t> lhs, rhs;
        for (auto i : idx) {
            (data_[i].value[static_cast<std::size_t>(best_feature)] <= best_threshold ? lhs : rhs).push_back(i);
        }
        const int l = grow(tree, lhs, depth + 1);
        const int r = grow(tree, rhs, depth + 1);
        TreeNode& node = tree.nodes[static_cast<std::size_t>(id)];
        node.feature = best_feature;
        node.threshold = best_threshold;
        node.left = l;
        node.right = r;
        return id;
    }

    std::span<const TrainingExample> data_;
    std::span<const double> targets_;
    const BoostingOptions& opt_;
};

// Handcrafted weights over (mean cell, best exact, mean improvement, no-error).
constexpr double kWeightCell = 0.45;
constexpr double kWeightExact = 0.25;
constexpr double kWeightImprove = 0.15;
constexpr double kWeightClean = 0.15;

std::string fmt(double x) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, end);
}

double parse_double(const std::string& s) {
    double x = 0.0;
    auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
    if (ec != std::errc{} || end != s.data() + s.size()) throw Error(ErrorCode::ParseError, "bad number '" + s + "'");
    return x;
}

}  // namespace

std::string_view to_string(RewardModel::Kind k) noexcept {
    return k == RewardModel::Kind::HandcraftedLinear ? "handcrafted-linear" : "trained-tree-ensemble";
}

RewardModel RewardModel::handcrafted() { return RewardModel{}; }

RewardModel RewardModel::train(std::span<const TrainingExample> dataset, BoostingOptions options) {
    bool pos = false, neg = false;
    for (const auto& ex : dataset) (ex.label >= 0.5 ? pos : neg) = true;
    if (!pos || !neg) throw Error(ErrorCode::DegenerateDataset, "training data holds a single label class");

    RewardModel m;
    m.kind_ = Kind::TrainedTreeEnsemble;
    m.learning_rate_ = options.learning_rate;
    double sum = 0.0;
    for (const auto& ex : dataset) sum += ex.label;
    m.base_ = sum / static_cast<double>(dataset.size());

    std::vector<double> pred(dataset.size(), m.base_), residual(dataset.size());
    for (std::size_t t = 0; t < options.trees; ++t) {
        for (std::size_t i = 0; i < dataset.size(); ++i) residual[i] = dataset[i].label - pred[i];
        RegressionTree tree = TreeBuilder(dataset, residual, options).build();
        for (std::size_t i = 0; i < dataset.size(); ++i) pred[i] += options.learning_rate * tree.predict(dataset[i].value);
        m.trees_.push_back(std::move(tree));
    }
    return m;
}

double RewardModel::raw(const ValueVector& v) const {
    if (kind_ == Kind::HandcraftedLinear) {
        if (v[kErrorFlag] >= 0.5) return 0.0;
        return kWeightCell * v[kCellMean] + kWeightExact * v[kExactBest] +
               kWeightImprove * (v[kImproveMean] + 1.0) / 2.0 + kWeightClean * v[kNoErrorFraction];
    }
    double out = base_;
    for (const auto& t : trees_) out += learning_rate_ * t.predict(v);
    return out;
}

double RewardModel::reward(const ValueVector& v) const {
    const double r = raw(v);
    if (!std::isfinite(r)) return 0.0;
    return std::clamp(r, 0.0, 1.0);
}

std::string RewardModel::serialize() const {
    std::ostringstream out;
    out << "ff-reward-model 1\n";
    out << "kind " << to_string(kind_) << "\n";
    out << "features " << kValueDims;
    for (auto n : feature_names()) out << ' ' << n;
    out << "\n";
    if (kind_ == Kind::HandcraftedLinear) {
        out << "weights " << fmt(kWeightCell) << ' ' << fmt(kWeightExact) << ' ' << fmt(kWeightImprove) << ' '
            << fmt(kWeightClean) << "\n";
        return out.str();
    }
    out << "base " << fmt(base_) << "\n";
    out << "learning_rate " << fmt(learning_rate_) << "\n";
    out << "trees " << trees_.size() << "\n";
    for (const auto& t : trees_) {
        out << "tree " << t.nodes.size() << "\n";
        for (const auto& n : t.nodes) {
            out << n.feature << ' ' << fmt(n.threshold) << ' ' << n.left << ' ' << n.right << ' ' << fmt(n.value) << "\n";
        }
    }
    return out.str();
}

RewardModel RewardModel::parse(std::string_view text) {
    std::istringstream in{std::string(text)};
    auto expect = [&](std::string_view word) {
        std::string w;
        if (!(in >> w) || w != word) throw Error(ErrorCode::ParseError, "reward model: expected '" + std::string(word) + "'");
    };
    auto token = [&] {
        std::string w;
        if (!(in >> w)) throw Error(ErrorCode::ParseError, "reward model: unexpected end of input");
        return w;
    };
    auto integer = [&] {
        const std::string w = token();
        long long x = 0;
        auto [end, ec] = std::from_chars(w.data(), w.data() + w.size(), x);
        if (ec != std::errc{} || end != w.data() + w.size()) throw Error(ErrorCode::ParseError, "bad integer '" + w + "'");
        return x;
    };

    expect("ff-reward-model");
    if (token() != "1") throw Error(ErrorCode::VersionMismatch, "unsupported reward model version");
    expect("kind");
    const std::string kind = token();
    expect("features");
    if (integer() != static_cast<long long>(kValueDims)) throw Error(ErrorCode::ParseError, "reward model feature count differs");
    for (auto n : feature_names()) {
        if (token() != n) throw Error(ErrorCode::ParseError, "reward model feature layout differs");
    }
    RewardModel m;
    if (kind == to_string(Kind::HandcraftedLinear)) {
        expect("weights");
        for (int i = 0; i < 4; ++i) token();
        return m;
    }
    if (kind != to_string(Kind::TrainedTreeEnsemble)) throw Error(ErrorCode::ParseError, "unknown reward model kind '" + kind + "'");
    m.kind_ = Kind::TrainedTreeEnsemble;
    expect("base");
    m.base_ = parse_double(token());
    expect("learning_rate");
    m.learning_rate_ = parse_double(token());
    expect("trees");
    const long long trees = integer();
    if (trees < 0) throw Error(ErrorCode::ParseError, "negative tree count");
    for (long long t = 0; t < trees; ++t) {
        expect("tree");
        const long long count = integer();
        if (count < 1) throw Error(ErrorCode::ParseError, "empty tree");
        RegressionTree tree;
        for (long long k = 0; k < count; ++k) {
            TreeNode n;
            n.feature = static_cast<int>(integer());
            n.threshold = parse_double(token());
            n.left = static_cast<int>(integer());
            n.right = static_cast<int>(integer());
            n.value = parse_double(token());
            const bool leaf = n.feature < 0;
            if (!leaf && (n.feature >= static_cast<int>(kValueDims) || n.left <= k || n.right <= k || n.left >= count ||
                          n.right >= count)) {
                throw Error(ErrorCode::ParseError, "malformed tree node");
            }
            tree.nodes.push_back(n);
        }
        m.trees_.push_back(std::move(tree));
    }
    return m;
}

void RewardModel::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write reward model '" + path.string() + "'");
    out << serialize();
    if (!out) throw Error(ErrorCode::IoError, "write to '" + path.string() + "' failed");
}

RewardModel RewardModel::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::MissingFile, "cannot open reward model '" + path.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

double auc(std::span<const double> scores, std::span<const double> labels) {
    if (scores.size() != labels.size()) throw Error(ErrorCode::InvalidArgument, "scores and labels differ in length");
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
    double rank_sum = 0.0;
    std::size_t pos = 0;
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
        const double avg_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        for (std::size_t k = i; k < j; ++k) {
            if (labels[order[k]] >= 0.5) {
                rank_sum += avg_rank;
                ++pos;
            }
        }
        i = j;
    }
    const std::size_t neg = scores.size() - pos;
    if (pos == 0 || neg == 0) throw Error(ErrorCode::DegenerateDataset, "AUC needs both label classes");
    const double p = static_cast<double>(pos);
    return (rank_sum - p * (p + 1.0) / 2.0) / (p * static_cast<double>(neg));
}

HoldoutSplit split_holdout(std::span<const TrainingExample> dataset, double fraction, std::uint64_t seed) {
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
    std::vector<std::size_t> pos, neg;
    for (std::size_t i = 0; i < dataset.size(); ++i) (dataset[i].label >= 0.5 ? pos : neg).push_back(i);
    std::vector<bool> held(dataset.size(), false);
    for (auto* cls : {&pos, &neg}) {
        std::shuffle(cls->begin(), cls->end(), rng);
        std::size_t take = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(cls->size())));
        if (cls->size() >= 2) take = std::clamp<std::size_t>(take, 1, cls->size() - 1);
        for (std::size_t k = 0; k < take; ++k) held[(*cls)[k]] = true;
    }
    HoldoutSplit s;
    for (std::size_t i = 0; i < dataset.size(); ++i) (held[i] ? s.test : s.train).push_back(dataset[i]);
    return s;
}

RewardTrainingReport train_reward_model(const Codebase& codebase, DatasetOptions options, BoostingOptions boosting,
                                        double holdout_fraction) {
    const auto dataset = build_reward_dataset(codebase, options);
    auto split = split_holdout(dataset, holdout_fraction, options.seed);
    RewardTrainingReport report{RewardModel::train(split.train, boosting)};
    for (const auto& ex : dataset) (ex.label >= 0.5 ? report.positives : report.negatives) += 1;
    report.held_out = split.test.size();
    std::vector<double> scores, labels;
    for (const auto& ex : split.test) {
        scores.push_back(report.model.reward(ex.value));
        labels.push_back(ex.label);
    }
    report.held_out_auc = auc(scores, labels);
    return report;
}

}  // namespace ff

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ff/codebase.hpp"

namespace ff {

// e(yhat, y). Both score error values 0 and throw type-mismatch when a
// non-error argument is not a tensor.
double evaluate_exact(const Value& yhat, const Value& y);
double evaluate_cells(const Value& yhat, const Value& y);

// 1 - mean(score); throws empty-input.
double aggregate_loss(std::span<const double> scores);

inline constexpr std::size_t kValueDims = 13;

enum Feature : std::size_t {
    kCellWorst,
    kCellMean,
    kCellBest,
    kImproveWorst,
    kImproveMean,
    kImproveBest,
    kExactWorst,
    kExactMean,
    kExactBest,
    kNoErrorFraction,
    kLength,
    kErrorFlag,
    kBias,
};

const std::array<std::string_view, kValueDims>& feature_names();

struct ValueVector {
    std::array<double, kValueDims> components{};

    double operator[](std::size_t i) const { return components[i]; }
    double& operator[](std::size_t i) { return components[i]; }
    bool operator==(const ValueVector&) const = default;
};

// What one example contributed: the final Y value and the one before it
// (absent when the snippet produced a single item).
struct ExampleOutcome {
    bool error = true;
    Value final;
    std::optional<Value> previous;
};

struct ValueOptions {
    std::size_t max_depth = 8;
};

ValueVector assemble_value(std::span<const ExampleOutcome> outcomes, std::span<const Value> targets, std::size_t items,
                           ValueOptions options = {});

// Number of typed calls in `code` returning a Y type, i.e. its item count.
std::size_t count_items(std::span<const Opcode> code, const FormalField& field);

ExampleOutcome outcome_of(const ExecutionTrace& trace, std::size_t code_length);

// v(x, p, y~): runs `snippet` on every example and folds the traces into
// the feature layout above. Never throws on execution failures.
ValueVector value(std::span<const Example> examples, std::span<const Opcode> snippet, const FormalField& field,
                  ValueOptions options = {});

enum class TrainingSource : std::uint8_t { Codebase, MutatedSnippet, WrongDomain };
std::string_view to_string(TrainingSource s) noexcept;

struct TrainingExample {
    ValueVector value;
    double label = 0.0;
    TrainingSource source = TrainingSource::Codebase;
};

struct DatasetOptions {
    std::size_t negatives_per_positive = 2;
    std::uint64_t seed = 0;
    ValueOptions value;
};

// One positive per entry; negatives alternate between a random single
// mutation of the entry's snippet and the snippet run on another entry's
// example. Negatives that happen to solve exactly are dropped.
std::vector<TrainingExample> build_reward_dataset(const Codebase& codebase, DatasetOptions options = {});

// Regression tree over value vectors, stored as a flat node array.
struct TreeNode {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;
};

struct RegressionTree {
    std::vector<TreeNode> nodes;
    double predict(const ValueVector& v) const;
};

struct BoostingOptions {
    std::size_t trees = 100;
    std::size_t max_depth = 3;
    double learning_rate = 0.1;
    std::size_t min_leaf = 1;
};

class RewardModel {
public:
    enum class Kind : std::uint8_t { HandcraftedLinear, TrainedTreeEnsemble };

    static RewardModel handcrafted();
    static RewardModel train(std::span<const TrainingExample> dataset, BoostingOptions options = {});

    Kind kind() const noexcept { return kind_; }
    std::span<const RegressionTree> trees() const noexcept { return trees_; }

    // w(m), always within [0, 1].
    double reward(const ValueVector& m) const;
    double raw(const ValueVector& m) const;

    std::string serialize() const;
    static RewardModel parse(std::string_view text);
    void save(const std::filesystem::path& path) const;
    static RewardModel load(const std::filesystem::path& path);

private:
    Kind kind_ = Kind::HandcraftedLinear;
    double base_ = 0.0;
    double learning_rate_ = 0.1;
    std::vector<RegressionTree> trees_;
};

std::string_view to_string(RewardModel::Kind k) noexcept;

// Area under the ROC curve by the rank-sum statistic, ties counted half.
double auc(std::span<const double> scores, std::span<const double> labels);

struct HoldoutSplit {
    std::vector<TrainingExample> train;
    std::vector<TrainingExample> test;
};

// Seeded split stratified by label; `fraction` of each class is held out
// (at least one of each when the class has two or more members).
HoldoutSplit split_holdout(std::span<const TrainingExample> dataset, double fraction, std::uint64_t seed);

struct RewardTrainingReport {
    RewardModel model;
    std::size_t positives = 0;
    std::size_t negatives = 0;
    std::size_t held_out = 0;
    double held_out_auc = 0.0;
};

// Dataset, stratified hold-out, boosting, AUC on the held-out part.
RewardTrainingReport train_reward_model(const Codebase& codebase, DatasetOptions options = {},
                                        BoostingOptions boosting = {}, double holdout_fraction = 0.25);

}  // namespace ff

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"

namespace {

template <class T>
void override(T& target, const std::optional<T>& value) {
    if (value) target = *value;
}

}  // namespace

int main(int argc, char** argv) {
    using namespace ff::cli;

    CLI::App app{"ff: formal fields toolkit (typed stack VM, code items, MCTS code search)"};
    app.require_subcommand(1);

    std::string field = "arc";
    app.add_option("--field", field, "field name or field manifest path")->envname("FF_FIELD");

    // exec
    auto* exec = app.add_subcommand("exec", "run a snippet on one input and print its trace");
    std::string snippet, input, example = "train:0";
    exec->add_option("snippet", snippet, "snippet source file")->required();
    exec->add_option("input", input, "grid JSON or ARC task file")->required();
    exec->add_option("--example", example, "example of a task file, e.g. train:0 or test:1");

    // split
    auto* split = app.add_subcommand("split", "split every codebase snippet into code items");
    std::string codebase;
    split->add_option("--codebase", codebase, "codebase file")->required()->envname("FF_CODEBASE");

    // mutate
    auto* mutate = app.add_subcommand("mutate", "build the item base and report its composition");
    std::size_t budget = 200;
    std::uint64_t seed = 0;
    bool list = false;
    mutate->add_option("--codebase", codebase, "codebase file")->required()->envname("FF_CODEBASE");
    mutate->add_option("--budget", budget, "mutants per origin class");
    mutate->add_option("--seed", seed, "sampling seed")->envname("FF_SEED");
    mutate->add_flag("--list", list, "print every item");

    // train-reward
    auto* train = app.add_subcommand("train-reward", "train a reward model from the codebase");
    std::string model_out;
    std::size_t negatives = 2;
    train->add_option("--codebase", codebase, "codebase file")->required()->envname("FF_CODEBASE");
    train->add_option("--out", model_out, "model file to write")->required();
    train->add_option("--seed", seed, "dataset and split seed")->envname("FF_SEED");
    train->add_option("--negatives", negatives, "negatives per positive");

    // search
    auto* search = app.add_subcommand("search", "search for snippets solving ARC tasks");
    search->set_help_flag("--help", "print this help message and exit");
    std::optional<std::string> manifest, s_codebase, s_reward, s_out;
    std::vector<std::string> s_tasks;
    std::optional<std::size_t> s_budget, s_depth, s_width, s_jobs;
    std::optional<double> s_discount, s_f, s_g, s_h;
    std::optional<std::uint64_t> s_seed;
    bool s_append = false;
    search->add_option("--manifest", manifest, "run manifest (JSON)");
    search->add_option("--tasks", s_tasks, "task files or directories")->envname("FF_TASKS");
    search->add_option("--codebase", s_codebase, "codebase file")->envname("FF_CODEBASE");
    search->add_option("--reward-model", s_reward, "trained reward model")->envname("FF_REWARD_MODEL");
    search->add_option("--budget", s_budget, "node budget per task")->envname("FF_BUDGET");
    search->add_option("--depth", s_depth, "maximum items per snippet")->envname("FF_DEPTH");
    search->add_option("--width", s_width, "expansion width")->envname("FF_WIDTH");
    search->add_option("--discount", s_discount, "backpropagation discount")->envname("FF_DISCOUNT");
    search->add_option("--f", s_f, "UCB constant f")->envname("FF_F");
    search->add_option("--g", s_g, "UCB constant g")->envname("FF_G");
    search->add_option("--h", s_h, "UCB constant h")->envname("FF_H");
    search->add_option("--seed", s_seed, "search seed")->envname("FF_SEED");
    search->add_option("--jobs", s_jobs, "tasks searched in parallel")->envname("FF_JOBS");
    search->add_flag("--append-solutions", s_append, "append found snippets to the codebase")->envname("FF_APPEND_SOLUTIONS");
    search->add_option("--out", s_out, "report directory")->envname("FF_OUT");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    if (*exec) return cmd_exec(field, snippet, input, example, std::cout, std::cerr);
    if (*split) return cmd_split(field, codebase, std::cout, std::cerr);
    if (*mutate) return cmd_mutate(field, codebase, ff::MutationBudget::uniform(budget), seed, list, std::cout, std::cerr);
    if (*train) return cmd_train_reward(field, codebase, model_out, seed, negatives, std::cout, std::cerr);

    RunManifest m;
    try {
        if (manifest) m = load_run_manifest(*manifest);
    } catch (const ff::Error& e) {
        std::cerr << "error: " << ff::to_string(e.code()) << ": " << e.what() << "\n";
        return e.code() == ff::ErrorCode::MissingFile ? kExitUsage : kExitFailure;
    }
    if (app.get_option("--field")->count() > 0 || std::getenv("FF_FIELD")) m.field = field;
    if (!s_tasks.empty()) m.tasks.assign(s_tasks.begin(), s_tasks.end());
    if (s_codebase) m.codebase = *s_codebase;
    if (s_reward) m.reward_model = *s_reward;
    if (s_out) m.out = *s_out;
    override(m.config.node_budget, s_budget);
    override(m.config.max_depth, s_depth);
    override(m.config.width, s_width);
    override(m.config.discount, s_discount);
    override(m.config.f, s_f);
    override(m.config.g, s_g);
    override(m.config.h, s_h);
    override(m.config.seed, s_seed);
    override(m.jobs, s_jobs);
    if (s_append) m.append_solutions = true;
    return cmd_search(m, std::cout, std::cerr);
}

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ff/codebase.hpp"
#include "ff/search.hpp"

namespace ff::cli {

namespace fs = std::filesystem;

// Exit codes shared by every command.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

struct RunManifest {
    std::string field = "arc";  // "arc" or a field manifest path
    std::vector<fs::path> tasks;
    fs::path codebase;
    std::optional<fs::path> reward_model;
    fs::path out = "ff-out";
    SearchConfig config;
    MutationBudget mutation;
    std::size_t jobs = 1;
    bool append_solutions = false;
};

// Relative paths resolve against the manifest's directory.
RunManifest load_run_manifest(const fs::path& path);
std::string describe(const RunManifest& m);

FieldPtr resolve_field(const std::string& field);
// Example ids in a codebase resolve against the sibling "tasks" directory.
fs::path codebase_tasks_dir(const fs::path& codebase);
Codebase load_codebase(const fs::path& path, FieldPtr field);

int cmd_exec(const std::string& field, const fs::path& snippet, const fs::path& input, const std::string& example,
             std::ostream& out, std::ostream& err);
int cmd_split(const std::string& field, const fs::path& codebase, std::ostream& out, std::ostream& err);
int cmd_mutate(const std::string& field, const fs::path& codebase, const MutationBudget& budget, std::uint64_t seed,
               bool list, std::ostream& out, std::ostream& err);
int cmd_train_reward(const std::string& field, const fs::path& codebase, const fs::path& out_path,
                     std::uint64_t seed, std::size_t negatives, std::ostream& out, std::ostream& err);
int cmd_search(const RunManifest& manifest, std::ostream& out, std::ostream& err);

}  // namespace ff::cli

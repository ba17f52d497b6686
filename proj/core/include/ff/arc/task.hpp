#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ff/arc/field.hpp"
#include "ff/codebase.hpp"

namespace ff::arc {

struct ArcPair {
    Grid input;
    std::optional<Grid> output;
};

struct ArcTask {
    std::string id;
    std::vector<ArcPair> train;  // outputs always present
    std::vector<ArcPair> test;
};

// Public ARC layout: {"train": [{"input": .., "output": ..}], "test": [..]}.
// Throws parse-error, invalid-color or invalid-dimensions.
ArcTask parse_task(std::string_view json_text, std::string id);
// The task id is the file stem.
ArcTask load_task(const std::filesystem::path& path);
// Every *.json under `dir`, sorted by file name.
std::vector<std::filesystem::path> task_files(const std::filesystem::path& dir);

std::string task_to_json(const ArcTask& task);

// A bare grid document, e.g. [[1,2],[3,4]].
Grid parse_grid(std::string_view json_text);

// Example ids are "<task>:train:<i>" and "<task>:test:<i>".
std::string example_id(std::string_view task, std::string_view split, std::size_t index);
std::vector<Example> train_examples(const ArcTask& task, const FormalField& field);
std::vector<Example> test_examples(const ArcTask& task, const FormalField& field);

// Resolves example ids against the given tasks.
ExampleResolver task_resolver(std::vector<ArcTask> tasks, FieldPtr field);
// Resolves "<task>:..." by loading <dir>/<task>.json on demand.
ExampleResolver directory_resolver(std::filesystem::path dir, FieldPtr field);

}  // namespace ff::arc

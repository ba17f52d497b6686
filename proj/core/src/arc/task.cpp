#include "ff/arc/task.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>

#include <json.hpp>

namespace ff::arc {

namespace {

using nlohmann::json;

Grid parse_grid(const json& j, const std::string& where) {
    if (!j.is_array()) throw Error(ErrorCode::ParseError, where + ": grid must be an array of rows");
    Grid g;
    g.height = static_cast<int>(j.size());
    if (g.height < 1 || g.height > kMaxSide) {
        throw Error(ErrorCode::InvalidDimensions, where + ": " + std::to_string(g.height) + " rows");
    }
    for (const auto& row : j) {
        if (!row.is_array()) throw Error(ErrorCode::ParseError, where + ": row must be an array");
        const int w = static_cast<int>(row.size());
        if (g.width == 0) g.width = w;
        if (w != g.width) throw Error(ErrorCode::InvalidDimensions, where + ": ragged rows");
        if (w < 1 || w > kMaxSide) throw Error(ErrorCode::InvalidDimensions, where + ": " + std::to_string(w) + " columns");
        for (const auto& cell : row) {
            if (!cell.is_number_integer()) throw Error(ErrorCode::ParseError, where + ": cells must be integers");
            const auto c = cell.get<long long>();
            if (c < 0 || c >= kColors) throw Error(ErrorCode::InvalidColor, where + ": color " + std::to_string(c));
            g.cells.push_back(static_cast<std::int32_t>(c));
        }
    }
    return g;
}

std::vector<ArcPair> parse_pairs(const json& doc, const char* key, bool need_output, const std::string& id) {
    if (!doc.contains(key) || !doc[key].is_array()) {
        throw Error(ErrorCode::ParseError, id + ": missing \"" + key + "\" array");
    }
    std::vector<ArcPair> out;
    for (std::size_t i = 0; i < doc[key].size(); ++i) {
        const auto& p = doc[key][i];
        const std::string where = id + " " + key + "[" + std::to_string(i) + "]";
        if (!p.is_object() || !p.contains("input")) throw Error(ErrorCode::ParseError, where + ": missing input");
        ArcPair pair{parse_grid(p["input"], where + ".input"), std::nullopt};
        if (p.contains("output") && !p["output"].is_null()) pair.output = parse_grid(p["output"], where + ".output");
        if (need_output && !pair.output) throw Error(ErrorCode::ParseError, where + ": missing output");
        out.push_back(std::move(pair));
    }
    if (out.empty()) throw Error(ErrorCode::ParseError, id + ": \"" + key + "\" is empty");
    return out;
}

json grid_json(const Grid& g) {
    json rows = json::array();
    for (int r = 0; r < g.height; ++r) {
        json row = json::array();
        for (int c = 0; c < g.width; ++c) row.push_back(g.at(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace

ArcTask parse_task(std::string_view json_text, std::string id) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ParseError, id + ": " + e.what());
    }
    if (!doc.is_object()) throw Error(ErrorCode::ParseError, id + ": task must be an object");
    ArcTask task;
    task.train = parse_pairs(doc, "train", true, id);
    task.test = parse_pairs(doc, "test", false, id);
    task.id = std::move(id);
    return task;
}

ArcTask load_task(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::MissingFile, "cannot open task '" + path.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_task(ss.str(), path.stem().string());
}

std::vector<std::filesystem::path> task_files(const std::filesystem::path& dir) {
    std::vector<std::filesystem::path> out;
    std::error_code ec;
    if (!std::filesystem::is_directory(dir, ec)) throw Error(ErrorCode::MissingFile, "no task directory '" + dir.string() + "'");
    for (const auto& e : std::filesystem::directory_iterator(dir)) {
        if (e.is_regular_file() && e.path().extension() == ".json") out.push_back(e.path());
    }
    std::sort(out.begin(), out.end());
    return out;
}

Grid parse_grid(std::string_view json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ParseError, std::string("grid: ") + e.what());
    }
    return parse_grid(doc, "grid");
}

std::string task_to_json(const ArcTask& task) {
    json doc;
    for (const auto* split : {&task.train, &task.test}) {
        json arr = json::array();
        for (const auto& p : *split) {
            json o;
            o["input"] = grid_json(p.input);
            if (p.output) o["output"] = grid_json(*p.output);
            arr.push_back(std::move(o));
        }
        doc[split == &task.train ? "train" : "test"] = std::move(arr);
    }
    return doc.dump();
}

std::string example_id(std::string_view task, std::string_view split, std::size_t index) {
    return std::string(task) + ":" + std::string(split) + ":" + std::to_string(index);
}

namespace {

std::vector<Example> examples_of(const ArcTask& task, const std::vector<ArcPair>& pairs, std::string_view split,
                                 const FormalField& field) {
    const TypeId grid = field.types().require("grid");
    std::vector<Example> out;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        if (!pairs[i].output) continue;
        out.push_back({example_id(task.id, split, i), grid_value(pairs[i].input, grid), grid_value(*pairs[i].output, grid)});
    }
    return out;
}

Example lookup(const ArcTask& task, std::string_view id, const FormalField& field) {
    for (const char* split : {"train", "test"}) {
        const auto& pairs = std::string_view(split) == "train" ? task.train : task.test;
        for (auto& ex : examples_of(task, pairs, split, field)) {
            if (ex.id == id) return ex;
        }
    }
    throw Error(ErrorCode::MissingFile, "no example '" + std::string(id) + "'");
}

std::string task_part(std::string_view id) {
    const auto colon = id.find(':');
    if (colon == std::string_view::npos) throw Error(ErrorCode::ParseError, "malformed example id '" + std::string(id) + "'");
    return std::string(id.substr(0, colon));
}

}  // namespace

std::vector<Example> train_examples(const ArcTask& task, const FormalField& field) {
    return examples_of(task, task.train, "train", field);
}

std::vector<Example> test_examples(const ArcTask& task, const FormalField& field) {
    return examples_of(task, task.test, "test", field);
}

ExampleResolver task_resolver(std::vector<ArcTask> tasks, FieldPtr field) {
    auto shared = std::make_shared<std::vector<ArcTask>>(std::move(tasks));
    return [shared, field](std::string_view id) {
        const std::string name = task_part(id);
        for (const auto& t : *shared) {
            if (t.id == name) return lookup(t, id, *field);
        }
        throw Error(ErrorCode::MissingFile, "no task '" + name + "' for example '" + std::string(id) + "'");
    };
}

ExampleResolver directory_resolver(std::filesystem::path dir, FieldPtr field) {
    struct Cache {
        std::mutex mu;
        std::map<std::string, ArcTask> tasks;
    };
    auto cache = std::make_shared<Cache>();
    return [cache, dir = std::move(dir), field](std::string_view id) {
        const std::string name = task_part(id);
        std::lock_guard lock(cache->mu);
        auto it = cache->tasks.find(name);
        if (it == cache->tasks.end()) it = cache->tasks.emplace(name, load_task(dir / (name + ".json"))).first;
        return lookup(it->second, id, *field);
    };
}

}  // namespace ff::arc

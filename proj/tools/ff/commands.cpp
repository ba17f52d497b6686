#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "ff/arc/field.hpp"
#include "ff/arc/relation.hpp"
#include "ff/arc/task.hpp"
#include "ff/text.hpp"

namespace ff::cli {

namespace {

using nlohmann::json;

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::MissingFile, "cannot open '" + path.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write '" + path.string() + "'");
    out << text;
}

fs::path rebase(const fs::path& base, const std::string& p) {
    fs::path path(p);
    return path.is_absolute() ? path : base / path;
}

int report_error(const Error& e, std::ostream& err) {
    err << "error: " << to_string(e.code()) << ": " << e.what() << "\n";
    switch (e.code()) {
    case ErrorCode::MissingFile:
    case ErrorCode::InvalidArgument:
        return kExitUsage;
    default:
        return kExitFailure;
    }
}

std::string one_line(const Code& code, const FormalField& field) {
    std::string text = decompile(code, field.fsl());
    std::replace(text.begin(), text.end(), '\n', ';');
    return text;
}

}  // namespace

// ---------------------------------------------------------------------------
// Manifest

RunManifest load_run_manifest(const fs::path& path) {
    json doc;
    try {
        doc = json::parse(read_file(path));
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
    }
    const fs::path base = path.parent_path();
    RunManifest m;
    try {
        if (doc.contains("field")) {
            const auto f = doc["field"].get<std::string>();
            m.field = f == "arc" ? f : rebase(base, f).string();
        }
        if (doc.contains("tasks")) {
            const auto& t = doc["tasks"];
            if (t.is_string()) {
                m.tasks.push_back(rebase(base, t.get<std::string>()));
            } else {
                for (const auto& p : t) m.tasks.push_back(rebase(base, p.get<std::string>()));
            }
        }
        if (doc.contains("codebase")) m.codebase = rebase(base, doc["codebase"].get<std::string>());
        if (doc.contains("reward_model") && !doc["reward_model"].is_null()) {
            m.reward_model = rebase(base, doc["reward_model"].get<std::string>());
        }
        if (doc.contains("out")) m.out = rebase(base, doc["out"].get<std::string>());
        m.jobs = doc.value("jobs", m.jobs);
        m.append_solutions = doc.value("append_solutions", m.append_solutions);
        m.config.seed = doc.value("seed", m.config.seed);
        if (doc.contains("search")) {
            const auto& s = doc["search"];
            m.config.node_budget = s.value("budget", m.config.node_budget);
            m.config.max_depth = s.value("depth", m.config.max_depth);
            m.config.width = s.value("width", m.config.width);
            m.config.discount = s.value("discount", m.config.discount);
            m.config.f = s.value("f", m.config.f);
            m.config.g = s.value("g", m.config.g);
            m.config.h = s.value("h", m.config.h);
            m.config.max_solutions = s.value("max_solutions", m.config.max_solutions);
            m.config.prune_duplicates = s.value("prune_duplicates", m.config.prune_duplicates);
            m.config.patch = s.value("patch", m.config.patch);
        }
        if (doc.contains("mutation_budget")) {
            const auto& b = doc["mutation_budget"];
            m.mutation.alleles = b.value("alleles", m.mutation.alleles);
            m.mutation.substitutions = b.value("substitutions", m.mutation.substitutions);
            m.mutation.insertions = b.value("insertions", m.mutation.insertions);
            m.mutation.deletions = b.value("deletions", m.mutation.deletions);
        }
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
    }
    return m;
}

std::string describe(const RunManifest& m) {
    std::ostringstream out;
    out << "field " << m.field << "\n";
    out << "codebase " << m.codebase.string() << "\n";
    out << "reward_model " << (m.reward_model ? m.reward_model->string() : std::string("handcrafted")) << "\n";
    out << "seed " << m.config.seed << "\n";
    out << "config " << format_config(m.config) << "\n";
    out << "mutation_budget alleles=" << m.mutation.alleles << " substitutions=" << m.mutation.substitutions
        << " insertions=" << m.mutation.insertions << " deletions=" << m.mutation.deletions << "\n";
    out << "jobs " << m.jobs << "\n";
    out << "append_solutions " << (m.append_solutions ? 1 : 0) << "\n";
    return out.str();
}

FieldPtr resolve_field(const std::string& field) {
    if (field == "arc") return arc::make_field();
    return load_field_manifest(read_file(field), arc::library());
}

fs::path codebase_tasks_dir(const fs::path& codebase) { return codebase.parent_path() / "tasks"; }

Codebase load_codebase(const fs::path& path, FieldPtr field) {
    return Codebase::load(path, field, arc::directory_resolver(codebase_tasks_dir(path), field));
}

// ---------------------------------------------------------------------------
// exec

int cmd_exec(const std::string& field_name, const fs::path& snippet_path, const fs::path& input_path,
             const std::string& example, std::ostream& out, std::ostream& err) {
    FieldPtr field;
    Code code;
    Value x;
    try {
        field = resolve_field(field_name);
        code = compile(read_file(snippet_path), field->fsl());
        const std::string text = read_file(input_path);
        const TypeId grid = field->types().require("grid");
        json doc;
        try {
            doc = json::parse(text);
        } catch (const json::exception& e) {
            throw Error(ErrorCode::ParseError, input_path.string() + ": " + e.what());
        }
        if (doc.is_array()) {
            x = arc::grid_value(arc::parse_grid(text), grid);
        } else {
            const auto task = arc::parse_task(text, input_path.stem().string());
            const auto colon = example.find(':');
            const std::string split = example.substr(0, colon);
            const std::size_t index = colon == std::string::npos ? 0 : std::stoul(example.substr(colon + 1));
            const auto& pairs = split == "test" ? task.test : task.train;
            if (index >= pairs.size()) throw Error(ErrorCode::InvalidArgument, "no example " + example);
            x = arc::grid_value(pairs[index].input, grid);
        }
    } catch (const Error& e) {
        return report_error(e, err);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    const auto trace = run_code(*field, x, code);
    for (const auto& r : trace.results) out << "result " << r.index << " " << format_literal(r.value, field->types()) << "\n";
    if (trace.ok()) {
        out << "status ok\n";
    } else {
        out << "status error at " << trace.error_at << ": " << to_string(trace.error.code) << ": " << trace.error.message
            << "\n";
    }
    out << "steps " << trace.executed << "\n";
    return trace.ok() ? kExitOk : kExitFailure;
}

// ---------------------------------------------------------------------------
// split / mutate

int cmd_split(const std::string& field_name, const fs::path& codebase_path, std::ostream& out, std::ostream& err) {
    try {
        auto field = resolve_field(field_name);
        const Codebase cb = load_codebase(codebase_path, field);
        for (std::size_t i = 0; i < cb.size(); ++i) {
            const auto items = split_snippet(*field, cb.example_of(i).input, cb.entry(i).snippet);
            out << "entry " << cb.entry(i).example_id << " items " << items.size() << "\n";
            for (const auto& item : items) out << "  " << one_line(item.opcodes, *field) << "\n";
        }
        return kExitOk;
    } catch (const Error& e) {
        return report_error(e, err);
    }
}

int cmd_mutate(const std::string& field_name, const fs::path& codebase_path, const MutationBudget& budget,
               std::uint64_t seed, bool list, std::ostream& out, std::ostream& err) {
    try {
        auto field = resolve_field(field_name);
        const Codebase cb = load_codebase(codebase_path, field);
        const ItemBase base = build_item_base(cb, budget, seed);
        out << "items " << base.size() << "\n";
        for (auto o : {ItemOrigin::Split, ItemOrigin::Allele, ItemOrigin::Substitution, ItemOrigin::Insertion,
                       ItemOrigin::Deletion}) {
            out << to_string(o) << " " << base.count(o) << "\n";
        }
        if (list) {
            for (std::size_t i = 0; i < base.size(); ++i) {
                out << i << " " << to_string(base[i].origin) << " " << base[i].prior << " "
                    << one_line(base[i].opcodes, *field) << "\n";
            }
        }
        return kExitOk;
    } catch (const Error& e) {
        return report_error(e, err);
    }
}

// ---------------------------------------------------------------------------
// train-reward

int cmd_train_reward(const std::string& field_name, const fs::path& codebase_path, const fs::path& out_path,
                     std::uint64_t seed, std::size_t negatives, std::ostream& out, std::ostream& err) {
    try {
        auto field = resolve_field(field_name);
        const Codebase cb = load_codebase(codebase_path, field);
        DatasetOptions opt;
        opt.seed = seed;
        opt.negatives_per_positive = negatives;
        const auto report = train_reward_model(cb, opt);
        report.model.save(out_path);
        out << "positives " << report.positives << "\n";
        out << "negatives " << report.negatives << "\n";
        out << "held_out " << report.held_out << "\n";
        out << "auc " << std::fixed << std::setprecision(4) << report.held_out_auc << "\n";
        out << "model " << out_path.string() << "\n";
        return kExitOk;
    } catch (const Error& e) {
        err << "error: " << to_string(e.code()) << ": " << e.what() << "\n";
        return e.code() == ErrorCode::MissingFile ? kExitUsage : kExitFailure;
    }
}

// ---------------------------------------------------------------------------
// search

namespace {

struct TaskResult {
    std::string id;
    fs::path file;
    bool failed = false;
    std::string error;
    bool control = false;
    SearchOutcome outcome;
    std::size_t unsound = 0;  // solutions failing the cold re-check
    std::vector<double> test_exact;
};

std::vector<fs::path> expand_tasks(const std::vector<fs::path>& inputs) {
    std::vector<fs::path> out;
    for (const auto& p : inputs) {
        if (fs::is_directory(p)) {
            auto files = arc::task_files(p);
            out.insert(out.end(), files.begin(), files.end());
        } else {
            out.push_back(p);
        }
    }
    return out;
}

std::string summary_table(const std::vector<TaskResult>& results) {
    std::ostringstream out;
    out << std::left << std::setw(28) << "task" << std::setw(10) << "status" << std::right << std::setw(8) << "nodes"
        << std::setw(11) << "solutions" << std::setw(9) << "control" << "\n";
    std::size_t solved = 0, fresh_solved = 0, fresh = 0, controls = 0, controls_solved = 0, failed = 0, unsound = 0;
    for (const auto& r : results) {
        const std::string status = r.failed ? "failed" : (r.outcome.solved() ? "solved" : "unsolved");
        out << std::left << std::setw(28) << r.id << std::setw(10) << status << std::right << std::setw(8)
            << (r.failed ? 0 : r.outcome.nodes_expanded) << std::setw(11) << (r.failed ? 0 : r.outcome.solutions.size())
            << std::setw(9) << (r.control ? "yes" : "no") << "\n";
        failed += r.failed;
        unsound += r.unsound;
        const bool ok = !r.failed && r.outcome.solved();
        solved += ok;
        if (r.control) {
            ++controls;
            controls_solved += ok;
        } else {
            ++fresh;
            fresh_solved += ok;
        }
    }
    out << "\n";
    out << std::left << std::setw(36) << "total tasks" << results.size() << "\n";
    out << std::setw(36) << "total solved" << solved << "\n";
    out << std::setw(36) << "previously unsolved solved" << fresh_solved << "/" << fresh << "\n";
    out << std::setw(36) << "controls solved" << controls_solved << "/" << controls << "\n";
    out << std::setw(36) << "failed" << failed << "\n";
    out << std::setw(36) << "unsound solutions" << unsound << "\n";
    return out.str();
}

}  // namespace

int cmd_search(const RunManifest& m, std::ostream& out, std::ostream& err) {
    FieldPtr field;
    std::shared_ptr<const ItemBase> items;
    FormalRelation relation;
    std::set<std::string> control_ids;
    std::vector<fs::path> files;
    try {
        validate(m.config);
        if (m.codebase.empty()) throw Error(ErrorCode::InvalidArgument, "no codebase given");
        if (m.tasks.empty()) throw Error(ErrorCode::InvalidArgument, "no tasks given");
        field = resolve_field(m.field);
        std::vector<arc::ArcTask> known;
        for (const auto& f : arc::task_files(codebase_tasks_dir(m.codebase))) known.push_back(arc::load_task(f));
        relation = arc::build_arc_relation(known, m.codebase, m.reward_model, field);
        items = std::make_shared<const ItemBase>(build_item_base(*relation.codebase, m.mutation, m.config.seed,
                                                                 relation.prior));
        for (const auto& e : relation.codebase->entries()) control_ids.insert(e.example_id.substr(0, e.example_id.find(':')));
        files = expand_tasks(m.tasks);
        fs::create_directories(m.out);
    } catch (const Error& e) {
        return report_error(e, err);
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return kExitFailure;
    }

    std::vector<TaskResult> results(files.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < files.size(); i = next++) {
            TaskResult& r = results[i];
            r.file = files[i];
            r.id = files[i].stem().string();
            try {
                const auto task = arc::load_task(files[i]);
                r.control = control_ids.contains(task.id);
                const auto examples = arc::train_examples(task, *field);
                r.outcome = run_search(relation, examples, items, m.config, task.id);
                // Cold re-check of everything reported.
                for (const auto& s : r.outcome.solutions) {
                    if (!verify_solution(*field, examples, s.snippet)) ++r.unsound;
                }
                if (r.outcome.solved()) {
                    const auto tests = arc::test_examples(task, *field);
                    if (!tests.empty()) verify_solution(*field, tests, r.outcome.solutions.front().snippet, &r.test_exact);
                }
            } catch (const std::exception& e) {
                r.failed = true;
                r.error = e.what();
            }
        }
    };
    const std::size_t jobs = std::max<std::size_t>(1, std::min(m.jobs, std::max<std::size_t>(files.size(), 1)));
    std::vector<std::thread> pool;
    for (std::size_t j = 1; j < jobs; ++j) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    for (const auto& r : results) {
        std::string text;
        if (r.failed) {
            text = "task " + r.id + "\nstatus failed\nerror " + r.error + "\nend\n";
            err << "task " << r.id << " failed: " << r.error << "\n";
        } else {
            text = format_report(r.outcome, *field);
            if (!r.test_exact.empty()) {
                std::ostringstream t;
                t << "test_exact";
                for (double e : r.test_exact) t << ' ' << e;
                text.insert(text.size() - 4, t.str() + "\n");
            }
            if (r.unsound) text.insert(text.size() - 4, "unsound " + std::to_string(r.unsound) + "\n");
        }
        try {
            write_file(m.out / (r.id + ".report"), text);
        } catch (const Error& e) {
            return report_error(e, err);
        }
    }

    std::ostringstream summary;
    summary << describe(m) << "\n" << summary_table(results);

    if (m.append_solutions) {
        std::size_t appended = 0;
        try {
            const fs::path tasks_dir = codebase_tasks_dir(m.codebase);
            for (const auto& r : results) {
                if (r.failed || r.control || !r.outcome.solved()) continue;
                const auto task = arc::load_task(r.file);
                const fs::path dest = tasks_dir / (task.id + ".json");
                if (!fs::exists(dest)) fs::copy_file(r.file, dest);
                for (const auto& ex : arc::train_examples(task, *field)) {
                    Codebase::append(m.codebase, {r.outcome.solutions.front().snippet, ex.id, Provenance::FoundBySearch},
                                     *field);
                    ++appended;
                }
            }
            const Codebase reloaded = load_codebase(m.codebase, field);
            reloaded.revalidate();
            summary << "appended " << appended << " entries; codebase revalidated with " << reloaded.size()
                    << " entries\n";
        } catch (const Error& e) {
            err << "error: append failed: " << to_string(e.code()) << ": " << e.what() << "\n";
            return kExitFailure;
        } catch (const fs::filesystem_error& e) {
            err << "error: append failed: " << e.what() << "\n";
            return kExitFailure;
        }
    }

    try {
        write_file(m.out / "summary.txt", summary.str());
    } catch (const Error& e) {
        return report_error(e, err);
    }
    out << summary.str();
    return kExitOk;
}

}  // namespace ff::cli

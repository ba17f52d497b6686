#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "commands.hpp"
#include "properties.hpp"

using namespace ff;
using namespace ff::cli;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

void write(const fs::path& p, std::string_view text) {
    fs::create_directories(p.parent_path());
    std::ofstream(p, std::ios::binary) << text;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

const fs::path kData = testing::data_dir();

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("exec") {
    TempDir tmp("ff_cli_exec");
    write(tmp.path / "id.ff", "identity_grid\n");
    write(tmp.path / "boom.ff", "rotate_90\nhcf\n");
    write(tmp.path / "grid.json", "[[1,2],[3,4]]");
    std::ostringstream out, err;
    CHECK(cmd_exec("arc", tmp.path / "id.ff", tmp.path / "grid.json", "train:0", out, err) == kExitOk);
    CHECK(out.str().find("[[1,2],[3,4]]") != std::string::npos);

    out.str("");
    CHECK(cmd_exec("arc", tmp.path / "id.ff", kData / "easy" / "tasks" / "easy_01.json", "train:1", out, err) == kExitOk);

    out.str("");
    CHECK(cmd_exec("arc", tmp.path / "boom.ff", tmp.path / "grid.json", "train:0", out, err) == kExitFailure);
    CHECK(out.str().find("error at 1") != std::string::npos);

    CHECK(cmd_exec("arc", tmp.path / "absent.ff", tmp.path / "grid.json", "train:0", out, err) == kExitUsage);
    CHECK(cmd_exec("arc", tmp.path / "id.ff", tmp.path / "absent.json", "train:0", out, err) == kExitUsage);
    CHECK(cmd_exec("arc", tmp.path / "id.ff", kData / "easy" / "tasks" / "easy_01.json", "train:99", out, err) == kExitUsage);
}

TEST_CASE("split and mutate") {
    std::ostringstream out, err;
    CHECK(cmd_split("arc", kData / "seed" / "codebase.txt", out, err) == kExitOk);
    CHECK(out.str().find("mirror_horizontal") != std::string::npos);
    out.str("");
    CHECK(cmd_mutate("arc", kData / "seed" / "codebase.txt", MutationBudget{}, 0, false, out, err) == kExitOk);
    CHECK(out.str().find("insertion") != std::string::npos);
    CHECK(cmd_split("arc", "/nonexistent/codebase.txt", out, err) == kExitUsage);
}

TEST_CASE("train-reward") {
    TempDir tmp("ff_cli_train");
    std::ostringstream out, err;
    CHECK(cmd_train_reward("arc", kData / "seed" / "codebase.txt", tmp.path / "a.txt", 0, 2, out, err) == kExitOk);
    CHECK(out.str().find("auc") != std::string::npos);
    CHECK(cmd_train_reward("arc", kData / "seed" / "codebase.txt", tmp.path / "b.txt", 0, 2, out, err) == kExitOk);
    CHECK(slurp(tmp.path / "a.txt") == slurp(tmp.path / "b.txt"));
    CHECK_FALSE(slurp(tmp.path / "a.txt").empty());

    fs::create_directories(tmp.path / "one" / "tasks");
    fs::copy_file(kData / "seed" / "tasks" / "seed_01_flip.json", tmp.path / "one" / "tasks" / "seed_01_flip.json");
    write(tmp.path / "one" / "codebase.txt", "entry arc seed_01_flip:train:0 handcrafted\nmirror_horizontal\nend\n");
    std::ostringstream err2;
    CHECK(cmd_train_reward("arc", tmp.path / "one" / "codebase.txt", tmp.path / "c.txt", 0, 2, out, err2) == kExitFailure);
    CHECK(err2.str().find("insufficient") != std::string::npos);
}

TEST_CASE("run manifests") {
    const auto m = load_run_manifest(kData / "easy" / "manifest.json");
    CHECK(m.field.ends_with("arc.json"));
    CHECK(m.config.node_budget == 10000);
    CHECK(m.config.seed == 1);
    CHECK(fs::exists(m.codebase));
    CHECK(describe(m).find("budget=10000") != std::string::npos);

    TempDir tmp("ff_cli_manifest");
    write(tmp.path / "m.json", R"({"tasks": ["t"], "codebase": "cb.txt", "search": {"width": 4, "discount": 0.9}})");
    const auto n = load_run_manifest(tmp.path / "m.json");
    CHECK(n.config.width == 4);
    CHECK(n.config.discount == 0.9);
    CHECK(n.codebase == tmp.path / "cb.txt");
    write(tmp.path / "bad.json", "{");
    CHECK_THROWS_AS(load_run_manifest(tmp.path / "bad.json"), Error);
    CHECK_THROWS_AS(load_run_manifest(tmp.path / "absent.json"), Error);
}

TEST_CASE("search") {
    TempDir tmp("ff_cli_search");
    fs::create_directories(tmp.path / "tasks");
    fs::copy_file(kData / "easy" / "tasks" / "easy_01.json", tmp.path / "tasks" / "easy_01.json");
    fs::copy_file(kData / "easy" / "tasks" / "easy_09.json", tmp.path / "tasks" / "easy_09.json");
    write(tmp.path / "tasks" / "broken.json", "{\"train\": [");

    RunManifest m;
    m.tasks = {tmp.path / "tasks"};
    m.codebase = kData / "seed" / "codebase.txt";
    m.config.node_budget = 2000;

    SUBCASE("one corrupt task is isolated") {
        m.out = tmp.path / "out";
        m.jobs = 2;
        std::ostringstream out, err;
        CHECK(cmd_search(m, out, err) == kExitOk);
        CHECK(slurp(m.out / "broken.report").find("status failed") != std::string::npos);
        CHECK(slurp(m.out / "easy_01.report").find("status solved") != std::string::npos);
        CHECK(slurp(m.out / "easy_09.report").find("status solved") != std::string::npos);
        CHECK(out.str().find("failed                              1") != std::string::npos);
        CHECK(out.str().find("unsound solutions                   0") != std::string::npos);
        CHECK(slurp(m.out / "summary.txt") == out.str());
    }
    SUBCASE("zero budget") {
        m.out = tmp.path / "zero";
        m.config.node_budget = 0;
        std::ostringstream out, err;
        CHECK(cmd_search(m, out, err) == kExitOk);
        CHECK(slurp(m.out / "easy_01.report").find("status unsolved") != std::string::npos);
        CHECK(out.str().find("total solved                        0") != std::string::npos);
    }
    SUBCASE("appending solutions grows a revalidated codebase") {
        fs::create_directories(tmp.path / "cb" / "tasks");
        for (const auto& f : fs::directory_iterator(kData / "seed" / "tasks")) fs::copy_file(f.path(), tmp.path / "cb" / "tasks" / f.path().filename());
        fs::copy_file(kData / "seed" / "codebase.txt", tmp.path / "cb" / "codebase.txt");
        fs::remove(tmp.path / "tasks" / "broken.json");
        m.codebase = tmp.path / "cb" / "codebase.txt";
        m.out = tmp.path / "append";
        m.append_solutions = true;
        std::ostringstream out, err;
        CHECK(cmd_search(m, out, err) == kExitOk);
        CHECK(out.str().find("codebase revalidated with 54 entries") != std::string::npos);
        CHECK(fs::exists(tmp.path / "cb" / "tasks" / "easy_01.json"));
    }
    SUBCASE("bad configuration") {
        m.out = tmp.path / "bad";
        m.config.width = 0;
        std::ostringstream out, err;
        CHECK(cmd_search(m, out, err) != kExitOk);
    }
}

}

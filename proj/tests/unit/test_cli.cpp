#include "bss/cli.hpp"

#include "json.hpp"

#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

const std::string kFixtures = BSS_FIXTURE_DIR;

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run bss_run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = bss::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

json load(const fs::path& p) { return json::parse(slurp(p)); }

class TempDir {
public:
    TempDir() : path_(fs::temp_directory_path() / ("bss_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter_++))) {
        fs::create_directories(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    [[nodiscard]] std::string operator/(const std::string& name) const { return (path_ / name).string(); }

private:
    static inline int counter_ = 0;
    fs::path path_;
};

std::string write_config(const TempDir& dir, const std::string& name, const std::string& text) {
    const auto path = dir / name;
    std::ofstream(path) << text;
    return path;
}

}  // namespace

TEST_CASE("validate on T1 exits 0 and reports the no-full regime") {
    TempDir dir;
    const auto r = bss_run({"validate", kFixtures + "/t1.json", "-o", dir / "v"});
    REQUIRE(r.code == 0);
    const auto j = load(dir / "v.json");
    CHECK(j["validation"]["ok"] == true);
    CHECK(j["validation"]["regime"] == "no-full");
    CHECK(j["manifest"]["subcommand"] == "validate");
}

TEST_CASE("validate rejects invalid parameters with exit code 3") {
    TempDir dir;
    const auto cfg = write_config(dir, "bad.json", R"({"N":2,"C":1,"K":3,"lambda":[1,1],
        "p_first":[[0,0.9],[1,0]],"mu":[[0,1],[1,0]],"alpha":[[0,1],[1,0]],"xi":[[0,1],[1,0]]})");
    const auto r = bss_run({"validate", cfg, "-o", dir / "v"});
    CHECK(r.code == 3);
    const auto j = load(dir / "v.json");
    CHECK(j["validation"]["ok"] == false);
    CHECK(j["validation"]["violations"][0]["code"] == "row_sum");
}

TEST_CASE("enumerate on T1 reports 21 states and box size 1296") {
    TempDir dir;
    const auto r = bss_run({"enumerate", kFixtures + "/t1.json", "-o", dir / "e", "--dump-states", dir / "states.txt"});
    REQUIRE(r.code == 0);
    const auto j = load(dir / "e.json");
    CHECK(j["state_count"] == 21);
    CHECK(j["box_size"] == 1296);
    CHECK(j["reachable_count"] == 10);
    const auto states = slurp(dir / "states.txt");
    CHECK(std::count(states.begin(), states.end(), '\n') == 21);
}

TEST_CASE("compare of solve-ctmc and standard solve-pf on T1 gives TV below 1e-10") {
    TempDir dir;
    const auto cfg = kFixtures + "/t1.json";
    REQUIRE(bss_run({"solve-ctmc", cfg, "-o", dir / "ctmc"}).code == 0);
    REQUIRE(bss_run({"solve-pf", cfg, "--convention", "standard", "-o", dir / "pf"}).code == 0);
    const auto r = bss_run({"compare", dir / "ctmc.json", dir / "pf.json", "-o", dir / "cmp"});
    REQUIRE(r.code == 0);
    const auto j = load(dir / "cmp.json");
    REQUIRE(j["comparisons"].size() == 1);
    CHECK(j["comparisons"][0]["total_variation"].get<double>() <= 1e-10);
    CHECK(j["comparisons"][0]["first_source"] == "ctmc");
    CHECK(j["comparisons"][0]["second_source"] == "product-form-standard");
    const auto m = bss_run({"metrics", "--source", dir / "ctmc.json", "-o", dir / "m"});
    CHECK(m.code == 0);
    CHECK(slurp(dir / "m.csv").find("station,empty,full,problematic,mean_occupancy") != std::string::npos);
}

TEST_CASE("analytic outputs are byte-identical on rerun with a pinned timestamp") {
    TempDir dir;
    const auto cfg = kFixtures + "/t2.json";
    for (const std::string sub : {"solve-ctmc", "solve-pf"}) {
        std::vector<std::string> args{sub, cfg, "--timestamp", "2026-01-01T00:00:00Z"};
        if (sub == "solve-pf") {
            args.insert(args.end(), {"--beta", "fixed-point", "--convention", "literal"});
        }
        auto a = args, b = args;
        a.insert(a.end(), {"-o", dir / "a"});
        b.insert(b.end(), {"-o", dir / "a"});
        REQUIRE(bss_run(a).code == 0);
        const auto first_json = slurp(dir / "a.json");
        const auto first_csv = slurp(dir / "a.csv");
        REQUIRE(bss_run(b).code == 0);
        CHECK(slurp(dir / "a.json") == first_json);
        CHECK(slurp(dir / "a.csv") == first_csv);
        CHECK(first_csv.rfind("# manifest: ", 0) == 0);
    }
}

TEST_CASE("simulate writes estimates with standard errors") {
    TempDir dir;
    const auto r = bss_run({"simulate", kFixtures + "/t1.json", "--replications", "3", "--horizon", "200",
                            "--warmup", "10", "--seed", "5", "-o", dir / "s", "--trace", dir / "trace.csv"});
    REQUIRE(r.code == 0);
    const auto j = load(dir / "s.json");
    CHECK(j["source"] == "simulation");
    CHECK(j["estimates"]["replications"] == 3);
    CHECK(j["manifest"]["options"]["seed"] == 5);
    CHECK(fs::exists(dir / "trace.csv"));
}

TEST_CASE("errors map to distinct exit codes with a JSON error record") {
    TempDir dir;
    SUBCASE("missing config file") {
        const auto r = bss_run({"validate", dir / "nope.json", "-o", dir / "x"});
        CHECK(r.code == 2);
        const auto e = json::parse(r.err);
        CHECK(e["error"]["kind"] == "config");
        CHECK(e["error"]["exit_code"] == 2);
    }
    SUBCASE("unparsable config") {
        const auto cfg = write_config(dir, "junk.json", "{ not json");
        CHECK(bss_run({"enumerate", cfg, "-o", dir / "x"}).code == 2);
    }
    SUBCASE("resource cap") {
        const auto r = bss_run({"enumerate", kFixtures + "/t2.json", "--max-states", "10", "-o", dir / "x"});
        CHECK(r.code == 4);
        CHECK(json::parse(r.err)["error"]["kind"] == "resource_limit");
    }
    SUBCASE("non-convergence") {
        const auto cfg = write_config(dir, "nc.json", R"({"N":2,"C":2,"K":2,"lambda":[1,2],
            "p_first":[[null,1],[1,null]],"mu":[[null,1],[1,null]],"alpha":[[null,1],[1,null]],
            "xi":[[null,1],[1,null]],"solver":{"max_iterations":2,"direct_limit":0}})");
        CHECK(bss_run({"solve-ctmc", cfg, "-o", dir / "x"}).code == 5);
    }
    SUBCASE("mismatched spaces") {
        REQUIRE(bss_run({"solve-ctmc", kFixtures + "/t1.json", "-o", dir / "a"}).code == 0);
        REQUIRE(bss_run({"solve-ctmc", kFixtures + "/t2.json", "-o", dir / "b"}).code == 0);
        CHECK(bss_run({"compare", dir / "a.json", dir / "b.json", "-o", dir / "c"}).code == 7);
    }
    SUBCASE("unwritable output") {
        CHECK(bss_run({"validate", kFixtures + "/t1.json", "-o", dir / "missing/dir/v"}).code == 8);
    }
    SUBCASE("bad beta") {
        CHECK(bss_run({"solve-pf", kFixtures + "/t1.json", "--beta", "fixed=1,1", "-o", dir / "x"}).code == 9);
        CHECK(bss_run({"solve-pf", kFixtures + "/t1.json", "--beta", "sometimes", "-o", dir / "x"}).code == 2);
    }
    SUBCASE("usage") {
        CHECK(bss_run({"frobnicate"}).code == 10);
        CHECK(bss_run({"solve-pf", kFixtures + "/t1.json", "--convention", "odd"}).code == 10);
    }
}

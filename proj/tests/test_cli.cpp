#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "mdms/construction.hpp"
#include "mdms/json_io.hpp"

using namespace mdms;
namespace fs = std::filesystem;

namespace {

struct RunResult {
    int exit_code;
    std::string out;
    std::string err;
};

RunResult run(std::vector<std::string> args) {
    std::ostringstream out, err;
    int code = cli::dispatch(args, out, err);
    return RunResult{code, out.str(), err.str()};
}

fs::path temp_file(const std::string& name) {
    fs::path dir = fs::temp_directory_path() / "mdms_cli_tests";
    fs::create_directories(dir);
    return dir / name;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("mstd reproduces the worked example") {
    RunResult r = run({"mstd", "--set", "[0,2,3,4,7,11,12,14]"});
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("\"sumset_size\":26") != std::string::npos);
    CHECK(r.out.find("\"difference_set_size\":25") != std::string::npos);
    CHECK(r.out.find("\"class\":\"MSTD\"") != std::string::npos);
}

TEST_CASE("construct then verify, end to end at h = 1") {
    fs::path state = temp_file("state_h1.json");
    RunResult c = run({"construct", "--h", "1", "--epsilon", "9/10", "--output", state.string()});
    REQUIRE(c.exit_code == 0);

    RunResult v = run({"verify", "--state", state.string(), "--check", "all"});
    CHECK(v.exit_code == 0);
    CHECK(v.out.find("\"verdict\":\"fail\"") == std::string::npos);
    CHECK(v.err.find("FAIL") == std::string::npos);
}

TEST_CASE("full-inductive reports the exact pair count and refuses") {
    RunResult r = run({"construct", "--h", "2", "--epsilon", "9/10", "--levels", "7/10,8/10",
                       "--full-inductive"});
    CHECK(r.exit_code == 2);
    CHECK(r.out.find("\"full_pair_count\":\"31000\"") != std::string::npos);
    CHECK(r.out.find("required_module_bound") != std::string::npos);
    CHECK(r.err.find("cap") != std::string::npos);
}

TEST_CASE("restricted construct pipeline verifies cleanly") {
    fs::path state = temp_file("state_h2_restricted.json");
    RunResult c = run({"construct", "--h", "2", "--force-size", "3,3,3", "--pairs", "2",
                       "--step-sizes", "5,7", "--output", state.string()});
    REQUIRE(c.exit_code == 0);
    CHECK(c.err.find("restricted") != std::string::npos);

    RunResult v = run({"verify", "--state", state.string(), "--check", "structural"});
    CHECK(v.exit_code == 0);
    CHECK(v.out.find("\"verdict\":\"pass\"") != std::string::npos);
    CHECK(v.out.find("restricted") != std::string::npos);  // taint is visible
}

TEST_CASE("verify exits 1 on an untainted failure") {
    // A clean (untainted) h = 1 state whose f is the identity: A = W, so
    // the final bound |1A| < (9/10)|W| fails without excuse.
    ConstructionState state = build_initial(1, default_schedule(1, Rational(9, 10)));
    std::vector<std::uint64_t> table(state.spec->total_size());
    for (std::uint64_t w = 0; w < table.size(); ++w) table[w] = w;
    state.f = FnTable::explicit_table(state.spec, std::move(table));

    fs::path path = temp_file("state_untainted_fail.json");
    std::ofstream(path) << state_to_json(state) << "\n";

    RunResult v = run({"verify", "--state", path.string(), "--check", "final"});
    CHECK(v.exit_code == 1);
    CHECK(v.out.find("\"verdict\":\"fail\"") != std::string::npos);
    CHECK(v.out.find("\"taints\":[]") != std::string::npos);
}

TEST_CASE("lemma1 check runs without a state") {
    RunResult r = run({"verify", "--check", "lemma1", "--sizes", "3,3", "--target", "0,0"});
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("\"s_count\":\"5\"") != std::string::npos);
}

TEST_CASE("usage and input errors exit 2 with distinct diagnostics") {
    CHECK(run({"definitely-not-a-subcommand"}).exit_code == 2);
    CHECK(run({"mstd"}).exit_code == 2);                       // missing --set
    CHECK(run({"mstd", "--set", "[0,1]", "--bogus"}).exit_code == 2);
    CHECK(run({"sumset", "--h", "2", "--set", "/nonexistent.json"}).err.find("io") !=
          std::string::npos);

    fs::path bad = temp_file("bad.json");
    std::ofstream(bad) << "{not json";
    RunResult r = run({"sumset", "--h", "2", "--set", bad.string()});
    CHECK(r.exit_code == 2);
    CHECK(r.err.find("malformed JSON") != std::string::npos);

    RunResult cap = run({"construct", "--h", "1", "--cap", "10"});
    CHECK(cap.exit_code == 2);  // W_1 = 25 refuses under a lowered cap
    CHECK(cap.err.find("cap") != std::string::npos);
}

TEST_CASE("artifacts are byte-identical across reruns, manifests carry hashes") {
    fs::path a = temp_file("replay_a.json");
    fs::path b = temp_file("replay_b.json");
    std::vector<std::string> base{"construct", "--h", "2", "--force-size", "3", "--pairs", "1",
                                  "--step-sizes", "5"};
    auto with_output = [&](const fs::path& p) {
        std::vector<std::string> args = base;
        args.push_back("--output");
        args.push_back(p.string());
        return args;
    };
    REQUIRE(run(with_output(a)).exit_code == 0);
    REQUIRE(run(with_output(b)).exit_code == 0);
    CHECK(slurp(a) == slurp(b));

    std::string manifest = slurp(fs::path(a.string() + ".manifest.json"));
    CHECK(manifest.find("mdms-manifest/1") != std::string::npos);
    CHECK(manifest.find("wall_time_ms") != std::string::npos);

    // The state consumed downstream hashes into the verify manifest.
    fs::path certs = temp_file("replay_certs.json");
    RunResult v = run({"verify", "--state", a.string(), "--check", "subtractive_basis",
                       "--output", certs.string()});
    REQUIRE(v.exit_code == 0);
    std::string vm = slurp(fs::path(certs.string() + ".manifest.json"));
    CHECK(vm.find("fnv1a64:") != std::string::npos);
    CHECK(vm.find(a.string()) != std::string::npos);
}

TEST_CASE("sumset subcommand round-trips hex and pretty forms") {
    fs::path setfile = temp_file("square_set.json");
    std::ofstream(setfile)
        << R"({"spec":{"h":2,"modules":[{"cyclic":5},{"cyclic":5}]},"elements":[[0,1],[1,0]]})";

    RunResult compact = run({"sumset", "--h", "2", "--set", setfile.string()});
    REQUIRE(compact.exit_code == 0);
    GroupSet S = group_set_from_json(compact.out);
    CHECK(S.cardinality() == 3);

    RunResult pretty = run({"--pretty", "sumset", "--h", "2", "--set", setfile.string()});
    REQUIRE(pretty.exit_code == 0);
    CHECK(group_set_from_json(pretty.out) == S);
}

TEST_CASE("pairs counting via the CLI") {
    RunResult r = run({"pairs", "--count", "--n", "125", "--h", "2", "--level", "2"});
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("\"count\":\"31000\"") != std::string::npos);

    RunResult total = run({"pairs", "--count", "--n", "2", "--h", "2"});
    CHECK(total.out.find("\"count\":\"10\"") != std::string::npos);

    RunResult budget = run({"pairs", "--n", "100000", "--h", "3", "--level", "3"});
    CHECK(budget.exit_code == 2);
    CHECK(budget.err.find("budget") != std::string::npos);
}

TEST_CASE("search subcommand") {
    RunResult ex = run({"search", "--p", "5", "--h", "2", "--exhaustive"});
    CHECK(ex.exit_code == 0);
    CHECK(ex.out.find("\"best_density\":\"1\"") != std::string::npos);

    RunResult rnd = run({"search", "--p", "5", "--h", "2", "--random", "--seed", "9", "--iters",
                         "1500"});
    CHECK(rnd.exit_code == 0);
    CHECK(rnd.out.find("\"best_density\":\"1\"") != std::string::npos);
    CHECK(run({"search", "--p", "6", "--h", "2"}).exit_code == 2);
}

}  // TEST_SUITE

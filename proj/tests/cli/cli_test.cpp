#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cli/cli.hpp"
#include "cli/manifest.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::string kData = AWLS_DATA_DIR;

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run_awls(std::vector<std::string> args) {
    args.insert(args.begin(), "awls");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = awls::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("awls_cli_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

json read_json(const fs::path& p) { return json::parse(slurp(p)); }

std::vector<std::string> case14(const fs::path& out) {
    return {"--case", kData + "/ieee14.case", "--lines", kData + "/crit8_14.json", "--k", "3", "--out", out.string()};
}

std::vector<std::string> with(std::vector<std::string> a, const std::vector<std::string>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

// small triangle written to disk so gen-data and train stay quick
fs::path triangle_case(const fs::path& dir) {
    const fs::path p = dir / "triangle.case";
    std::ofstream(p) << "BASE_MVA 100\nBUS\n1 3 0.95 1.05 0.0 0.0\n2 1 0.95 1.05 0.4 0.1\n3 1 0.95 1.05 0.9 0.3\n"
                        "GEN\n1 0.0 2.0 -1.0 1.0\nBRANCH\n1 1 2 1.0 -6.0 0.0 0.01 1.0 -0.4 0.4 0.7\n"
                        "2 2 3 1.2 -5.0 0.0 0.01 1.0 -0.4 0.4 0.5\n3 1 3 1.5 -7.0 0.0 0.01 1.0 -0.4 0.4 0.45\n";
    std::ofstream(dir / "lines.json") << "[1, 2, 3]\n";
    return p;
}

}  // namespace

TEST_CASE("enumerate writes one row per budget topology") {
    const fs::path out = scratch("enum");
    const Result r = run_awls(with({"enumerate"}, case14(out)));
    REQUIRE(r.code == 0);
    CHECK(r.out.find("enumerate: 93 topologies") != std::string::npos);
    const std::string csv = slurp(out / "enumerate.csv");
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 94);
    const json m = read_json(out / "manifest.json");
    CHECK(m["schema"] == "awls.manifest/1");
    CHECK(m["command"] == "enumerate");
    CHECK(m["config_sha256"] == awls::cli::sha256_hex(m["config"].dump()));
    for (const auto& a : m["artifacts"]) CHECK(a["sha256"] == awls::cli::sha256_file(out / a["path"].get<std::string>()));
}

TEST_CASE("rerunning from a manifest reproduces the artifacts") {
    const fs::path dir = scratch("rerun");
    const fs::path c = triangle_case(dir);
    const std::vector<std::string> base{"--case", c.string(), "--lines", (dir / "lines.json").string(), "--k", "2",
                                        "--seed", "9"};
    REQUIRE(run_awls(with({"gen-data", "--profiles", "6", "--out", (dir / "a").string()}, base)).code == 0);
    REQUIRE(run_awls({"gen-data", "--config", (dir / "a" / "manifest.json").string(), "--out", (dir / "b").string()}).code ==
            0);
    CHECK(slurp(dir / "a" / "dataset.jsonl") == slurp(dir / "b" / "dataset.jsonl"));
    const json ma = read_json(dir / "a" / "manifest.json"), mb = read_json(dir / "b" / "manifest.json");
    CHECK(ma["artifacts"] == mb["artifacts"]);
    CHECK(ma["seed"] == 9);

    // a manifest from another command is refused
    CHECK(run_awls({"train", "--config", (dir / "a" / "manifest.json").string()}).code == 1);
}

TEST_CASE("job count does not change the dataset") {
    const fs::path dir = scratch("jobs");
    const fs::path c = triangle_case(dir);
    const std::vector<std::string> base{"gen-data", "--case", c.string(), "--lines", (dir / "lines.json").string(),
                                        "--k", "2", "--profiles", "5"};
    REQUIRE(run_awls(with(base, {"--out", (dir / "one").string()})).code == 0);
    setenv("AWLS_JOBS", "3", 1);
    setenv("AWLS_OUTPUT_DIR", (dir / "env").string().c_str(), 1);
    const Result r = run_awls(base);
    unsetenv("AWLS_JOBS");
    unsetenv("AWLS_OUTPUT_DIR");
    REQUIRE(r.code == 0);
    CHECK(read_json(dir / "env" / "manifest.json")["config"]["jobs"] == 3);
    CHECK(slurp(dir / "one" / "dataset.jsonl") == slurp(dir / "env" / "dataset.jsonl"));
}

TEST_CASE("flags override the config file") {
    const fs::path dir = scratch("precedence");
    const fs::path c = triangle_case(dir);
    std::ofstream(dir / "cfg.json") << json{{"case", c.string()},
                                            {"lines", (dir / "lines.json").string()},
                                            {"k", 1},
                                            {"output_dir", (dir / "from_file").string()},
                                            {"enumerate", {{"load", {{"scale", 0.5}}}}}}
                                           .dump();
    REQUIRE(run_awls({"enumerate", "--config", (dir / "cfg.json").string(), "--k", "2"}).code == 0);
    const json m = read_json(dir / "from_file" / "manifest.json");
    CHECK(m["config"]["k"] == 2);
    CHECK(m["config"]["enumerate"]["load"]["scale"] == 0.5);
    CHECK(read_json(dir / "from_file" / "enumerate.json")["topologies"] == 7);
}

TEST_CASE("validation problems exit with 1") {
    const fs::path dir = scratch("invalid");
    const fs::path c = triangle_case(dir);
    std::ofstream(dir / "bad.json") << R"({"case": ")" << c.string() << R"(", "typo": 1})";
    Result r = run_awls({"enumerate", "--config", (dir / "bad.json").string()});
    CHECK(r.code == 1);
    CHECK(r.err.find("unknown key typo") != std::string::npos);

    r = run_awls({"enumerate", "--case", (dir / "missing.case").string(), "--out", dir.string()});
    CHECK(r.code == 1);
    CHECK(r.err.find("does not exist") != std::string::npos);

    std::ofstream(dir / "broken.case") << "BASE_MVA 100\nBUS\n1 3 0.95 oops\n";
    r = run_awls({"solve-lower", "--case", (dir / "broken.case").string(), "--out", dir.string()});
    CHECK(r.code == 1);
    CHECK(r.err.find("line 3") != std::string::npos);

    CHECK(run_awls({"nonsense"}).code == 1);
    CHECK(run_awls({}).code == 1);
    CHECK(run_awls({"solve-awls", "--help"}).code == 0);
    CHECK(run_awls({"solve-awls", "--case", c.string(), "--lines", (dir / "lines.json").string(), "--surrogate", "gnn",
                "--net", (dir / "lines.json").string(), "--out", dir.string()})
              .code == 1);
}

TEST_CASE("solve-lower reports the shed and dumps the model") {
    const fs::path out = scratch("lower");
    const Result r = run_awls({"solve-lower", "--case", kData + "/ieee14.case", "--off", "1", "--load-scale", "0.9",
                           "--dump", "--out", out.string()});
    REQUIRE(r.code == 0);
    const json j = read_json(out / "lower.json");
    CHECK(j["status"] == "optimal");
    CHECK(j["off"] == json::array({1}));
    CHECK(j["bus_shed"].size() == 14);
    CHECK(slurp(out / "lower.lp").rfind("Minimize", 0) == 0);
}

TEST_CASE("train, solve-awls and eval chain on a small case") {
    const fs::path dir = scratch("chain");
    const fs::path c = triangle_case(dir);
    const fs::path out = dir / "run";
    const std::vector<std::string> base{"--case", c.string(), "--lines", (dir / "lines.json").string(), "--k", "2",
                                        "--out", out.string(), "--seed", "2"};
    REQUIRE(run_awls(with({"gen-data", "--profiles", "10"}, base)).code == 0);
    Result r = run_awls(with({"train", "--epochs", "40", "--hidden", "8", "8"}, base));
    REQUIRE(r.code == 0);
    const std::string loss = slurp(out / "loss.csv");
    CHECK(std::count(loss.begin(), loss.end(), '\n') == 41);
    CHECK(read_json(out / "train.json")["test_profiles"].size() == 1);

    r = run_awls(with({"solve-awls", "--surrogate", "pcnn", "--lambda", "10"}, base));
    REQUIRE(r.code == 0);
    const std::string row = slurp(out / "awls.csv");
    CHECK(row.find("gap_pct") != std::string::npos);
    const json aw = read_json(out / "awls.json");
    CHECK(aw["aggregate"]["gap_pct"]["count"].get<int>() + aw["aggregate"]["gap_undefined"].get<int>() == 1);
    CHECK(aw["pool"].size() >= 1);

    r = run_awls(with({"eval", "--profiles", "3", "--lambda", "10", "100"}, base));
    REQUIRE(r.code == 0);
    CHECK(fs::exists(out / "report_nn.csv"));
    CHECK(fs::exists(out / "report_pcnn_10.csv"));
    CHECK(fs::exists(out / "report_pcnn_100.csv"));
    const json e = read_json(out / "eval.json");
    CHECK(e["reports"].size() == 3);
    const json m = read_json(out / "manifest.json");
    CHECK(m["volatile"] == json::array({"timing.csv"}));

    // same config, same reports
    const fs::path again = dir / "again";
    REQUIRE(run_awls({"eval", "--config", (out / "manifest.json").string(), "--out", again.string()}).code == 0);
    CHECK(slurp(out / "report_pcnn_100.csv") == slurp(again / "report_pcnn_100.csv"));
    CHECK(slurp(out / "eval.json") == slurp(again / "eval.json"));
}

TEST_CASE("multi-area training writes a masked net") {
    const fs::path dir = scratch("multi");
    const fs::path out = dir / "run";
    const std::vector<std::string> base = case14(out);
    REQUIRE(run_awls(with({"gen-data", "--profiles", "3", "--topologies", "12", "--seed", "1"}, base)).code == 0);
    REQUIRE(run_awls(with({"partition", "--areas", "3"}, base)).code == 0);
    const Result r = run_awls(with({"train", "--arch", "multi", "--partition", (out / "partition.json").string(),
                                "--epochs", "5"},
                               base));
    REQUIRE(r.code == 0);
    const json net = read_json(out / "net.json");
    int masked = 0;
    for (const auto& m : net["layers"][0]["mask"]) masked += m.get<int>() == 0;
    CHECK(masked > 0);
    CHECK(read_json(out / "train.json")["areas"] == 3);

    const Result limited = run_awls(with({"solve-awls", "--surrogate", "nn", "--node-limit", "1"}, base));
    CHECK(limited.code == 2);
    CHECK(limited.err.find("limit") != std::string::npos);
    CHECK(read_json(out / "awls.json")["status"] != "optimal");
}

TEST_CASE("split block selects held-out topologies") {
    const fs::path dir = scratch("split");
    const fs::path c = triangle_case(dir);
    const fs::path out = dir / "run";
    const std::vector<std::string> base{"--case", c.string(), "--lines", (dir / "lines.json").string(), "--k", "2",
                                        "--out", out.string(), "--seed", "4"};
    REQUIRE(run_awls(with({"gen-data", "--profiles", "4"}, base)).code == 0);
    std::ofstream(dir / "split.json") << json{{"split", {{"mode", "outage_count"}, {"max_train_outages", 0}}}}.dump();
    REQUIRE(run_awls(with({"train", "--config", (dir / "split.json").string(), "--epochs", "3", "--hidden", "4"}, base))
                .code == 0);
    const json info = read_json(out / "train.json");
    CHECK(info["split"] == "outage_count");
    CHECK(info["train_topologies"] == json::array({0}));
    CHECK(info["test_topologies"].size() == 3);
    CHECK(info["test_profiles"].size() == 4);

    const Result bad = run_awls(with({"train", "--split", "random"}, base));
    CHECK(bad.code == 1);
    CHECK(bad.err.find("split.mode") != std::string::npos);
    CHECK(run_awls(with({"train", "--split", "line_set"}, base)).code == 1);
}

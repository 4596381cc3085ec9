#include "run_config.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "awls/errors.hpp"

namespace awls::cli {

namespace {

using nlohmann::json;

json load_block() { return {{"scale", 1.0}, {"dataset", ""}, {"profile", 0}}; }

[[noreturn]] void fail(const std::string& what) { throw ValidationError("config", what); }

}  // namespace

json default_config() {
    json c;
    c["case"] = "";
    c["case_id"] = "";
    c["lines"] = nullptr;
    c["k"] = 3;
    c["seed"] = 0;
    c["output_dir"] = "out";
    c["jobs"] = 1;
    // shared by train and eval so both see the same held-out samples
    c["split"] = {{"mode", "profile"},
                  {"train_fraction", 0.9},
                  {"max_train_outages", 3},
                  {"extra_fraction", 0.1},
                  {"top_fraction", 0.3},
                  {"base_lines", nullptr}};
    c["gen-data"] = {{"n_profiles", 200},     {"n_topologies", 0},
                     {"max_samples", 0},      {"exclude_islanding", true},
                     {"bands", json::array({json::array({0.80, 0.93}), json::array({0.93, 1.07}),
                                            json::array({1.07, 1.20})})}};
    c["partition"] = {{"areas", 5}, {"embed_dim", 0}, {"d_max", 0}};
    c["train"] = {{"dataset", ""},
                  {"arch", "single"},
                  {"hidden", json::array({50, 50})},
                  {"partition", ""},
                  {"areas", 5},
                  {"hidden_layers", 2},
                  {"neurons_per_layer", 100},
                  {"h_min", 4},
                  {"epochs", 1000},
                  {"learning_rate", 2.5e-3},
                  {"batch_size", 64},
                  {"final_lr_fraction", 1.0}};
    c["enumerate"] = {{"load", load_block()}};
    c["solve-lower"] = {{"off", json::array()}, {"load", load_block()}, {"dump", false}};
    c["solve-awls"] = {{"net", ""},          {"surrogate", "pcnn"}, {"lambda", 10.0},
                       {"pool_size", 10},    {"big_m", 100.0},      {"s_bar", 0.0},
                       {"benchmark", true},  {"node_limit", 1000000}, {"time_limit", 0.0},
                       {"load", load_block()}};
    c["eval"] = {{"dataset", ""},
                 {"net", ""},
                 {"profiles", 50},
                 {"methods", json::array({"nn", "pcnn"})},
                 {"lambdas", json::array({10.0})},
                 {"error_floor", 0.01},
                 {"pool_size", 10},
                 {"big_m", 100.0},
                 {"node_limit", 1000000},
                 {"time_limit", 0.0}};
    return c;
}

void merge_config(json& base, const json& patch, const std::string& where) {
    if (!patch.is_object()) fail((where.empty() ? std::string("config") : where) + " must be an object");
    for (const auto& [key, value] : patch.items()) {
        const std::string path = where.empty() ? key : where + "." + key;
        if (!base.contains(key)) fail("unknown key " + path);
        json& slot = base[key];
        if (slot.is_null()) {
            slot = value;
        } else if (slot.is_object() && value.is_object()) {
            merge_config(slot, value, path);
        } else if (slot.is_number() && value.is_number()) {
            slot = value;
        } else if (slot.type() == value.type()) {
            slot = value;
        } else {
            fail(path + " has the wrong type");
        }
    }
}

json read_config_file(const std::string& path, const std::string& command) {
    std::ifstream in(path);
    if (!in) fail("cannot open " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        fail(path + ": " + e.what());
    }
    if (j.is_object() && j.value("schema", "") == "awls.manifest/1") {
        if (j.value("command", "") != command)
            fail(path + " records command " + j.value("command", "?") + ", not " + command);
        return j.at("config");
    }
    return j;
}

void apply_environment(json& config) {
    if (const char* dir = std::getenv("AWLS_OUTPUT_DIR"); dir && *dir) config["output_dir"] = dir;
    if (const char* jobs = std::getenv("AWLS_JOBS"); jobs && *jobs) {
        char* end = nullptr;
        const long v = std::strtol(jobs, &end, 10);
        if (*end != '\0' || v < 1) fail("AWLS_JOBS must be a positive integer");
        config["jobs"] = v;
    }
}

namespace {

void need_file(const std::string& path, const std::string& what) {
    if (path.empty()) fail(what + " is not set");
    if (!std::filesystem::is_regular_file(path)) fail(what + " " + path + " does not exist");
}

void check_load(const json& load, const std::string& where) {
    if (!(load.at("scale").get<double>() > 0.0)) fail(where + ".load.scale must be positive");
    const std::string ds = load.at("dataset").get<std::string>();
    if (!ds.empty()) need_file(ds, where + ".load.dataset");
    if (load.at("profile").get<long>() < 0) fail(where + ".load.profile must be nonnegative");
}

void positive(const json& j, const char* key, const std::string& where) {
    if (!(j.at(key).get<double>() > 0.0)) fail(where + "." + key + " must be positive");
}

void check_split(const json& s) {
    const std::string mode = s.at("mode").get<std::string>();
    if (mode != "profile" && mode != "outage_count" && mode != "line_set")
        fail("split.mode must be profile, outage_count or line_set");
    const double f = s.at("train_fraction").get<double>();
    if (!(f > 0.0 && f < 1.0)) fail("split.train_fraction must lie in (0, 1)");
    for (const char* key : {"extra_fraction", "top_fraction"}) {
        const double v = s.at(key).get<double>();
        if (!(v >= 0.0 && v <= 1.0)) fail(std::string("split.") + key + " must lie in [0, 1]");
    }
    if (s.at("max_train_outages").get<long>() < 0) fail("split.max_train_outages must be nonnegative");
    const json& base = s.at("base_lines");
    if (base.is_string()) need_file(base.get<std::string>(), "split.base_lines");
    else if (mode == "line_set" && !base.is_array()) fail("split.base_lines must be a path or an array for line_set");
}

void check_limits(const json& j, const std::string& where) {
    positive(j, "node_limit", where);
    if (j.at("time_limit").get<double>() < 0.0) fail(where + ".time_limit must be nonnegative");
}

}  // namespace

void validate_config(const json& c, const std::string& command) {
    need_file(c.at("case").get<std::string>(), "case");
    if (c.at("k").get<long>() < 0) fail("k must be nonnegative");
    if (c.at("jobs").get<long>() < 1) fail("jobs must be at least 1");
    if (c.at("seed").get<double>() < 0) fail("seed must be nonnegative");
    const json& lines = c.at("lines");
    const bool needs_lines = command != "partition" && command != "solve-lower" && command != "train";
    if (lines.is_string()) need_file(lines.get<std::string>(), "lines");
    else if (!lines.is_array() && !(lines.is_null() && !needs_lines)) fail("lines must be a path or an array of branch ids");

    const std::string out = c.at("output_dir").get<std::string>();
    if (out.empty()) fail("output_dir is empty");

    if (command == "gen-data") {
        const json& g = c.at("gen-data");
        positive(g, "n_profiles", "gen-data");
        if (g.at("n_topologies").get<long>() < 0 || g.at("max_samples").get<long>() < 0)
            fail("gen-data counts must be nonnegative");
    } else if (command == "partition") {
        if (c.at("partition").at("areas").get<long>() < 1) fail("partition.areas must be at least 1");
    } else if (command == "train") {
        const json& t = c.at("train");
        need_file(t.at("dataset").get<std::string>(), "train.dataset");
        const std::string arch = t.at("arch").get<std::string>();
        if (arch != "single" && arch != "multi") fail("train.arch must be single or multi");
        if (arch == "multi" && !t.at("partition").get<std::string>().empty())
            need_file(t.at("partition").get<std::string>(), "train.partition");
        positive(t, "learning_rate", "train");
        positive(t, "epochs", "train");
        check_split(c.at("split"));
    } else if (command == "enumerate") {
        check_load(c.at("enumerate").at("load"), "enumerate");
    } else if (command == "solve-lower") {
        check_load(c.at("solve-lower").at("load"), "solve-lower");
    } else if (command == "solve-awls") {
        const json& s = c.at("solve-awls");
        need_file(s.at("net").get<std::string>(), "solve-awls.net");
        const std::string sur = s.at("surrogate").get<std::string>();
        if (sur != "nn" && sur != "pcnn") fail("solve-awls.surrogate must be nn or pcnn");
        positive(s, "lambda", "solve-awls");
        positive(s, "pool_size", "solve-awls");
        positive(s, "big_m", "solve-awls");
        check_limits(s, "solve-awls");
        check_load(s.at("load"), "solve-awls");
    } else if (command == "eval") {
        const json& e = c.at("eval");
        need_file(e.at("dataset").get<std::string>(), "eval.dataset");
        need_file(e.at("net").get<std::string>(), "eval.net");
        check_split(c.at("split"));
        positive(e, "pool_size", "eval");
        positive(e, "big_m", "eval");
        positive(e, "error_floor", "eval");
        check_limits(e, "eval");
        for (const auto& m : e.at("methods"))
            if (m != "nn" && m != "pcnn") fail("eval.methods entries must be nn or pcnn");
        for (const auto& l : e.at("lambdas"))
            if (!(l.get<double>() > 0.0)) fail("eval.lambdas must be positive");
    }
}

}  // namespace awls::cli

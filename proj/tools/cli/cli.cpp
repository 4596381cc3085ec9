#include "cli.hpp"

#include <filesystem>
#include <functional>
#include <map>
#include <memory>

#include <CLI11.hpp>

#include "awls/errors.hpp"
#include "awls/grid/topology.hpp"
#include "awls/nn/train.hpp"
#include "awls/pipeline/evaluator.hpp"
#include "commands.hpp"
#include "run_config.hpp"

namespace awls::cli {

namespace {

using nlohmann::json;
using Setter = std::function<void(json&)>;

// Registers a flag whose value, when given, is written to `pointer`.
template <class T>
void bind_flag(CLI::App* app, std::vector<Setter>& setters, const std::string& flag, const std::string& pointer,
          const std::string& help) {
    auto value = std::make_shared<T>();
    CLI::Option* opt = app->add_option(flag, *value, help);
    setters.push_back([value, opt, pointer](json& j) {
        if (opt->count()) j[json::json_pointer(pointer)] = *value;
    });
}

void bind_loads(CLI::App* app, std::vector<Setter>& setters, const std::string& block) {
    bind_flag<double>(app, setters, "--load-scale", "/" + block + "/load/scale", "Scale the nominal (or dataset) load");
    bind_flag<std::string>(app, setters, "--load-dataset", "/" + block + "/load/dataset", "Take the load from a dataset");
    bind_flag<std::size_t>(app, setters, "--profile", "/" + block + "/load/profile", "Profile index in --load-dataset");
}

void fill_default_paths(json& c) {
    const std::filesystem::path out = c.at("output_dir").get<std::string>();
    auto dflt = [&](const char* block, const char* key, const char* file) {
        json& v = c[block][key];
        if (v.get<std::string>().empty()) v = (out / file).string();
    };
    dflt("train", "dataset", "dataset.jsonl");
    dflt("eval", "dataset", "dataset.jsonl");
    dflt("eval", "net", "net.json");
    dflt("solve-awls", "net", "net.json");
}

std::vector<BranchId> resolve_lines(const json& lines) {
    if (lines.is_null()) return {};
    if (lines.is_string()) return load_line_list(lines.get<std::string>());
    return lines.get<std::vector<BranchId>>();
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Adversarial worst-case load shedding lab"};
    app.require_subcommand(1);
    std::string config_path;
    std::vector<Setter> setters;

    const std::map<std::string, std::string> about{
        {"gen-data", "Sample load profiles and label topologies with the relaxed lower level"},
        {"partition", "Spectral partition of the grid into areas"},
        {"train", "Train a dense or block-sparse surrogate"},
        {"enumerate", "Lower-level shed of every topology in the budget set"},
        {"solve-lower", "Relaxed lower-level solve for one topology"},
        {"solve-awls", "Direct-NN or PCNN attacker solve with pool refinement"},
        {"eval", "Surrogate accuracy, ranking and AWLS gaps on held-out profiles"}};
    std::map<std::string, CLI::App*> subs;
    for (const auto& [name, help] : about) {
        CLI::App* s = app.add_subcommand(name, help);
        s->add_option("--config", config_path, "JSON config or a manifest.json from an earlier run");
        bind_flag<std::string>(s, setters, "--case", "/case", "Case file");
        bind_flag<std::string>(s, setters, "--case-id", "/case_id", "Name recorded in reports");
        bind_flag<std::string>(s, setters, "--lines", "/lines", "Candidate line list (JSON)");
        bind_flag<std::size_t>(s, setters, "--k", "/k", "Outage budget");
        bind_flag<std::uint64_t>(s, setters, "--seed", "/seed", "Random seed");
        bind_flag<std::string>(s, setters, "--out", "/output_dir", "Output directory");
        bind_flag<int>(s, setters, "--jobs", "/jobs", "Worker threads");
        subs[name] = s;
    }
    bind_flag<std::size_t>(subs["gen-data"], setters, "--profiles", "/gen-data/n_profiles", "Load profiles");
    bind_flag<std::size_t>(subs["gen-data"], setters, "--topologies", "/gen-data/n_topologies", "Topologies (0 = all)");
    bind_flag<std::size_t>(subs["gen-data"], setters, "--max-samples", "/gen-data/max_samples", "Sample cap (0 = none)");

    bind_flag<int>(subs["partition"], setters, "--areas", "/partition/areas", "Number of areas");
    bind_flag<int>(subs["partition"], setters, "--embed-dim", "/partition/embed_dim", "Embedding dimension");
    bind_flag<std::size_t>(subs["partition"], setters, "--d-max", "/partition/d_max", "Area size cap");

    bind_flag<std::string>(subs["train"], setters, "--dataset", "/train/dataset", "Dataset (JSON lines)");
    bind_flag<std::string>(subs["train"], setters, "--arch", "/train/arch", "single or multi");
    bind_flag<int>(subs["train"], setters, "--areas", "/train/areas", "Areas for the multi architecture");
    bind_flag<std::string>(subs["train"], setters, "--partition", "/train/partition", "Partition file for multi");
    bind_flag<std::vector<std::size_t>>(subs["train"], setters, "--hidden", "/train/hidden", "Hidden widths (single)");
    bind_flag<std::size_t>(subs["train"], setters, "--epochs", "/train/epochs", "Epochs");
    bind_flag<double>(subs["train"], setters, "--lr", "/train/learning_rate", "Learning rate");
    bind_flag<std::size_t>(subs["train"], setters, "--batch", "/train/batch_size", "Batch size (0 = full)");

    for (const char* name : {"train", "eval"}) {
        bind_flag<std::string>(subs[name], setters, "--split", "/split/mode", "profile, outage_count or line_set");
        bind_flag<double>(subs[name], setters, "--train-fraction", "/split/train_fraction", "Training share of profiles");
    }

    bind_loads(subs["enumerate"], setters, "enumerate");

    bind_flag<std::vector<BranchId>>(subs["solve-lower"], setters, "--off", "/solve-lower/off", "Branch ids switched off");
    bind_loads(subs["solve-lower"], setters, "solve-lower");
    auto dump = std::make_shared<bool>(false);
    CLI::Option* dump_opt = subs["solve-lower"]->add_flag("--dump", *dump, "Write the model as lower.lp");
    setters.push_back([dump, dump_opt](json& j) {
        if (dump_opt->count()) j["solve-lower"]["dump"] = true;
    });

    bind_flag<std::string>(subs["solve-awls"], setters, "--net", "/solve-awls/net", "Trained net");
    bind_flag<std::string>(subs["solve-awls"], setters, "--surrogate", "/solve-awls/surrogate", "nn or pcnn");
    bind_flag<double>(subs["solve-awls"], setters, "--lambda", "/solve-awls/lambda", "Slack penalty");
    bind_flag<std::size_t>(subs["solve-awls"], setters, "--pool", "/solve-awls/pool_size", "Incumbent pool size");
    bind_flag<long>(subs["solve-awls"], setters, "--node-limit", "/solve-awls/node_limit", "Branch-and-bound node limit");
    bind_flag<double>(subs["solve-awls"], setters, "--time-limit", "/solve-awls/time_limit", "Seconds per solve (0 = none)");
    bind_loads(subs["solve-awls"], setters, "solve-awls");

    bind_flag<std::string>(subs["eval"], setters, "--dataset", "/eval/dataset", "Dataset (JSON lines)");
    bind_flag<std::string>(subs["eval"], setters, "--net", "/eval/net", "Trained net");
    bind_flag<std::size_t>(subs["eval"], setters, "--profiles", "/eval/profiles", "Fresh profiles for AWLS solves");
    bind_flag<std::vector<double>>(subs["eval"], setters, "--lambda", "/eval/lambdas", "PCNN penalties");
    bind_flag<std::vector<std::string>>(subs["eval"], setters, "--methods", "/eval/methods", "nn and/or pcnn");
    bind_flag<long>(subs["eval"], setters, "--node-limit", "/eval/node_limit", "Branch-and-bound node limit");
    bind_flag<double>(subs["eval"], setters, "--time-limit", "/eval/time_limit", "Seconds per solve (0 = none)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kInvalid;
    }
    std::string command;
    for (const auto& [name, s] : subs)
        if (s->parsed()) command = name;

    try {
        json config = default_config();
        if (!config_path.empty()) merge_config(config, read_config_file(config_path, command));
        apply_environment(config);
        for (const Setter& s : setters) s(config);
        fill_default_paths(config);
        validate_config(config, command);

        Context ctx;
        ctx.command = command;
        ctx.config = config;
        ctx.out = &out;
        ctx.grid = load_case(config.at("case").get<std::string>());
        ctx.case_id = config.at("case_id").get<std::string>();
        if (ctx.case_id.empty()) ctx.case_id = std::filesystem::path(config.at("case").get<std::string>()).stem();
        ctx.lines = resolve_lines(config.at("lines"));
        ctx.k = config.at("k").get<std::size_t>();
        ctx.seed = config.at("seed").get<std::uint64_t>();
        ctx.jobs = config.at("jobs").get<int>();
        ctx.artifacts.dir = config.at("output_dir").get<std::string>();
        std::filesystem::create_directories(ctx.artifacts.dir);

        if (command == "gen-data") cmd_gen_data(ctx);
        else if (command == "partition") cmd_partition(ctx);
        else if (command == "train") cmd_train(ctx);
        else if (command == "enumerate") cmd_enumerate(ctx);
        else if (command == "solve-lower") cmd_solve_lower(ctx);
        else if (command == "solve-awls") cmd_solve_awls(ctx);
        else cmd_eval(ctx);

        write_manifest(command, config, ctx.artifacts);
        if (ctx.limit_hit) {
            err << "awls " << command << ": a solve stopped at a limit; results are the best found\n";
            return kSolverLimit;
        }
        return kOk;
    } catch (const LowerLevelError& e) {
        err << "awls " << command << ": " << e.what() << '\n';
        return kSolverLimit;
    } catch (const ParseError& e) {
        err << "awls " << command << ": parse error: " << e.what() << '\n';
    } catch (const ValidationError& e) {
        err << "awls " << command << ": invalid input (" << e.rule() << "): " << e.what() << '\n';
    } catch (const ContractError& e) {
        err << "awls " << command << ": invalid request: " << e.what() << '\n';
    } catch (const TrainingError& e) {
        err << "awls " << command << ": training failed: " << e.what() << '\n';
    } catch (const nlohmann::json::exception& e) {
        err << "awls " << command << ": malformed JSON: " << e.what() << '\n';
    } catch (const std::exception& e) {
        err << "awls " << command << ": " << e.what() << '\n';
    }
    return kInvalid;
}

}  // namespace awls::cli

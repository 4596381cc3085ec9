#pragma once

#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "awls/grid/load_profile.hpp"
#include "awls/grid/network_case.hpp"
#include "manifest.hpp"

namespace awls::cli {

struct Context {
    std::string command;
    nlohmann::json config;
    NetworkCase grid;
    std::string case_id;
    std::vector<BranchId> lines;
    std::size_t k = 0;
    std::uint64_t seed = 0;
    int jobs = 1;
    Artifacts artifacts;
    std::ostream* out = nullptr;
    bool limit_hit = false;  // some solve stopped short of optimality
};

void cmd_gen_data(Context& ctx);
void cmd_partition(Context& ctx);
void cmd_train(Context& ctx);
void cmd_enumerate(Context& ctx);
void cmd_solve_lower(Context& ctx);
void cmd_solve_awls(Context& ctx);
void cmd_eval(Context& ctx);

}  // namespace awls::cli

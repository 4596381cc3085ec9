// Writes a critical-line list in the format read by --lines.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "awls/pipeline/critical_lines.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Greedy critical-line selection"};
    std::string case_path, out_path;
    awls::CriticalLineOptions opt;
    double scale = 1.0;
    app.add_option("--case", case_path, "Case file")->required()->check(CLI::ExistingFile);
    app.add_option("--count", opt.count, "Lines to pick")->check(CLI::PositiveNumber);
    app.add_option("--depth", opt.depth, "Chosen lines checked together with each candidate");
    app.add_option("--load-scale", scale, "Multiplier on the nominal load")->check(CLI::PositiveNumber);
    app.add_option("--jobs", opt.jobs, "Worker threads")->check(CLI::PositiveNumber);
    app.add_option("--out", out_path, "Output JSON (stdout if omitted)");
    CLI11_PARSE(app, argc, argv);

    try {
        const awls::NetworkCase c = awls::load_case(case_path);
        awls::LoadProfile load = awls::LoadProfile::nominal(c);
        for (double& v : load.pd) v *= scale;
        for (double& v : load.qd) v *= scale;
        const awls::CriticalLines r = awls::select_critical_lines(c, load, opt);
        if (r.lines.size() < opt.count)
            std::cerr << "only " << r.lines.size() << " lines pass the connectivity rule\n";

        const std::string selection = "highest single-outage relaxed shed at " +
                                      (scale == 1.0 ? std::string("nominal load") : "load scale " + std::to_string(scale)) +
                                      ", skipping lines whose removal together with up to " +
                                      std::to_string(opt.depth) + " already chosen lines would island a bus";
        std::vector<awls::BranchId> lines = r.lines;
        std::sort(lines.begin(), lines.end());
        const nlohmann::json j = {{"case", std::filesystem::path(case_path).filename().string()},
                                  {"selection", selection},
                                  {"lines", lines}};
        if (out_path.empty()) {
            std::cout << j.dump(2) << '\n';
        } else {
            std::ofstream(out_path) << j.dump(2) << '\n';
        }
        std::cerr << "single-outage shed:";
        for (double v : r.single_shed) std::cerr << ' ' << v;
        std::cerr << '\n';
    } catch (const std::exception& e) {
        std::cerr << "critical_lines: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

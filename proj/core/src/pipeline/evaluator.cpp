#include "awls/pipeline/evaluator.hpp"

#include <atomic>
#include <filesystem>
#include <fstream>
#include <optional>

#include "awls/model/powerflow.hpp"

namespace awls {

struct ShedEvaluator::Impl {
    const NetworkCase* c;
    SolverConfig config;
    std::optional<Topology> topo;
    std::optional<LowerLevelModel> model;
    std::optional<LpSolver> lp;

    void rebuild(const Topology& t, const LoadProfile& load) {
        model.emplace(build_lower_level(*c, load, t));
        lp.emplace(model->system, config);
        topo = t;
    }

    void retarget(const LoadProfile& load) {
        const LoadUpdate u = load_update(*model, load);
        for (const auto& [v, hi] : u.var_upper) lp->set_var_bounds(v, 0.0, hi);
        for (const auto& [r, rhs] : u.row_rhs) lp->set_row_bounds(r, rhs, rhs);
    }

    ShedResult collect(const SolveResult& r) const {
        ShedResult out;
        out.status = r.status;
        out.iterations = r.iterations;
        if (!r.optimal()) return out;
        out.shed = r.objective;
        for (const BusVars& bv : model->vars.bus) out.bus_shed.push_back(r.assignment[bv.dp] + r.assignment[bv.dq]);
        return out;
    }
};

ShedEvaluator::ShedEvaluator(const NetworkCase& c, SolverConfig config) : impl_(std::make_unique<Impl>()) {
    config.validate();
    impl_->c = &c;
    impl_->config = config;
}
ShedEvaluator::~ShedEvaluator() = default;
ShedEvaluator::ShedEvaluator(ShedEvaluator&&) noexcept = default;
ShedEvaluator& ShedEvaluator::operator=(ShedEvaluator&&) noexcept = default;

ShedResult ShedEvaluator::evaluate(const Topology& topo, const LoadProfile& load) {
    load.validate(*impl_->c);
    const bool warm = impl_->topo && *impl_->topo == topo;
    if (warm) impl_->retarget(load);
    else impl_->rebuild(topo, load);
    ShedResult r = impl_->collect(impl_->lp->solve());
    if (warm && r.status != SolveStatus::Optimal) {
        const long it = r.iterations;
        impl_->rebuild(topo, load);
        r = impl_->collect(impl_->lp->solve());
        r.iterations += it;
    }
    return r;
}

double ShedEvaluator::shed(const Topology& topo, const LoadProfile& load) {
    const ShedResult r = evaluate(topo, load);
    if (r.status == SolveStatus::Optimal) return r.shed;
    static std::atomic<int> counter{0};
    const auto path = std::filesystem::temp_directory_path() /
                      ("awls_lower_level_" + std::to_string(counter.fetch_add(1)) + ".lp");
    std::ofstream out(path);
    write_lp(build_lower_level(*impl_->c, load, topo).system, out);
    throw LowerLevelError(std::string("lower-level solve ended ") + status_name(r.status) + " for topology " +
                          topology_to_json(topo) + "; model written to " + path.string());
}

}  // namespace awls

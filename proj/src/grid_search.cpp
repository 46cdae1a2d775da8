#include "mdi/grid_search.hpp"

#include <algorithm>
#include <cmath>

#include "mdi/error.hpp"

namespace mdi {

std::vector<GridPoint> enumerate_grid(const std::vector<GridAxis>& space) {
    if (space.empty()) throw InvalidArgument("empty search space");
    for (const auto& a : space)
        if (a.values.empty()) throw InvalidArgument("search axis '" + a.name + "' has no values");
    std::vector<GridPoint> out{{}};
    for (const auto& axis : space) {
        std::vector<GridPoint> next;
        next.reserve(out.size() * axis.values.size());
        for (const auto& prefix : out)
            for (double v : axis.values) {
                auto p = prefix;
                p.emplace_back(axis.name, v);
                next.push_back(std::move(p));
            }
        out = std::move(next);
    }
    return out;
}

GridSearchResult grid_search(const std::vector<GridAxis>& space, const std::function<double(const GridPoint&)>& objective) {
    GridSearchResult result;
    bool found = false;
    for (auto& point : enumerate_grid(space)) {
        GridTrial trial;
        trial.point = point;
        try {
            const double v = objective(point);
            trial.objective = v;
            if (!found || v < result.best_objective) {
                result.best = point;
                result.best_objective = v;
                found = true;
            }
        } catch (const Error& e) {
            trial.diagnostic = e.what();
        }
        result.trace.push_back(std::move(trial));
    }
    if (!found) {
        std::string msg = "every grid point aborted:";
        for (const auto& t : result.trace) msg += "\n  " + t.diagnostic;
        throw TrainingError(msg);
    }
    return result;
}

bool is_mlp_axis(const std::string& name) {
    static const char* axes[] = {"lr_scale", "dropout", "momentum_start", "momentum_end", "momentum_ramp",
                                 "epochs",   "batch_size", "rho", "eps"};
    return std::any_of(std::begin(axes), std::end(axes), [&](const char* a) { return name == a; });
}

MlpParams apply_mlp_point(MlpParams p, const GridPoint& point) {
    for (const auto& [name, v] : point) {
        if (name == "lr_scale")
            p.lr_scale = v;
        else if (name == "dropout")
            p.dropout = {v};
        else if (name == "momentum_start")
            p.momentum.start = v;
        else if (name == "momentum_end")
            p.momentum.end = v;
        else if (name == "momentum_ramp")
            p.momentum.ramp_epochs = static_cast<int>(std::lround(v));
        else if (name == "epochs")
            p.epochs = static_cast<int>(std::lround(v));
        else if (name == "batch_size")
            p.batch_size = static_cast<int>(std::lround(v));
        else if (name == "rho")
            p.rho = v;
        else if (name == "eps")
            p.eps = v;
        else
            throw InvalidArgument("unknown MLP search axis: " + name);
    }
    return p;
}

}  // namespace mdi

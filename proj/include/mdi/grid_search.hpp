#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mdi/mlp.hpp"

namespace mdi {

struct GridAxis {
    std::string name;
    std::vector<double> values;
};

using GridPoint = std::vector<std::pair<std::string, double>>;

struct GridTrial {
    GridPoint point;
    std::optional<double> objective;  // empty when training aborted
    std::string diagnostic;
};

struct GridSearchResult {
    GridPoint best;
    double best_objective = 0.0;
    std::vector<GridTrial> trace;  // one entry per grid point, in grid order
};

// Enumerates the Cartesian product of the axes (first axis varies slowest)
// and minimizes `objective`. Ties keep the earlier point. Objectives that
// throw mdi::Error are recorded as aborted; if every point aborts the
// diagnostics are rethrown together.
GridSearchResult grid_search(const std::vector<GridAxis>& space, const std::function<double(const GridPoint&)>& objective);

std::vector<GridPoint> enumerate_grid(const std::vector<GridAxis>& space);

// MLP hyperparameter axes: lr_scale, dropout, momentum_start, momentum_end,
// momentum_ramp, epochs, batch_size, rho, eps.
bool is_mlp_axis(const std::string& name);
MlpParams apply_mlp_point(MlpParams base, const GridPoint& point);

}  // namespace mdi

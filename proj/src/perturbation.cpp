#include "mdi/perturbation.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "mdi/error.hpp"
#include "mdi/random.hpp"

namespace mdi {

const char* to_string(Mechanism m) { return m == Mechanism::mcar ? "MCAR" : "MNAR"; }

Mechanism parse_mechanism(const std::string& s) {
    if (s == "MCAR" || s == "mcar") return Mechanism::mcar;
    if (s == "MNAR" || s == "mnar") return Mechanism::mnar;
    throw InvalidArgument("unknown missingness mechanism: " + s);
}

void validate_delta(double delta) {
    if (delta == 0.0) return;
    if (!(delta >= 0.05 && delta <= 0.95))
        throw InvalidArgument("delta must be 0 or within [0.05, 0.95], got " + std::to_string(delta));
}

nlohmann::json to_json(const PerturbationReceipt& r) {
    auto cells = nlohmann::json::array();
    for (auto [i, j] : r.masked) cells.push_back({i, j});
    return {{"mechanism", to_string(r.mechanism)},
            {"delta", r.delta},
            {"categorical_cells", r.categorical_cells},
            {"pre_existing", r.pre_existing},
            {"target_count", r.target_count},
            {"masked_count", r.masked.size()},
            {"achieved_fraction", r.achieved_fraction},
            {"masked", std::move(cells)}};
}

namespace {

struct Plan {
    std::vector<std::pair<std::size_t, std::size_t>> observed;
    std::size_t cells = 0;
    std::size_t pre = 0;
    std::size_t target = 0;
    std::size_t need = 0;
};

Plan plan(const Dataset& ds, double delta, Mechanism mech) {
    validate_delta(delta);
    const auto cat = ds.categorical_features();
    if (cat.empty()) throw InvalidArgument("perturbation needs at least one categorical feature");
    Plan p;
    p.cells = ds.rows() * cat.size();
    for (std::size_t i = 0; i < ds.rows(); ++i)
        for (auto j : cat) {
            if (ds.is_missing(i, j))
                ++p.pre;
            else
                p.observed.emplace_back(i, j);
        }
    const double pre_fraction = static_cast<double>(p.pre) / static_cast<double>(p.cells);
    if (delta > 0 && pre_fraction > delta) {
        std::ostringstream msg;
        msg << to_string(mech) << " perturbation refused: pre-existing categorical missing fraction " << pre_fraction
            << " already exceeds delta " << delta;
        throw InvalidArgument(msg.str());
    }
    p.target = round_half_up(delta * static_cast<double>(p.cells));
    p.need = p.target > p.pre ? p.target - p.pre : 0;
    return p;
}

Perturbed apply(const Dataset& ds, Mechanism mech, double delta, const Plan& p,
                std::vector<std::pair<std::size_t, std::size_t>> chosen) {
    std::sort(chosen.begin(), chosen.end());
    Perturbed out{ds, {}};
    for (auto [i, j] : chosen) out.data.set_missing(i, j);
    auto& r = out.receipt;
    r.mechanism = mech;
    r.delta = delta;
    r.categorical_cells = p.cells;
    r.pre_existing = p.pre;
    r.target_count = p.target;
    r.achieved_fraction = static_cast<double>(p.pre + chosen.size()) / static_cast<double>(p.cells);
    r.masked = std::move(chosen);
    return out;
}

Perturbed identity(const Dataset& ds, Mechanism mech) {
    Perturbed out{ds, {}};
    out.receipt.mechanism = mech;
    const auto cat = ds.categorical_features();
    out.receipt.categorical_cells = ds.rows() * cat.size();
    for (std::size_t i = 0; i < ds.rows(); ++i)
        for (auto j : cat) out.receipt.pre_existing += ds.is_missing(i, j);
    out.receipt.target_count = out.receipt.pre_existing;
    if (out.receipt.categorical_cells)
        out.receipt.achieved_fraction =
            static_cast<double>(out.receipt.pre_existing) / static_cast<double>(out.receipt.categorical_cells);
    return out;
}

}  // namespace

Perturbed perturb_mcar(const Dataset& train, double delta, std::uint64_t seed) {
    if (delta == 0.0) return identity(train, Mechanism::mcar);
    Plan p = plan(train, delta, Mechanism::mcar);
    Rng rng = make_rng(seed);
    auto& obs = p.observed;
    // Partial Fisher-Yates: the first `need` slots become a uniform sample.
    for (std::size_t k = 0; k < p.need; ++k) {
        const auto r = k + uniform_index(rng, obs.size() - k);
        std::swap(obs[k], obs[r]);
    }
    std::vector<std::pair<std::size_t, std::size_t>> chosen(obs.begin(), obs.begin() + static_cast<std::ptrdiff_t>(p.need));
    return apply(train, Mechanism::mcar, delta, p, std::move(chosen));
}

Perturbed perturb_mnar(const Dataset& train, double delta, std::uint64_t seed, const FocusMap& focus) {
    if (focus.empty()) throw InvalidArgument("MNAR perturbation needs a non-empty focus map");
    std::vector<int> focus_code(train.features(), -1);
    for (const auto& [name, token] : focus) {
        std::size_t j = 0;
        while (j < train.features() && train.feature(j).name != name) ++j;
        if (j == train.features()) throw InvalidArgument("MNAR focus names unknown feature: " + name);
        if (!train.feature(j).is_categorical()) throw InvalidArgument("MNAR focus feature is not categorical: " + name);
        auto code = train.feature(j).category_index(token);
        if (!code) throw InvalidArgument("MNAR focus category '" + token + "' absent from feature " + name);
        focus_code[j] = *code;
    }
    if (delta == 0.0) return identity(train, Mechanism::mnar);
    Plan p = plan(train, delta, Mechanism::mnar);
    Rng rng = make_rng(seed);

    auto obs = p.observed;
    shuffle_range(obs.begin(), obs.end(), rng);
    // Integer weights keep the systematic design exact: unit i owns an interval
    // of length need * w_i on [0, need * W) and is selected when one of the
    // points u + m * W (m = 0..need-1) falls in it.
    const auto focus_w = static_cast<std::uint64_t>(kMnarFocusWeight);
    std::vector<std::uint64_t> w(obs.size());
    for (std::size_t k = 0; k < obs.size(); ++k) {
        auto [i, j] = obs[k];
        w[k] = (focus_code[j] >= 0 && train.category(i, j) == focus_code[j]) ? focus_w : 1;
    }
    std::vector<bool> certain(obs.size(), false);
    std::vector<std::pair<std::size_t, std::size_t>> chosen;
    std::uint64_t need = p.need;
    // Units whose inclusion probability would exceed 1 are taken with
    // certainty; the remainder is redistributed.
    while (need > 0) {
        std::uint64_t total = 0;
        for (std::size_t k = 0; k < obs.size(); ++k)
            if (!certain[k]) total += w[k];
        bool changed = false;
        for (std::size_t k = 0; k < obs.size() && need > 0; ++k) {
            if (certain[k] || need * w[k] < total) continue;
            certain[k] = true;
            chosen.push_back(obs[k]);
            --need;
            total -= w[k];
            changed = true;
        }
        if (!changed) break;
    }
    if (need > 0) {
        std::uint64_t total = 0;
        for (std::size_t k = 0; k < obs.size(); ++k)
            if (!certain[k]) total += w[k];
        std::uint64_t point = uniform_index(rng, total);
        std::uint64_t cum = 0;
        for (std::size_t k = 0; k < obs.size() && need > 0; ++k) {
            if (certain[k]) continue;
            const std::uint64_t hi = cum + need * w[k];
            if (point < hi) {
                chosen.push_back(obs[k]);
                point += total;
            }
            cum = hi;
        }
    }
    return apply(train, Mechanism::mnar, delta, p, std::move(chosen));
}

Perturbed perturb(const Dataset& train, const PerturbationSpec& spec) {
    if (spec.mechanism == Mechanism::mcar) return perturb_mcar(train, spec.delta, spec.seed);
    return perturb_mnar(train, spec.delta, spec.seed, spec.focus);
}

FocusMap modal_focus(const Dataset& ds) {
    FocusMap out;
    for (auto j : ds.categorical_features()) {
        std::vector<std::size_t> counts(ds.feature(j).categories.size(), 0);
        for (std::size_t i = 0; i < ds.rows(); ++i)
            if (!ds.is_missing(i, j)) ++counts[static_cast<std::size_t>(ds.category(i, j))];
        if (counts.empty()) continue;
        const auto best = std::max_element(counts.begin(), counts.end()) - counts.begin();
        out[ds.feature(j).name] = ds.feature(j).categories[static_cast<std::size_t>(best)];
    }
    return out;
}

FocusMap uniform_focus(const Dataset& ds, const std::string& token) {
    FocusMap out;
    for (auto j : ds.categorical_features())
        if (ds.feature(j).category_index(token)) out[ds.feature(j).name] = token;
    return out;
}

}  // namespace mdi

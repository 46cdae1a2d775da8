#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "mdi/dataset.hpp"

namespace mdi {

enum class Mechanism { mcar, mnar };

const char* to_string(Mechanism m);
Mechanism parse_mechanism(const std::string& s);

// Feature name -> category token that is masked preferentially under MNAR.
using FocusMap = std::map<std::string, std::string>;

// Weight of a focus-category cell relative to any other observed cell.
inline constexpr double kMnarFocusWeight = 3.0;

struct PerturbationSpec {
    Mechanism mechanism = Mechanism::mcar;
    // Target TOTAL missing fraction over categorical cells, pre-existing
    // missingness included. 0, or within [0.05, 0.95].
    double delta = 0.0;
    std::uint64_t seed = 0;
    FocusMap focus;  // MNAR only
};

struct PerturbationReceipt {
    Mechanism mechanism = Mechanism::mcar;
    double delta = 0.0;
    std::size_t categorical_cells = 0;
    std::size_t pre_existing = 0;
    std::size_t target_count = 0;
    std::vector<std::pair<std::size_t, std::size_t>> masked;  // (row, feature), row-major order
    double achieved_fraction = 0.0;
};

nlohmann::json to_json(const PerturbationReceipt& r);

struct Perturbed {
    Dataset data;
    PerturbationReceipt receipt;
};

// Masks exactly enough observed categorical cells, chosen uniformly without
// replacement, to bring the categorical missing count to
// round_half_up(delta * n * K_cat). Continuous features and labels untouched.
Perturbed perturb_mcar(const Dataset& train, double delta, std::uint64_t seed);

// As perturb_mcar, but each observed cell holding its feature's focus category
// is kMnarFocusWeight times as likely to be masked as any other observed cell.
// Uses randomized systematic PPS sampling so inclusion probabilities are
// exactly proportional to weight (capped at 1) with an exact total count.
Perturbed perturb_mnar(const Dataset& train, double delta, std::uint64_t seed, const FocusMap& focus);

Perturbed perturb(const Dataset& train, const PerturbationSpec& spec);

// Default MNAR focus: the modal observed category of every categorical
// feature (ties -> earlier category).
FocusMap modal_focus(const Dataset& ds);
// Same token for every categorical feature that has it (CVRs: "y").
FocusMap uniform_focus(const Dataset& ds, const std::string& token);

// delta in {0} U [0.05, 0.95]
void validate_delta(double delta);

}  // namespace mdi

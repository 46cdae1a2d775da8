#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mdi/dataset.hpp"
#include "mdi/grid_search.hpp"
#include "mdi/imputation.hpp"
#include "mdi/model.hpp"
#include "mdi/perturbation.hpp"
#include "mdi/uci.hpp"

namespace mdi {

enum class DatasetId { adult, cvrs, custom };

const char* to_string(DatasetId id);
DatasetId parse_dataset_id(const std::string& s);

struct DatasetSource {
    DatasetId id = DatasetId::adult;
    std::vector<std::filesystem::path> paths;
    UciFormat format;  // used for custom; adult/cvrs use the built-in formats
};

// Loads the files, concatenated in order.
Dataset load_source(const DatasetSource& source);

// Either the one-hot treatment (no imputer) or an imputation method.
struct Treatment {
    std::optional<ImputerParams> imputer;

    std::string label() const { return imputer ? imputer->label() : "one_hot"; }
};

Treatment parse_treatment(const std::string& name);

struct ClassifierConfig {
    ClassifierSpec spec;
    // Optional MLP hyperparameter grid, searched on the training matrix.
    std::vector<GridAxis> search;

    std::string label() const { return to_string(spec.kind); }
};

struct ExperimentGrid {
    DatasetSource dataset;
    Mechanism mechanism = Mechanism::mcar;
    std::vector<double> deltas = {0.0, 0.1, 0.2, 0.3, 0.4};
    std::vector<Treatment> treatments;
    std::vector<ClassifierConfig> classifiers;
    std::uint64_t seed = kDefaultSeed;
    std::size_t replicates = 5;
    double train_fraction = 2.0 / 3.0;
    bool stratified = false;
    // MNAR focus; empty selects the dataset default ("y" for CVRs, modal
    // categories otherwise).
    FocusMap focus;
    std::size_t jobs = 1;
    bool timing = false;

    void validate() const;
    std::size_t cell_count() const { return classifiers.size() * treatments.size() * deltas.size(); }
};

// 3 classifiers x (one-hot + 6 imputers) x the given deltas.
ExperimentGrid paper_grid(DatasetSource source, Mechanism mechanism = Mechanism::mcar);

struct CellCoordinates {
    std::string dataset;
    std::string classifier;
    std::string treatment;
    std::string mechanism;
    double delta = 0.0;
};

struct RunResult {
    CellCoordinates cell;
    bool ok = true;
    double error = 0.0;
    double stdev = 0.0;  // population standard deviation of the replicate errors
    std::vector<double> replicate_errors;
    double seconds = 0.0;
    std::string diagnostic;
    std::vector<std::string> notes;
};

// Seeds derived from cell coordinates, so adding or reordering cells never
// changes another cell's numbers.
std::uint64_t split_seed(std::uint64_t base);
std::uint64_t perturbation_seed(std::uint64_t base, Mechanism mechanism, double delta);
std::uint64_t imputation_seed(std::uint64_t base, const std::string& treatment, Mechanism mechanism, double delta);
std::uint64_t cell_seed(std::uint64_t base, const CellCoordinates& cell);

// Mean and population standard deviation.
std::pair<double, double> mean_and_stdev(const std::vector<double>& values);

// Training and test matrices for one (delta, treatment) pair.
struct PreparedData {
    EncodedMatrix train;
    EncodedMatrix test;
    std::vector<std::string> notes;
};

PreparedData prepare(const SplitResult& split, const Schema& full_schema, const ExperimentGrid& grid, double delta,
                     const Treatment& treatment);

RunResult run_cell(const PreparedData& data, const ClassifierConfig& classifier, const CellCoordinates& cell,
                   std::uint64_t base_seed, std::size_t replicates);

// Results in cell order: classifier (outer), treatment, delta (inner).
std::vector<RunResult> run_grid(const ExperimentGrid& grid);
std::vector<RunResult> run_grid(const ExperimentGrid& grid, const Dataset& data);

// Columns: dataset, classifier, treatment, mechanism, delta, error, stdev,
// replicates, seconds, status. Replicate errors are ';'-separated; numbers use
// the shortest round-trip form.
void write_report_csv(std::ostream& out, const std::vector<RunResult>& results);
std::vector<RunResult> read_report_csv(std::istream& in);
nlohmann::json report_to_json(const std::vector<RunResult>& results);
void emit_report(const std::filesystem::path& path, const std::vector<RunResult>& results, const std::string& format);

// Parses an experiment config; unknown keys, methods or classifiers are
// rejected before any work is done. Relative data paths resolve against
// `data_dir`.
ExperimentGrid parse_experiment_config(const nlohmann::json& config, const std::filesystem::path& data_dir);

struct ConfigOutput {
    std::optional<std::filesystem::path> path;
    std::string format = "csv";
};
ConfigOutput parse_output_section(const nlohmann::json& config);

}  // namespace mdi

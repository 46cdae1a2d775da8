// mdi: command-line front end for the missing-data study pipeline.

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "mdi/error.hpp"
#include "mdi/experiment.hpp"
#include "mdi/fetch.hpp"
#include "mdi/imputation.hpp"
#include "mdi/model.hpp"
#include "mdi/patterns.hpp"
#include "mdi/perturbation.hpp"
#include "mdi/random.hpp"
#include "mdi/uci.hpp"

namespace fs = std::filesystem;
using namespace mdi;

namespace {

constexpr int kExitError = 1;
constexpr int kExitCellsFailed = 3;

fs::path data_dir(const std::string& flag) {
    if (!flag.empty()) return flag;
    if (const char* d = std::getenv("MDI_DATA_DIR"); d && *d) return d;
    return default_cache_dir();
}

// How to read the input files of a dataset-level subcommand.
struct InputOptions {
    std::vector<std::string> paths;
    std::string dataset = "custom";
    std::string columns;
    std::size_t label_column = 0;
    std::string missing = "?";
    std::string data_dir;

    void add_to(CLI::App* app) {
        app->add_option("paths", paths, "Input files (UCI text or columnar); default: the dataset's files");
        app->add_option("--dataset", dataset, "adult, cvrs, or custom")
            ->check(CLI::IsMember({"adult", "cvrs", "custom"}));
        app->add_option("--columns", columns, "Custom column kinds, one letter per column: c or n");
        app->add_option("--label-column", label_column, "Custom label column index");
        app->add_option("--missing", missing, "Missing-value symbol");
        app->add_option("--data-dir", data_dir, "Directory holding the benchmark files");
    }

    UciFormat format() const {
        if (dataset == "adult") return adult_format();
        if (dataset == "cvrs") return cvrs_format();
        UciFormat f;
        f.missing_symbol = missing;
        f.label_column = label_column;
        for (char ch : columns) {
            if (ch == 'c')
                f.column_kinds.push_back(FeatureKind::categorical);
            else if (ch == 'n')
                f.column_kinds.push_back(FeatureKind::continuous);
            else
                throw InvalidArgument("--columns takes the letters c and n");
        }
        return f;
    }

    Dataset load() const {
        std::vector<fs::path> files(paths.begin(), paths.end());
        if (files.empty()) {
            if (dataset == "custom") throw InvalidArgument("no input files given");
            DatasetSource src;
            src.id = parse_dataset_id(dataset);
            const auto dir = data_dir_path();
            files = src.id == DatasetId::adult ? std::vector<fs::path>{dir / "adult.data", dir / "adult.test"}
                                                : std::vector<fs::path>{dir / "house-votes-84.data"};
        }
        if (files.size() == 1 && is_columnar(files.front())) return load_columnar(files.front());
        auto f = format();
        if (f.column_kinds.empty()) throw InvalidArgument("custom input needs --columns");
        f.missing_symbol = dataset == "custom" ? missing : f.missing_symbol;
        return load_uci(files, f);
    }

    fs::path data_dir_path() const { return ::data_dir(data_dir); }

    static bool is_columnar(const fs::path& p) {
        std::ifstream in(p);
        std::string first;
        return in && std::getline(in, first) && first.rfind("#mdi-columnar", 0) == 0;
    }
};

void write_dataset(const Dataset& ds, const std::string& out, bool uci, const InputOptions& in) {
    std::ofstream file;
    std::ostream* os = &std::cout;
    if (!out.empty() && out != "-") {
        file.open(out);
        if (!file) throw IoError("cannot write " + out);
        os = &file;
    }
    if (uci) {
        auto f = in.format();
        if (f.column_kinds.empty()) {
            // Columnar input: synthesize a format with the label last.
            for (const auto& fs_ : ds.schema()) f.column_kinds.push_back(fs_.kind);
            f.column_kinds.push_back(FeatureKind::categorical);
            f.label_column = ds.features();
        }
        write_uci(*os, ds, f);
    } else {
        write_columnar(*os, ds);
    }
    if (!*os) throw IoError("write failed: " + out);
}

void write_text(const std::string& out, const std::string& text) {
    if (out.empty() || out == "-") {
        std::cout << text;
        return;
    }
    std::ofstream f(out);
    if (!f) throw IoError("cannot write " + out);
    f << text;
    if (!f) throw IoError("write failed: " + out);
}

FocusMap parse_focus(const std::vector<std::string>& items) {
    FocusMap focus;
    for (const auto& it : items) {
        const auto eq = it.find('=');
        if (eq == std::string::npos) throw InvalidArgument("--focus expects feature=category, got " + it);
        focus[it.substr(0, eq)] = it.substr(eq + 1);
    }
    return focus;
}

// Classifier flags shared by `train`.
struct ClassifierOptions {
    std::string kind = "random_forest";
    std::optional<int> max_depth;
    std::size_t n_trees = 100;
    std::string mtry = "sqrt";
    std::vector<int> hidden = {128, 128};
    double dropout = 0.5;
    int epochs = 10;
    int batch_size = 128;
    double lr_scale = 1.0;
    double lambda = 1e-3;
    unsigned threads = 1;

    void add_to(CLI::App* app) {
        app->add_option("--classifier", kind, "decision_tree, random_forest, mlp, logistic, linear_svm");
        app->add_option("--max-depth", max_depth, "Tree depth limit (default unlimited)");
        app->add_option("--trees", n_trees, "Forest size");
        app->add_option("--mtry", mtry, "Features per split: sqrt, log2, all");
        app->add_option("--hidden", hidden, "MLP hidden layer widths")->delimiter(',');
        app->add_option("--dropout", dropout, "MLP dropout rate");
        app->add_option("--epochs", epochs, "Training epochs (MLP, logistic, SVM)");
        app->add_option("--batch-size", batch_size, "Mini-batch size");
        app->add_option("--lr-scale", lr_scale, "Multiplier on the Adadelta step");
        app->add_option("--lambda", lambda, "Linear SVM penalty");
        app->add_option("--threads", threads, "Forest training threads");
    }

    ClassifierSpec spec(std::uint64_t seed) const {
        ClassifierSpec s;
        s.kind = parse_model_kind(kind);
        s.tree.max_depth = max_depth;
        s.forest.tree.max_depth = max_depth;
        s.forest.n_trees = n_trees;
        s.forest.mtry = parse_feature_rule(mtry);
        s.forest.seed = seed;
        s.forest.threads = threads;
        s.mlp.hidden = hidden;
        s.mlp.dropout = {dropout};
        s.mlp.epochs = epochs;
        s.mlp.batch_size = batch_size;
        s.mlp.lr_scale = lr_scale;
        s.mlp.seed = seed;
        s.svm.lambda = lambda;
        s.svm.epochs = epochs;
        s.svm.seed = seed;
        return s;
    }
};

ImputerParams imputer_from_flags(const std::string& method, std::size_t k, const std::string& predictor,
                                 const std::string& fallback) {
    ImputerParams p = parse_imputer(method);
    if (p.method == ImputationMethod::model && method == "model") p.predictor = parse_predictor_family(predictor);
    p.k = k;
    p.fallback = parse_donor_fallback(fallback);
    return p;
}

void print_summary(const std::vector<RunResult>& results) {
    std::cout << std::left << std::setw(16) << "classifier" << std::setw(22) << "treatment" << std::setw(8) << "delta"
              << "error" << '\n';
    for (const auto& r : results) {
        std::ostringstream err;
        if (r.ok)
            err << std::fixed << std::setprecision(4) << r.error << " +/- " << r.stdev;
        else
            err << "FAILED: " << r.diagnostic;
        std::cout << std::left << std::setw(16) << r.cell.classifier << std::setw(22) << r.cell.treatment << std::setw(8)
                  << r.cell.delta << err.str() << '\n';
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Missing-data perturbation, imputation and classification benchmark"};
    app.require_subcommand(1);

    // fetch
    auto* fetch = app.add_subcommand("fetch", "Download and verify the benchmark files");
    std::string fetch_dataset = "all", fetch_cache, fetch_base = kUciBaseUrl;
    fetch->add_option("--dataset", fetch_dataset, "adult, cvrs, or all")->check(CLI::IsMember({"adult", "cvrs", "all"}));
    fetch->add_option("--cache-dir", fetch_cache, "Cache directory (default $MDI_CACHE_DIR)");
    fetch->add_option("--base-url", fetch_base, "Repository base URL");

    // inspect
    auto* inspect = app.add_subcommand("inspect", "Report missing-data patterns and feature associations");
    InputOptions inspect_in;
    inspect_in.add_to(inspect);
    std::string inspect_out;
    inspect->add_option("-o,--out", inspect_out, "Write the JSON report here instead of stdout");

    // perturb
    auto* perturb_cmd = app.add_subcommand("perturb", "Mask categorical cells at a target missing fraction");
    InputOptions perturb_in;
    perturb_in.add_to(perturb_cmd);
    std::string mechanism = "MCAR", perturb_out, receipt_out;
    double delta = 0.0;
    std::uint64_t perturb_seed = kDefaultSeed;
    std::vector<std::string> focus;
    bool perturb_uci = false;
    perturb_cmd->add_option("--mechanism", mechanism, "MCAR or MNAR");
    perturb_cmd->add_option("--delta", delta, "Target missing fraction over categorical cells")->required();
    perturb_cmd->add_option("--seed", perturb_seed, "Random seed");
    perturb_cmd->add_option("--focus", focus, "MNAR focus as feature=category (repeatable)");
    perturb_cmd->add_option("-o,--out", perturb_out, "Output dataset (default stdout)");
    perturb_cmd->add_option("--receipt", receipt_out, "Write the perturbation receipt (JSON)");
    perturb_cmd->add_flag("--uci", perturb_uci, "Write UCI text instead of the columnar format");

    // impute
    auto* impute = app.add_subcommand("impute", "Fill missing cells with an imputation method");
    InputOptions impute_in;
    impute_in.add_to(impute);
    std::string method = "mode", predictor = "logistic", fallback = "none", impute_out;
    std::size_t k = 5;
    std::uint64_t impute_seed = kDefaultSeed;
    bool impute_uci = false;
    impute->add_option("--method", method, "mode, random_replacement, knn, model, model-<predictor>");
    impute->add_option("--k", k, "Neighbours for knn");
    impute->add_option("--predictor", predictor, "logistic, random_forest, linear_svm (method=model)");
    impute->add_option("--fallback", fallback, "Donors without complete cases: none or per_feature");
    impute->add_option("--seed", impute_seed, "Random seed");
    impute->add_option("-o,--out", impute_out, "Output dataset (default stdout)");
    impute->add_flag("--uci", impute_uci, "Write UCI text instead of the columnar format");

    // train
    auto* train_cmd = app.add_subcommand("train", "Train one classifier and report its test error");
    InputOptions train_in;
    train_in.add_to(train_cmd);
    ClassifierOptions clf;
    clf.add_to(train_cmd);
    std::string test_path, model_out, train_impute;
    bool one_hot = false;
    double train_fraction = 2.0 / 3.0;
    std::uint64_t train_seed = kDefaultSeed;
    train_cmd->add_option("--test", test_path, "Held-out file (default: split the input)");
    train_cmd->add_option("--train-fraction", train_fraction, "Training share when splitting");
    train_cmd->add_option("--seed", train_seed, "Random seed");
    auto* oh = train_cmd->add_flag("--one-hot", one_hot, "Encode missing categories as their own column (default)");
    train_cmd->add_option("--impute", train_impute, "Impute with this method before encoding")->excludes(oh);
    train_cmd->add_option("--model-out", model_out, "Save the trained model (JSON)");

    // bench
    auto* bench = app.add_subcommand("bench", "Run an experiment grid from a JSON config");
    std::string config_path, bench_out, bench_format, bench_data_dir, bench_mechanism;
    std::optional<std::size_t> jobs;
    std::optional<std::uint64_t> bench_seed;
    bool timing = false, quiet = false;
    bench->add_option("config", config_path, "Experiment config (JSON)")->required();
    bench->add_option("-o,--out", bench_out, "Report path (overrides the config)");
    bench->add_option("--format", bench_format, "csv or json (overrides the config)");
    bench->add_option("--data-dir", bench_data_dir, "Directory holding the dataset files");
    bench->add_option("--mechanism", bench_mechanism, "MCAR or MNAR (overrides the config)");
    bench->add_option("--jobs", jobs, "Worker threads");
    bench->add_option("--seed", bench_seed, "Base seed (overrides the config)");
    bench->add_flag("--timing", timing, "Record wall time per cell");
    bench->add_flag("-q,--quiet", quiet, "Do not print the summary table");

    // report
    auto* report = app.add_subcommand("report", "Summarize a CSV report");
    std::string report_path, report_format = "table";
    report->add_option("report", report_path, "CSV report")->required();
    report->add_option("--format", report_format, "table or json")->check(CLI::IsMember({"table", "json"}));

    CLI11_PARSE(app, argc, argv);

    try {
        if (*fetch) {
            const auto cache = fetch_cache.empty() ? default_cache_dir() : fs::path(fetch_cache);
            std::vector<std::string> sets = fetch_dataset == "all" ? std::vector<std::string>{"adult", "cvrs"}
                                                                   : std::vector<std::string>{fetch_dataset};
            for (const auto& s : sets)
                for (const auto& f : benchmark_files(s, fetch_base)) {
                    const auto r = fetch_file(f, cache);
                    std::cerr << (r.downloaded ? "downloaded " : "cached ") << f.name << '\n';
                    std::cout << r.path.string() << '\n';
                }
        } else if (*inspect) {
            const auto ds = inspect_in.load();
            write_text(inspect_out, to_json(missing_pattern_summary(ds)).dump(2) + "\n");
        } else if (*perturb_cmd) {
            const auto ds = perturb_in.load();
            PerturbationSpec spec;
            spec.mechanism = parse_mechanism(mechanism);
            spec.delta = delta;
            spec.seed = perturb_seed;
            if (spec.mechanism == Mechanism::mnar) {
                spec.focus = parse_focus(focus);
                if (spec.focus.empty())
                    spec.focus = perturb_in.dataset == "cvrs" ? uniform_focus(ds, "y") : modal_focus(ds);
            } else if (!focus.empty()) {
                throw InvalidArgument("--focus applies to MNAR only");
            }
            const auto p = perturb(ds, spec);
            write_dataset(p.data, perturb_out, perturb_uci, perturb_in);
            if (!receipt_out.empty()) write_text(receipt_out, to_json(p.receipt).dump(2) + "\n");
            std::cerr << "masked " << p.receipt.masked.size() << " cells; categorical missing fraction "
                      << p.receipt.achieved_fraction << '\n';
        } else if (*impute) {
            const auto ds = impute_in.load();
            const auto model = fit_imputer(ds, imputer_from_flags(method, k, predictor, fallback), impute_seed);
            ImputationReceipt receipt;
            const auto out = transform(model, ds, &receipt);
            write_dataset(out, impute_out, impute_uci, impute_in);
            for (const auto& n : receipt.notes) std::cerr << "note: " << n << '\n';
            std::cerr << "filled " << receipt.cells_filled << " cells in " << receipt.rows_touched << " rows\n";
        } else if (*train_cmd) {
            Dataset full;
            SplitResult parts;
            if (test_path.empty()) {
                full = train_in.load();
                parts = split(full, train_fraction, split_seed(train_seed));
            } else {
                // Loaded together so both files share one category vocabulary.
                const auto n_train = train_in.load().rows();
                InputOptions both = train_in;
                if (both.paths.empty()) throw InvalidArgument("--test needs explicit training files");
                both.paths.push_back(test_path);
                full = both.load();
                std::vector<std::size_t> tr, te;
                for (std::size_t i = 0; i < full.rows(); ++i) (i < n_train ? tr : te).push_back(i);
                if (te.empty()) throw EmptyDataError("test file has no rows");
                parts = {full.select_rows(tr), full.select_rows(te)};
            }
            Schema schema = full.schema();
            EncodedMatrix xtr, xte;
            if (!train_impute.empty()) {
                const auto model = fit_imputer(parts.train, imputer_from_flags(train_impute, 5, "logistic", "per_feature"),
                                               substream(train_seed, hash_name("impute")));
                parts.train = transform(model, parts.train);
                parts.test = transform(model, parts.test);
                for (auto& f : schema) f.has_missing = false;
            }
            const auto enc = fit_encoder(parts.train, schema);
            xtr = encode(parts.train, enc);
            xte = encode(parts.test, enc);
            const auto model = train(xtr, clf.spec(train_seed));
            const double test_error = error_rate(model.predict(xte.x), xte.labels);
            nlohmann::json j = {{"classifier", to_string(model.kind())},
                                {"train_rows", xtr.rows()},
                                {"test_rows", xte.rows()},
                                {"width", xtr.cols()},
                                {"training_error", model.metadata().training_error},
                                {"test_error", test_error}};
            std::cout << j.dump(2) << '\n';
            if (!model_out.empty()) model.save(model_out);
        } else if (*bench) {
            std::ifstream in(config_path);
            if (!in) throw IoError("cannot read config " + config_path);
            nlohmann::json config;
            try {
                in >> config;
            } catch (const nlohmann::json::exception& e) {
                throw ParseError(config_path + ": " + e.what(), 0);
            }
            if (!bench_mechanism.empty()) config["mechanism"] = bench_mechanism;
            if (jobs) config["jobs"] = *jobs;
            if (bench_seed) config["seed"] = *bench_seed;
            if (timing) config["timing"] = true;
            auto output = parse_output_section(config);
            if (!bench_format.empty()) output.format = bench_format;
            if (!bench_out.empty()) output.path = bench_out;
            const auto grid = parse_experiment_config(config, data_dir(bench_data_dir));
            std::cerr << "running " << grid.cell_count() << " cells\n";
            const auto results = run_grid(grid);
            if (output.path) {
                emit_report(*output.path, results, output.format);
            } else if (output.format == "csv") {
                write_report_csv(std::cout, results);
            } else {
                std::cout << report_to_json(results).dump(2) << '\n';
            }
            if (!quiet && output.path) print_summary(results);
            std::size_t failed = 0;
            for (const auto& r : results)
                if (!r.ok) {
                    ++failed;
                    std::cerr << "cell failed: " << r.cell.classifier << '/' << r.cell.treatment << '/' << r.cell.delta
                              << ": " << r.diagnostic << '\n';
                }
            if (failed) return kExitCellsFailed;
        } else if (*report) {
            std::ifstream in(report_path);
            if (!in) throw IoError("cannot read report " + report_path);
            const auto results = read_report_csv(in);
            if (report_format == "json")
                std::cout << report_to_json(results).dump(2) << '\n';
            else
                print_summary(results);
        }
    } catch (const std::exception& e) {
        std::cerr << "mdi: " << e.what() << '\n';
        return kExitError;
    }
    return 0;
}

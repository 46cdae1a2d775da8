#include "mdi/experiment.hpp"

#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "mdi/error.hpp"

namespace mdi {

const char* to_string(DatasetId id) {
    switch (id) {
        case DatasetId::adult: return "adult";
        case DatasetId::cvrs: return "cvrs";
        case DatasetId::custom: return "custom";
    }
    return "unknown";
}

DatasetId parse_dataset_id(const std::string& s) {
    for (auto id : {DatasetId::adult, DatasetId::cvrs, DatasetId::custom})
        if (s == to_string(id)) return id;
    throw InvalidArgument("unknown dataset id: " + s);
}

Dataset load_source(const DatasetSource& source) {
    if (source.paths.empty()) throw InvalidArgument("no data files given for dataset " + std::string(to_string(source.id)));
    switch (source.id) {
        case DatasetId::adult: return load_uci(source.paths, adult_format());
        case DatasetId::cvrs: return load_uci(source.paths, cvrs_format());
        case DatasetId::custom: return load_uci(source.paths, source.format);
    }
    throw InvalidArgument("unknown dataset id");
}

Treatment parse_treatment(const std::string& name) {
    if (name == "one_hot") return {};
    return Treatment{parse_imputer(name)};
}

void ExperimentGrid::validate() const {
    if (deltas.empty() || treatments.empty() || classifiers.empty()) throw InvalidArgument("experiment grid has an empty axis");
    for (double d : deltas) validate_delta(d);
    if (replicates < 1 || replicates > 5) throw InvalidArgument("replicates must be between 1 and 5");
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) throw InvalidArgument("train_fraction must lie in (0, 1)");
    if (jobs < 1) throw InvalidArgument("jobs must be at least 1");
    std::set<std::string> seen;
    for (const auto& t : treatments)
        if (!seen.insert(t.label()).second) throw InvalidArgument("duplicate treatment: " + t.label());
    for (const auto& c : classifiers) {
        if (!c.search.empty() && c.spec.kind != ModelKind::mlp && c.spec.kind != ModelKind::logistic)
            throw InvalidArgument("grid_search is only supported for mlp and logistic classifiers");
        for (const auto& a : c.search)
            if (!is_mlp_axis(a.name)) throw InvalidArgument("unknown search axis: " + a.name);
        if (c.spec.kind == ModelKind::mlp || c.spec.kind == ModelKind::logistic) c.spec.mlp.validate();
    }
}

ExperimentGrid paper_grid(DatasetSource source, Mechanism mechanism) {
    ExperimentGrid g;
    g.dataset = std::move(source);
    g.mechanism = mechanism;
    for (const char* t : {"one_hot", "mode", "random_replacement", "knn", "model-logistic", "model-random_forest",
                          "model-linear_svm"}) {
        auto tr = parse_treatment(t);
        if (tr.imputer) tr.imputer->fallback = DonorFallback::per_feature;
        g.treatments.push_back(tr);
    }
    for (auto k : {ModelKind::mlp, ModelKind::decision_tree, ModelKind::random_forest}) {
        ClassifierConfig c;
        c.spec.kind = k;
        g.classifiers.push_back(c);
    }
    return g;
}

namespace {

std::string format_number(double v) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, p);
}

double parse_number(const std::string& s) {
    double v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) throw ParseError("not a number: '" + s + "'", 0);
    return v;
}

}  // namespace

std::uint64_t split_seed(std::uint64_t base) { return substream(base, hash_name("split")); }

std::uint64_t perturbation_seed(std::uint64_t base, Mechanism mechanism, double delta) {
    return substream(base, hash_name(std::string("perturb|") + to_string(mechanism) + "|" + format_number(delta)));
}

std::uint64_t imputation_seed(std::uint64_t base, const std::string& treatment, Mechanism mechanism, double delta) {
    return substream(base, hash_name("impute|" + treatment + "|" + to_string(mechanism) + "|" + format_number(delta)));
}

std::uint64_t cell_seed(std::uint64_t base, const CellCoordinates& c) {
    return substream(base, hash_name("cell|" + c.dataset + "|" + c.classifier + "|" + c.treatment + "|" + c.mechanism +
                                     "|" + format_number(c.delta)));
}

std::pair<double, double> mean_and_stdev(const std::vector<double>& values) {
    if (values.empty()) throw EmptyDataError("no values to summarize");
    double s = 0;
    for (double v : values) s += v;
    const double mean = s / static_cast<double>(values.size());
    double ss = 0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return {mean, std::sqrt(ss / static_cast<double>(values.size()))};
}

PreparedData prepare(const SplitResult& split, const Schema& full_schema, const ExperimentGrid& grid, double delta,
                     const Treatment& treatment) {
    PreparedData out;
    Dataset train = split.train;
    if (delta > 0.0) {
        PerturbationSpec ps;
        ps.mechanism = grid.mechanism;
        ps.delta = delta;
        ps.seed = perturbation_seed(grid.seed, grid.mechanism, delta);
        if (grid.mechanism == Mechanism::mnar) {
            ps.focus = grid.focus;
            if (ps.focus.empty())
                ps.focus = grid.dataset.id == DatasetId::cvrs ? uniform_focus(train, "y") : modal_focus(train);
        }
        train = perturb(train, ps).data;
    }
    if (!treatment.imputer) {
        const auto enc = fit_encoder(train, full_schema);
        out.train = encode(train, enc);
        out.test = encode(split.test, enc);
        out.notes = enc.notes;
        return out;
    }
    const auto model =
        fit_imputer(train, *treatment.imputer, imputation_seed(grid.seed, treatment.label(), grid.mechanism, delta));
    ImputationReceipt receipt;
    const Dataset train_imputed = transform(model, train, &receipt);
    const Dataset test_imputed = transform(model, split.test);
    // Imputed data carries no missing cells, so the encoder gets no MISSING
    // columns at all.
    Schema schema = full_schema;
    for (auto& f : schema) f.has_missing = false;
    const auto enc = fit_encoder(train_imputed, schema);
    out.train = encode(train_imputed, enc);
    out.test = encode(test_imputed, enc);
    out.notes = receipt.notes;
    out.notes.insert(out.notes.end(), enc.notes.begin(), enc.notes.end());
    return out;
}

namespace {

constexpr double kEpochFactors[] = {1.0, 0.8, 0.9, 1.1, 1.2};
const std::optional<int> kDepths[] = {4, 8, 16, std::nullopt, 32};
const std::pair<std::size_t, FeatureRule> kForests[] = {
    {50, FeatureRule::sqrt}, {100, FeatureRule::sqrt}, {200, FeatureRule::sqrt}, {100, FeatureRule::log2}, {100, FeatureRule::all}};

// The spec for replicate r of a cell: MLPs vary seed and epoch budget, trees
// their depth, forests their size and feature rule.
ClassifierSpec replicate_spec(ClassifierSpec spec, std::size_t r, std::uint64_t seed) {
    const auto s = substream(seed, r);
    switch (spec.kind) {
        case ModelKind::mlp:
        case ModelKind::logistic:
            spec.mlp.seed = s;
            spec.mlp.epochs = std::max(1, static_cast<int>(std::lround(spec.mlp.epochs * kEpochFactors[r])));
            break;
        case ModelKind::decision_tree:
            spec.tree.max_depth = kDepths[r];
            break;
        case ModelKind::random_forest:
            spec.forest.n_trees = kForests[r].first;
            spec.forest.mtry = kForests[r].second;
            spec.forest.seed = s;
            break;
        case ModelKind::linear_svm:
            spec.svm.seed = s;
            break;
    }
    return spec;
}

}  // namespace

RunResult run_cell(const PreparedData& data, const ClassifierConfig& classifier, const CellCoordinates& cell,
                   std::uint64_t base_seed, std::size_t replicates) {
    RunResult r;
    r.cell = cell;
    const auto seed = cell_seed(base_seed, cell);
    ClassifierSpec spec = classifier.spec;
    if (!classifier.search.empty()) {
        const auto search_seed = substream(seed, hash_name("search"));
        auto objective = [&](const GridPoint& p) {
            ClassifierSpec s = spec;
            s.mlp = apply_mlp_point(spec.mlp, p);
            s.mlp.seed = search_seed;
            return train(data.train, s).metadata().training_error;
        };
        const auto best = grid_search(classifier.search, objective);
        spec.mlp = apply_mlp_point(spec.mlp, best.best);
        std::string chosen = "search selected";
        for (const auto& [name, v] : best.best) chosen += " " + name + "=" + format_number(v);
        r.notes.push_back(chosen);
    }
    for (std::size_t k = 0; k < replicates; ++k) {
        const auto model = train(data.train, replicate_spec(spec, k, seed));
        r.replicate_errors.push_back(error_rate(model.predict(data.test.x), data.test.labels));
    }
    std::tie(r.error, r.stdev) = mean_and_stdev(r.replicate_errors);
    return r;
}

std::vector<RunResult> run_grid(const ExperimentGrid& grid) { return run_grid(grid, load_source(grid.dataset)); }

std::vector<RunResult> run_grid(const ExperimentGrid& grid, const Dataset& data) {
    grid.validate();
    const auto split_data = split(data, grid.train_fraction, split_seed(grid.seed), grid.stratified);
    const auto nd = grid.deltas.size(), nt = grid.treatments.size(), nc = grid.classifiers.size();
    std::vector<RunResult> results(grid.cell_count());
    auto index = [&](std::size_t c, std::size_t t, std::size_t d) { return (c * nt + t) * nd + d; };
    const std::string dataset = to_string(grid.dataset.id);
    const std::string mechanism = to_string(grid.mechanism);

    // One work unit per (treatment, delta): prepare the matrices once, then
    // train every classifier on them.
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        using clock = std::chrono::steady_clock;
        for (std::size_t u = next++; u < nt * nd; u = next++) {
            const auto t = u / nd, d = u % nd;
            auto coords = [&](std::size_t c) {
                return CellCoordinates{dataset, grid.classifiers[c].label(), grid.treatments[t].label(), mechanism,
                                       grid.deltas[d]};
            };
            std::optional<PreparedData> prepared;
            std::string prep_error;
            const auto t0 = clock::now();
            try {
                prepared = prepare(split_data, data.schema(), grid, grid.deltas[d], grid.treatments[t]);
            } catch (const std::exception& e) {
                prep_error = e.what();
            }
            const double prep_seconds = std::chrono::duration<double>(clock::now() - t0).count();
            for (std::size_t c = 0; c < nc; ++c) {
                RunResult r;
                const auto t1 = clock::now();
                if (!prepared) {
                    r.cell = coords(c);
                    r.ok = false;
                    r.diagnostic = "data preparation failed: " + prep_error;
                } else {
                    try {
                        r = run_cell(*prepared, grid.classifiers[c], coords(c), grid.seed, grid.replicates);
                        r.notes.insert(r.notes.begin(), prepared->notes.begin(), prepared->notes.end());
                    } catch (const std::exception& e) {
                        r = RunResult{};
                        r.cell = coords(c);
                        r.ok = false;
                        r.diagnostic = e.what();
                    }
                }
                if (grid.timing)
                    r.seconds = prep_seconds + std::chrono::duration<double>(clock::now() - t1).count();
                results[index(c, t, d)] = std::move(r);
            }
        }
    };
    const auto n_threads = std::min(grid.jobs, nt * nd);
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t i = 0; i < n_threads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    return results;
}

// ---------------------------------------------------------------------------

namespace {

const char* kReportHeader = "dataset,classifier,treatment,mechanism,delta,error,stdev,replicates,seconds,status";

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch == '\n' ? ' ' : ch;
    }
    return out + "\"";
}

std::vector<std::string> split_csv_line(const std::string& line, std::size_t line_no) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (quoted) {
            if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (ch == '"') {
                quoted = false;
            } else {
                cur += ch;
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            out.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += ch;
        }
    }
    if (quoted) throw ParseError("unterminated quote", line_no);
    out.push_back(std::move(cur));
    return out;
}

}  // namespace

void write_report_csv(std::ostream& out, const std::vector<RunResult>& results) {
    out << kReportHeader << '\n';
    for (const auto& r : results) {
        std::string reps;
        for (std::size_t i = 0; i < r.replicate_errors.size(); ++i) {
            if (i) reps += ';';
            reps += format_number(r.replicate_errors[i]);
        }
        out << csv_field(r.cell.dataset) << ',' << csv_field(r.cell.classifier) << ',' << csv_field(r.cell.treatment)
            << ',' << r.cell.mechanism << ',' << format_number(r.cell.delta) << ','
            << (r.ok ? format_number(r.error) : "") << ',' << (r.ok ? format_number(r.stdev) : "") << ',' << reps << ','
            << format_number(r.seconds) << ',' << csv_field(r.ok ? "ok" : "failed: " + r.diagnostic) << '\n';
    }
}

std::vector<RunResult> read_report_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != kReportHeader) throw ParseError("missing or unexpected report header", 1);
    std::vector<RunResult> out;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto f = split_csv_line(line, line_no);
        if (f.size() != 10) throw ParseError("expected 10 report fields", line_no);
        try {
            RunResult r;
            r.cell = {f[0], f[1], f[2], f[3], parse_number(f[4])};
            r.ok = f[9] == "ok";
            if (r.ok) {
                r.error = parse_number(f[5]);
                r.stdev = parse_number(f[6]);
            } else {
                const std::string prefix = "failed: ";
                r.diagnostic = f[9].rfind(prefix, 0) == 0 ? f[9].substr(prefix.size()) : f[9];
            }
            std::stringstream reps(f[7]);
            for (std::string tok; std::getline(reps, tok, ';');) r.replicate_errors.push_back(parse_number(tok));
            r.seconds = parse_number(f[8]);
            out.push_back(std::move(r));
        } catch (const ParseError& e) {
            throw ParseError(e.what(), line_no);
        }
    }
    return out;
}

nlohmann::json report_to_json(const std::vector<RunResult>& results) {
    auto arr = nlohmann::json::array();
    for (const auto& r : results) {
        nlohmann::json j = {{"dataset", r.cell.dataset},
                            {"classifier", r.cell.classifier},
                            {"treatment", r.cell.treatment},
                            {"mechanism", r.cell.mechanism},
                            {"delta", r.cell.delta},
                            {"replicates", r.replicate_errors},
                            {"seconds", r.seconds},
                            {"status", r.ok ? "ok" : "failed"}};
        if (r.ok) {
            j["error"] = r.error;
            j["stdev"] = r.stdev;
        } else {
            j["error"] = nullptr;
            j["stdev"] = nullptr;
            j["diagnostic"] = r.diagnostic;
        }
        if (!r.notes.empty()) j["notes"] = r.notes;
        arr.push_back(std::move(j));
    }
    return {{"results", std::move(arr)}};
}

void emit_report(const std::filesystem::path& path, const std::vector<RunResult>& results, const std::string& format) {
    if (results.empty()) throw InvalidArgument("no results to report");
    if (format != "csv" && format != "json") throw InvalidArgument("unknown report format: " + format);
    std::ofstream out(path);
    if (!out) throw IoError("cannot write report " + path.string());
    if (format == "csv")
        write_report_csv(out, results);
    else
        out << report_to_json(results).dump(2) << '\n';
    if (!out) throw IoError("write failed: " + path.string());
}

// ---------------------------------------------------------------------------

namespace {

using nlohmann::json;

void require_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
    if (!j.is_object()) throw InvalidArgument(where + " must be an object");
    for (const auto& [k, v] : j.items())
        if (!allowed.count(k)) throw InvalidArgument("unknown key '" + k + "' in " + where);
}

template <class T>
T get(const json& j, const std::string& key, const std::string& where) {
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw InvalidArgument("bad value for '" + key + "' in " + where + ": " + e.what());
    }
}

ClassifierConfig parse_classifier(const json& j) {
    ClassifierConfig c;
    if (j.is_string()) {
        c.spec.kind = parse_model_kind(j.get<std::string>());
        return c;
    }
    const std::string where = "classifier";
    require_keys(j,
                 {"kind", "max_depth", "min_samples_split", "n_trees", "mtry", "bootstrap", "hidden", "activation",
                  "dropout", "rho", "eps", "lr_scale", "momentum", "epochs", "batch_size", "lambda", "grid_search"},
                 where);
    c.spec.kind = parse_model_kind(get<std::string>(j, "kind", where));
    auto& s = c.spec;
    if (j.contains("max_depth")) {
        if (j["max_depth"].is_null())
            s.tree.max_depth.reset();
        else
            s.tree.max_depth = get<int>(j, "max_depth", where);
        s.forest.tree.max_depth = s.tree.max_depth;
    }
    if (j.contains("min_samples_split")) {
        s.tree.min_samples_split = get<std::size_t>(j, "min_samples_split", where);
        s.forest.tree.min_samples_split = s.tree.min_samples_split;
    }
    if (j.contains("n_trees")) s.forest.n_trees = get<std::size_t>(j, "n_trees", where);
    if (j.contains("mtry")) s.forest.mtry = parse_feature_rule(get<std::string>(j, "mtry", where));
    if (j.contains("bootstrap")) s.forest.bootstrap = get<bool>(j, "bootstrap", where);
    if (j.contains("hidden")) s.mlp.hidden = get<std::vector<int>>(j, "hidden", where);
    if (j.contains("activation")) s.mlp.activation = parse_activation(get<std::string>(j, "activation", where));
    if (j.contains("dropout")) {
        if (j["dropout"].is_array())
            s.mlp.dropout = get<std::vector<double>>(j, "dropout", where);
        else
            s.mlp.dropout = {get<double>(j, "dropout", where)};
    }
    if (j.contains("rho")) s.mlp.rho = get<double>(j, "rho", where);
    if (j.contains("eps")) s.mlp.eps = get<double>(j, "eps", where);
    if (j.contains("lr_scale")) s.mlp.lr_scale = get<double>(j, "lr_scale", where);
    if (j.contains("momentum")) {
        const auto& m = j["momentum"];
        require_keys(m, {"start", "end", "ramp_epochs"}, "momentum");
        if (m.contains("start")) s.mlp.momentum.start = get<double>(m, "start", "momentum");
        if (m.contains("end")) s.mlp.momentum.end = get<double>(m, "end", "momentum");
        if (m.contains("ramp_epochs")) s.mlp.momentum.ramp_epochs = get<int>(m, "ramp_epochs", "momentum");
    }
    if (j.contains("epochs")) {
        s.mlp.epochs = get<int>(j, "epochs", where);
        s.svm.epochs = s.mlp.epochs;
    }
    if (j.contains("batch_size")) s.mlp.batch_size = get<int>(j, "batch_size", where);
    if (j.contains("lambda")) s.svm.lambda = get<double>(j, "lambda", where);
    if (s.kind == ModelKind::logistic) {
        s.mlp.hidden.clear();
        s.mlp.dropout.clear();
    }
    if (j.contains("grid_search")) {
        const auto& gs = j["grid_search"];
        if (!gs.is_object()) throw InvalidArgument("grid_search must be an object of axis -> values");
        for (const auto& [name, values] : gs.items()) {
            if (!is_mlp_axis(name)) throw InvalidArgument("unknown search axis: " + name);
            c.search.push_back({name, get<std::vector<double>>(gs, name, "grid_search")});
        }
    }
    return c;
}

Treatment parse_treatment_json(const json& j, DonorFallback fallback) {
    Treatment t;
    if (j.is_string()) {
        t = parse_treatment(j.get<std::string>());
    } else {
        require_keys(j, {"method", "k", "fallback"}, "treatment");
        t = parse_treatment(get<std::string>(j, "method", "treatment"));
        if (!t.imputer && (j.contains("k") || j.contains("fallback")))
            throw InvalidArgument("one_hot takes no imputation parameters");
        if (j.contains("k")) t.imputer->k = get<std::size_t>(j, "k", "treatment");
        if (j.contains("fallback")) fallback = parse_donor_fallback(get<std::string>(j, "fallback", "treatment"));
    }
    if (t.imputer) t.imputer->fallback = fallback;
    return t;
}

std::vector<std::filesystem::path> default_paths(DatasetId id, const std::filesystem::path& dir) {
    switch (id) {
        case DatasetId::adult: return {dir / "adult.data", dir / "adult.test"};
        case DatasetId::cvrs: return {dir / "house-votes-84.data"};
        case DatasetId::custom: return {};
    }
    return {};
}

}  // namespace

ExperimentGrid parse_experiment_config(const json& config, const std::filesystem::path& data_dir) {
    require_keys(config,
                 {"dataset", "paths", "format", "mechanism", "deltas", "treatments", "classifiers", "seed", "replicates",
                  "train_fraction", "stratified", "focus", "donor_fallback", "jobs", "timing", "output", "report_format"},
                 "experiment config");
    ExperimentGrid g;
    const std::string where = "experiment config";
    g.dataset.id = parse_dataset_id(get<std::string>(config, "dataset", where));
    if (config.contains("format")) {
        if (g.dataset.id != DatasetId::custom) throw InvalidArgument("'format' applies to custom datasets only");
        const auto& f = config["format"];
        require_keys(f, {"columns", "label_column", "missing_symbol", "names"}, "format");
        for (char ch : get<std::string>(f, "columns", "format")) {
            if (ch == 'c')
                g.dataset.format.column_kinds.push_back(FeatureKind::categorical);
            else if (ch == 'n')
                g.dataset.format.column_kinds.push_back(FeatureKind::continuous);
            else
                throw InvalidArgument("format columns use 'c' (categorical) and 'n' (numeric)");
        }
        g.dataset.format.label_column = get<std::size_t>(f, "label_column", "format");
        if (f.contains("missing_symbol")) g.dataset.format.missing_symbol = get<std::string>(f, "missing_symbol", "format");
        if (f.contains("names")) g.dataset.format.feature_names = get<std::vector<std::string>>(f, "names", "format");
    } else if (g.dataset.id == DatasetId::custom) {
        throw InvalidArgument("custom datasets need a 'format' section");
    }
    if (config.contains("paths")) {
        for (const auto& p : get<std::vector<std::string>>(config, "paths", where)) {
            std::filesystem::path path(p);
            g.dataset.paths.push_back(path.is_absolute() ? path : data_dir / path);
        }
    } else {
        g.dataset.paths = default_paths(g.dataset.id, data_dir);
    }
    if (config.contains("mechanism")) g.mechanism = parse_mechanism(get<std::string>(config, "mechanism", where));
    if (config.contains("deltas")) g.deltas = get<std::vector<double>>(config, "deltas", where);
    const auto fallback = config.contains("donor_fallback")
                              ? parse_donor_fallback(get<std::string>(config, "donor_fallback", where))
                              : DonorFallback::per_feature;
    const auto defaults = paper_grid(g.dataset, g.mechanism);
    if (config.contains("treatments")) {
        for (const auto& t : config["treatments"]) g.treatments.push_back(parse_treatment_json(t, fallback));
    } else {
        g.treatments = defaults.treatments;
        for (auto& t : g.treatments)
            if (t.imputer) t.imputer->fallback = fallback;
    }
    if (config.contains("classifiers")) {
        for (const auto& c : config["classifiers"]) g.classifiers.push_back(parse_classifier(c));
    } else {
        g.classifiers = defaults.classifiers;
    }
    if (config.contains("seed")) g.seed = get<std::uint64_t>(config, "seed", where);
    if (config.contains("replicates")) g.replicates = get<std::size_t>(config, "replicates", where);
    if (config.contains("train_fraction")) g.train_fraction = get<double>(config, "train_fraction", where);
    if (config.contains("stratified")) g.stratified = get<bool>(config, "stratified", where);
    if (config.contains("focus")) g.focus = get<FocusMap>(config, "focus", where);
    if (config.contains("jobs")) g.jobs = get<std::size_t>(config, "jobs", where);
    if (config.contains("timing")) g.timing = get<bool>(config, "timing", where);
    g.validate();
    return g;
}

ConfigOutput parse_output_section(const json& config) {
    ConfigOutput o;
    if (config.contains("output")) o.path = get<std::string>(config, "output", "experiment config");
    if (config.contains("report_format")) o.format = get<std::string>(config, "report_format", "experiment config");
    if (o.format != "csv" && o.format != "json") throw InvalidArgument("unknown report format: " + o.format);
    return o;
}

}  // namespace mdi

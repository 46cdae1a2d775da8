#include "mdi/uci.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "mdi/error.hpp"

namespace mdi {
namespace {

constexpr std::string_view kColumnarMagic = "#mdi-columnar 1";

std::string_view trim(std::string_view s) {
    const auto ws = " \t\r\n";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split_fields(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

std::optional<double> parse_double(std::string_view s) {
    double v = 0;
    const auto* first = s.data();
    const auto* last = s.data() + s.size();
    if (first != last && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last || first == last) return std::nullopt;
    return v;
}

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

const std::vector<std::string> kAdultNames = {
    "age",          "workclass",     "fnlwgt",       "education",      "education-num",
    "marital-status", "occupation",  "relationship", "race",           "sex",
    "capital-gain", "capital-loss",  "hours-per-week", "native-country"};

const std::vector<std::string> kCvrsNames = {"handicapped-infants",
                                             "water-project-cost-sharing",
                                             "adoption-of-the-budget-resolution",
                                             "physician-fee-freeze",
                                             "el-salvador-aid",
                                             "religious-groups-in-schools",
                                             "anti-satellite-test-ban",
                                             "aid-to-nicaraguan-contras",
                                             "mx-missile",
                                             "immigration",
                                             "synfuels-corporation-cutback",
                                             "education-spending",
                                             "superfund-right-to-sue",
                                             "crime",
                                             "duty-free-exports",
                                             "export-administration-act-south-africa"};

}  // namespace

UciFormat adult_format() {
    using K = FeatureKind;
    UciFormat f;
    f.column_kinds = {K::continuous,  K::categorical, K::continuous,  K::categorical, K::continuous,
                      K::categorical, K::categorical, K::categorical, K::categorical, K::categorical,
                      K::continuous,  K::continuous,  K::continuous,  K::categorical, K::categorical};
    f.label_column = 14;
    f.feature_names = kAdultNames;
    f.label_suffix_strip = ".";
    return f;
}

UciFormat cvrs_format() {
    UciFormat f;
    f.column_kinds.assign(17, FeatureKind::categorical);
    f.label_column = 0;
    f.feature_names = kCvrsNames;
    return f;
}

namespace {

struct Loader {
    const UciFormat& fmt;
    Schema schema;
    std::vector<std::string> classes;
    std::vector<std::vector<double>> rows;
    std::vector<int> labels;

    explicit Loader(const UciFormat& f) : fmt(f) {
        if (fmt.column_kinds.size() < 2) throw InvalidArgument("need at least one feature and a label column");
        if (fmt.label_column >= fmt.column_kinds.size()) throw InvalidArgument("label column out of range");
        const auto k = fmt.column_kinds.size() - 1;
        if (!fmt.feature_names.empty() && fmt.feature_names.size() != k)
            throw InvalidArgument("feature_names length does not match feature count");
        for (std::size_t c = 0, j = 0; c < fmt.column_kinds.size(); ++c) {
            if (c == fmt.label_column) continue;
            FeatureSchema fs;
            fs.name = fmt.feature_names.empty() ? "f" + std::to_string(j) : fmt.feature_names[j];
            fs.kind = fmt.column_kinds[c];
            schema.push_back(std::move(fs));
            ++j;
        }
        validate_schema(schema);
    }

    void read(std::istream& in, const std::string& source) {
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            const auto t = trim(line);
            if (t.empty() || t.front() == '|') continue;
            auto fields = split_fields(line, ',');
            if (fields.size() != fmt.column_kinds.size())
                throw ParseError(source + ": expected " + std::to_string(fmt.column_kinds.size()) + " columns, got " +
                                     std::to_string(fields.size()),
                                 line_no);
            std::vector<double> cells(schema.size());
            int label = -1;
            for (std::size_t c = 0, j = 0; c < fields.size(); ++c) {
                auto tok = trim(fields[c]);
                if (c == fmt.label_column) {
                    if (tok == fmt.missing_symbol) throw ParseError(source + ": label is missing", line_no);
                    std::string lab(tok);
                    if (!fmt.label_suffix_strip.empty() && lab.size() >= fmt.label_suffix_strip.size() &&
                        lab.compare(lab.size() - fmt.label_suffix_strip.size(), std::string::npos,
                                    fmt.label_suffix_strip) == 0)
                        lab.erase(lab.size() - fmt.label_suffix_strip.size());
                    auto it = std::find(classes.begin(), classes.end(), lab);
                    if (it == classes.end()) {
                        classes.push_back(lab);
                        it = classes.end() - 1;
                    }
                    label = static_cast<int>(it - classes.begin());
                    continue;
                }
                auto& fs = schema[j];
                if (tok == fmt.missing_symbol) {
                    cells[j] = kMissingCell;
                    fs.has_missing = true;
                } else if (fs.is_categorical()) {
                    std::string token(tok);
                    auto idx = fs.category_index(token);
                    if (!idx) {
                        fs.categories.push_back(token);
                        idx = static_cast<int>(fs.categories.size() - 1);
                    }
                    cells[j] = *idx;
                } else {
                    auto v = parse_double(tok);
                    if (!v)
                        throw ParseError(source + ": cannot parse '" + std::string(tok) + "' as a number in " + fs.name,
                                         line_no);
                    cells[j] = *v;
                }
                ++j;
            }
            rows.push_back(std::move(cells));
            labels.push_back(label);
        }
    }

    Dataset finish() {
        Dataset ds(schema, classes);
        for (std::size_t i = 0; i < rows.size(); ++i) ds.append_row(rows[i], labels[i], i);
        return ds;
    }
};

}  // namespace

Dataset read_uci(std::istream& in, const UciFormat& format, const std::string& source) {
    Loader loader(format);
    loader.read(in, source);
    return loader.finish();
}

Dataset load_uci(const std::vector<std::filesystem::path>& paths, const UciFormat& format) {
    Loader loader(format);
    for (const auto& p : paths) {
        std::ifstream in(p);
        if (!in) throw IoError("cannot read " + p.string());
        loader.read(in, p.string());
    }
    return loader.finish();
}

Dataset load_uci(const std::filesystem::path& path, const UciFormat& format) {
    return load_uci(std::vector<std::filesystem::path>{path}, format);
}

void write_uci(std::ostream& out, const Dataset& ds, const UciFormat& format) {
    if (format.label_column > ds.features()) throw InvalidArgument("label column out of range");
    for (std::size_t i = 0; i < ds.rows(); ++i) {
        for (std::size_t c = 0, j = 0; c <= ds.features(); ++c) {
            if (c) out << ',';
            if (c == format.label_column) {
                out << ds.classes()[static_cast<std::size_t>(ds.label(i))];
                continue;
            }
            if (ds.is_missing(i, j))
                out << format.missing_symbol;
            else if (ds.feature(j).is_categorical())
                out << ds.feature(j).categories[static_cast<std::size_t>(ds.category(i, j))];
            else
                out << format_double(ds.value(i, j));
            ++j;
        }
        out << '\n';
    }
}

void write_columnar(std::ostream& out, const Dataset& ds) {
    nlohmann::json header;
    header["rows"] = ds.rows();
    header["classes"] = ds.classes();
    auto& feats = header["features"] = nlohmann::json::array();
    for (const auto& f : ds.schema())
        feats.push_back({{"name", f.name},
                         {"kind", to_string(f.kind)},
                         {"categories", f.categories},
                         {"has_missing", f.has_missing}});
    out << kColumnarMagic << '\n' << header.dump() << '\n';
    for (std::size_t j = 0; j < ds.features(); ++j) {
        for (std::size_t i = 0; i < ds.rows(); ++i) {
            if (i) out << '\t';
            if (ds.is_missing(i, j)) continue;
            if (ds.feature(j).is_categorical())
                out << ds.category(i, j);
            else
                out << format_double(ds.value(i, j));
        }
        out << '\n';
    }
    for (std::size_t i = 0; i < ds.rows(); ++i) out << (i ? "\t" : "") << ds.label(i);
    out << '\n';
    for (std::size_t i = 0; i < ds.rows(); ++i) out << (i ? "\t" : "") << ds.origin(i);
    out << '\n';
}

Dataset read_columnar(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || trim(line) != kColumnarMagic) throw ParseError("not an mdi columnar file", 1);
    if (!std::getline(in, line)) throw ParseError("missing schema header", 2);
    nlohmann::json header;
    try {
        header = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad schema header: ") + e.what(), 2);
    }
    const auto n = header.at("rows").get<std::size_t>();
    Schema schema;
    for (const auto& f : header.at("features")) {
        FeatureSchema fs;
        fs.name = f.at("name").get<std::string>();
        const auto kind = f.at("kind").get<std::string>();
        if (kind == "categorical")
            fs.kind = FeatureKind::categorical;
        else if (kind == "continuous")
            fs.kind = FeatureKind::continuous;
        else
            throw ParseError("unknown feature kind '" + kind + "'", 2);
        fs.categories = f.at("categories").get<std::vector<std::string>>();
        fs.has_missing = f.at("has_missing").get<bool>();
        schema.push_back(std::move(fs));
    }
    const auto k = schema.size();
    std::vector<double> cells(n * k);
    std::size_t line_no = 2;
    auto next_fields = [&](const char* what) {
        ++line_no;
        if (!std::getline(in, line)) throw ParseError(std::string("truncated file: missing ") + what, line_no);
        auto fields = split_fields(line, '\t');
        if (fields.size() != n) throw ParseError(std::string("wrong value count in ") + what, line_no);
        return fields;
    };
    for (std::size_t j = 0; j < k; ++j) {
        auto fields = next_fields("feature column");
        for (std::size_t i = 0; i < n; ++i) {
            if (fields[i].empty()) {
                cells[i * k + j] = kMissingCell;
                continue;
            }
            auto v = parse_double(fields[i]);
            if (!v) throw ParseError("bad cell value", line_no);
            cells[i * k + j] = *v;
        }
    }
    auto parse_ints = [&](const char* what) {
        auto fields = next_fields(what);
        std::vector<std::size_t> out(n);
        for (std::size_t i = 0; i < n; ++i) {
            auto v = parse_double(fields[i]);
            if (!v || *v < 0) throw ParseError(std::string("bad ") + what, line_no);
            out[i] = static_cast<std::size_t>(*v);
        }
        return out;
    };
    const auto labels = parse_ints("labels");
    const auto origin = parse_ints("provenance");
    Dataset ds(std::move(schema), header.at("classes").get<std::vector<std::string>>());
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> row(cells.begin() + static_cast<std::ptrdiff_t>(i * k),
                                cells.begin() + static_cast<std::ptrdiff_t>((i + 1) * k));
        ds.append_row(row, static_cast<int>(labels[i]), origin[i]);
    }
    return ds;
}

void save_columnar(const std::filesystem::path& path, const Dataset& ds) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    write_columnar(out, ds);
    if (!out) throw IoError("write failed: " + path.string());
}

Dataset load_columnar(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read " + path.string());
    return read_columnar(in);
}

}  // namespace mdi

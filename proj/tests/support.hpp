#pragma once

#include <filesystem>
#include <random>
#include <sstream>
#include <string>

#include "mdi/dataset.hpp"
#include "mdi/uci.hpp"

namespace mdi::test {

inline std::filesystem::path data_dir() { return MDI_TEST_DATA_DIR; }

inline Dataset load_cvrs() { return load_uci(data_dir() / "house-votes-84.data", cvrs_format()); }

inline Dataset load_adult() {
    return load_uci(std::vector<std::filesystem::path>{data_dir() / "adult.data", data_dir() / "adult.test"},
                    adult_format());
}

// Parses comma-separated text; `kinds` has one letter per column (c or n),
// the label sits in the last column.
inline Dataset toy(const std::string& text, const std::string& kinds) {
    UciFormat f;
    for (char ch : kinds) f.column_kinds.push_back(ch == 'n' ? FeatureKind::continuous : FeatureKind::categorical);
    f.label_column = kinds.size() - 1;
    std::istringstream in(text);
    return read_uci(in, f);
}

// Fully observed categorical data with `cats` equiprobable categories per
// feature and two labels.
inline Dataset random_categorical(std::size_t n, std::size_t k, std::size_t cats, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    Schema schema;
    for (std::size_t j = 0; j < k; ++j) {
        FeatureSchema f;
        f.name = "f" + std::to_string(j);
        for (std::size_t c = 0; c < cats; ++c) f.categories.push_back("v" + std::to_string(c));
        schema.push_back(f);
    }
    Dataset ds(schema, {"neg", "pos"});
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> cells(k);
        for (auto& c : cells) c = static_cast<double>(rng() % cats);
        ds.append_row(cells, static_cast<int>(rng() % 2), i);
    }
    return ds;
}

class TempDir {
public:
    TempDir() {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() / ("mdi-test-" + std::to_string(rd()) + std::to_string(rd()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

}  // namespace mdi::test

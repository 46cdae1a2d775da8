#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "mdi/dataset.hpp"

namespace mdi {

struct UciFormat {
    std::string missing_symbol = "?";
    // Kind of every column of the file, label column included (its entry is
    // ignored).
    std::vector<FeatureKind> column_kinds;
    std::size_t label_column = 0;
    // Feature names in column order, label excluded. Empty: f0, f1, ...
    std::vector<std::string> feature_names;
    // Trailing characters stripped from labels ("." for adult.test).
    std::string label_suffix_strip;
};

// Presets for the two benchmark files.
UciFormat adult_format();
UciFormat cvrs_format();

// Reads comma-separated UCI files and concatenates them in order. Blank lines
// and lines starting with '|' are skipped. Tokens are whitespace-trimmed.
Dataset load_uci(const std::vector<std::filesystem::path>& paths, const UciFormat& format);
Dataset load_uci(const std::filesystem::path& path, const UciFormat& format);
Dataset read_uci(std::istream& in, const UciFormat& format, const std::string& source = "<stream>");

// Writes rows back in UCI layout (label at `format.label_column`).
void write_uci(std::ostream& out, const Dataset& ds, const UciFormat& format);

// Self-describing columnar text: a JSON schema header line followed by one
// line per feature column, then the label and provenance columns.
void write_columnar(std::ostream& out, const Dataset& ds);
Dataset read_columnar(std::istream& in);

void save_columnar(const std::filesystem::path& path, const Dataset& ds);
Dataset load_columnar(const std::filesystem::path& path);

}  // namespace mdi

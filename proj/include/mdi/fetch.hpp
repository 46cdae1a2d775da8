#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace mdi {

struct RemoteFile {
    std::string name;    // file name in the cache directory
    std::string url;
    std::string sha256;  // lowercase hex
};

inline constexpr const char* kUciBaseUrl = "https://archive.ics.uci.edu/ml/machine-learning-databases";

// The benchmark files under `base_url` ("adult" or "cvrs").
std::vector<RemoteFile> benchmark_files(const std::string& dataset, const std::string& base_url = kUciBaseUrl);

// $MDI_CACHE_DIR, else $XDG_CACHE_HOME/mdi, else $HOME/.cache/mdi.
std::filesystem::path default_cache_dir();

std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);

struct FetchOutcome {
    std::filesystem::path path;
    bool downloaded = false;  // false: a verified cached copy was reused
};

// Returns the cached copy when its checksum matches; otherwise downloads,
// verifies and atomically moves the file into `cache_dir`. Throws IoError on
// network failure or checksum mismatch (nothing is left in the cache).
FetchOutcome fetch_file(const RemoteFile& file, const std::filesystem::path& cache_dir);

}  // namespace mdi

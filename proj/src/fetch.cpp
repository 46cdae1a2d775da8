#include "mdi/fetch.hpp"

#include <cstdlib>
#include <fstream>
#include <iterator>
#include <sstream>

#include <httplib.h>
#include <openssl/evp.h>

#include "mdi/error.hpp"

namespace mdi {

std::vector<RemoteFile> benchmark_files(const std::string& dataset, const std::string& base_url) {
    if (dataset == "adult")
        return {{"adult.data", base_url + "/adult/adult.data",
                 "5b00264637dbfec36bdeaab5676b0b309ff9eb788d63554ca0a249491c86603d"},
                {"adult.test", base_url + "/adult/adult.test",
                 "a2a9044bc167a35b2361efbabec64e89d69ce82d9790d2980119aac5fd7e9c05"}};
    if (dataset == "cvrs")
        return {{"house-votes-84.data", base_url + "/voting-records/house-votes-84.data",
                 "c87c14110a5ba91d4a1e313ec7392824458152bf071fa5f5452340488337936e"}};
    throw InvalidArgument("no remote files known for dataset: " + dataset);
}

std::filesystem::path default_cache_dir() {
    if (const char* d = std::getenv("MDI_CACHE_DIR"); d && *d) return d;
    if (const char* d = std::getenv("XDG_CACHE_HOME"); d && *d) return std::filesystem::path(d) / "mdi";
    if (const char* d = std::getenv("HOME"); d && *d) return std::filesystem::path(d) / ".cache" / "mdi";
    return std::filesystem::current_path() / ".mdi-cache";
}

std::string sha256_hex(std::string_view bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw Error("sha256 computation failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 15];
    }
    return out;
}

namespace {

std::string read_all(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// "scheme://host[:port]" and "/path" parts of a URL.
std::pair<std::string, std::string> split_url(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw InvalidArgument("not an absolute URL: " + url);
    const auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {url, "/"};
    return {url.substr(0, path_start), url.substr(path_start)};
}

}  // namespace

std::string sha256_file(const std::filesystem::path& path) { return sha256_hex(read_all(path)); }

FetchOutcome fetch_file(const RemoteFile& file, const std::filesystem::path& cache_dir) {
    const auto target = cache_dir / file.name;
    if (std::filesystem::exists(target) && sha256_file(target) == file.sha256) return {target, false};

    const auto [origin, path] = split_url(file.url);
    httplib::Client client(origin);
    client.set_follow_location(true);
    client.set_connection_timeout(30);
    client.set_read_timeout(120);
    const auto res = client.Get(path);
    if (!res) throw IoError("download of " + file.url + " failed: " + httplib::to_string(res.error()));
    if (res->status != 200) throw IoError("download of " + file.url + " returned HTTP " + std::to_string(res->status));
    const auto digest = sha256_hex(res->body);
    if (digest != file.sha256)
        throw IoError("checksum mismatch for " + file.name + ": expected " + file.sha256 + ", got " + digest);

    std::filesystem::create_directories(cache_dir);
    const auto tmp = target.string() + ".part";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw IoError("cannot write " + tmp);
        out.write(res->body.data(), static_cast<std::streamsize>(res->body.size()));
        if (!out) throw IoError("write failed: " + tmp);
    }
    std::filesystem::rename(tmp, target);
    return {target, true};
}

}  // namespace mdi

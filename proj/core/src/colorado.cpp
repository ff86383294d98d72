#include "spatseg/colorado.hpp"

#include "spatseg/errors.hpp"
#include "spatseg/io.hpp"

#include <openssl/evp.h>

#include <httplib.h>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace spatseg {
namespace {

namespace fs = std::filesystem;

std::optional<std::string> read_file_bytes(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) return std::nullopt;
    return buf.str();
}

void write_file_bytes(const fs::path& path, std::string_view bytes) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw data_error("failed to write cache file " + path.string());
}

fs::path sidecar_path(const fs::path& path) {
    fs::path p = path;
    p += ".sha256";
    return p;
}

// Trust-on-first-use integrity: the first time a cache file appears its
// checksum is recorded next to it; every later load must match.
void verify_or_record_checksum(const fs::path& path, std::string_view bytes) {
    const std::string digest = sha256_hex(bytes);
    const fs::path side = sidecar_path(path);
    if (auto recorded = read_file_bytes(side)) {
        std::string want = *recorded;
        while (!want.empty() && (want.back() == '\n' || want.back() == '\r' || want.back() == ' '))
            want.pop_back();
        if (want != digest) {
            throw data_error("cache integrity failure for " + path.string() + ": recorded SHA-256 " +
                             want + " but file hashes to " + digest +
                             "; delete the file and its .sha256 sidecar to re-fetch");
        }
        return;
    }
    write_file_bytes(side, digest + "\n");
}

bool parse_number(std::string_view tok, double& out) {
    if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
    const char* first = tok.data();
    const char* last = tok.data() + tok.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last;
}

bool is_missing_token(std::string_view tok) {
    std::string low(tok);
    std::transform(low.begin(), low.end(), low.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return low.empty() || low == "na" || low == "nan" || low == "null" || low == "-" || low == ".";
}

std::vector<std::string> split_ws(const std::string& line) {
    std::vector<std::string> toks;
    std::istringstream ss(line);
    std::string t;
    while (ss >> t) toks.push_back(t);
    return toks;
}

// Station locations: one station per line, "<id> <lon> <lat> ...". Lines that
// do not parse (headers, comments) are skipped.
std::map<std::string, Point> parse_locations(const std::string& text) {
    std::map<std::string, Point> loc;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        const auto toks = split_ws(line);
        if (toks.size() < 3) continue;
        double lon = 0.0, lat = 0.0;
        if (!parse_number(toks[1], lon) || !parse_number(toks[2], lat)) continue;
        if (!std::isfinite(lon) || !std::isfinite(lat)) continue;
        loc.emplace(toks[0], Point{lon, lat});
    }
    return loc;
}

// Monthly precipitation: "<id> <year> <jan> ... <dec>" per line, with missing
// months flagged by NA-like tokens or negative sentinel values. Returns the
// cumulative yearly value for stations with all twelve months observed.
std::map<std::string, double> parse_cumulative_ppt(const std::string& text, int year) {
    std::map<std::string, double> cum;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        const auto toks = split_ws(line);
        if (toks.size() < 14) continue;
        double y = 0.0;
        if (!parse_number(toks[1], y) || static_cast<int>(y) != year) continue;
        double total = 0.0;
        bool complete = true;
        for (int m = 0; m < 12; ++m) {
            const std::string& tok = toks[2 + static_cast<std::size_t>(m)];
            double v = 0.0;
            if (is_missing_token(tok) || !parse_number(tok, v) || !std::isfinite(v) || v < 0.0) {
                complete = false;
                break;
            }
            total += v;
        }
        if (complete) cum.emplace(toks[0], total);
    }
    return cum;
}

struct ProcessedData {
    std::vector<Point> pts;
    Eigen::VectorXd z;
};

ProcessedData preprocess(const std::string& loc_text, const std::string& ppt_text,
                         const ColoradoOptions& opts) {
    const auto loc = parse_locations(loc_text);
    if (loc.empty()) throw data_error("no station locations parsed from " + opts.loc_file);
    const auto cum = parse_cumulative_ppt(ppt_text, opts.year);
    if (cum.empty()) {
        throw data_error("no complete station-year records parsed from " + opts.ppt_file +
                         " for year " + std::to_string(opts.year));
    }
    std::vector<Point> pts;
    std::vector<double> logs;
    for (const auto& [id, total] : cum) {
        const auto it = loc.find(id);
        if (it == loc.end()) continue;
        if (!(total > 0.0)) continue; // log of a zero-precipitation year is undefined
        pts.push_back(it->second);
        logs.push_back(std::log(total));
    }
    if (opts.expected_stations != 0 && pts.size() != opts.expected_stations) {
        throw data_error("preprocessed station count " + std::to_string(pts.size()) +
                         " does not match the expected " + std::to_string(opts.expected_stations) +
                         " complete stations for year " + std::to_string(opts.year));
    }
    ProcessedData out;
    out.pts = std::move(pts);
    out.z = Eigen::Map<const Eigen::VectorXd>(logs.data(), static_cast<Eigen::Index>(logs.size()));
    return out;
}

std::string processed_file_name(const ColoradoOptions& opts) {
    return "colorado_log_cum_ppt_" + std::to_string(opts.year) + ".csv";
}

// Splits "http://host[:port]/some/path/" into the client origin and path prefix.
void split_url(const std::string& url, std::string& origin, std::string& path_prefix) {
    const auto scheme_end = url.find("://");
    const std::size_t host_begin = scheme_end == std::string::npos ? 0 : scheme_end + 3;
    const auto slash = url.find('/', host_begin);
    if (slash == std::string::npos) {
        origin = url;
        path_prefix = "/";
    } else {
        origin = url.substr(0, slash);
        path_prefix = url.substr(slash);
    }
    if (path_prefix.empty() || path_prefix.back() != '/') path_prefix += '/';
}

std::string http_get(const std::string& origin, const std::string& path) {
    httplib::Client client(origin);
    client.set_connection_timeout(20, 0);
    client.set_read_timeout(60, 0);
    client.set_follow_location(true);
    auto res = client.Get(path);
    if (!res) {
        throw data_error("download of " + origin + path +
                         " failed: " + httplib::to_string(res.error()));
    }
    if (res->status != 200) {
        throw data_error("download of " + origin + path + " failed with HTTP status " +
                         std::to_string(res->status));
    }
    return res->body;
}

SpatialDataset dataset_from(ProcessedData&& data) {
    const Rect domain = Rect::bounding(data.pts);
    SpatialDataset out{SiteSet(std::move(data.pts), domain), std::move(data.z), std::nullopt};
    return out;
}

SpatialDataset finish_from_raw(const std::string& loc_text, const std::string& ppt_text,
                               const ColoradoOptions& opts, const fs::path& processed) {
    ProcessedData data = preprocess(loc_text, ppt_text, opts);
    std::ostringstream csv;
    write_xyz_csv(csv, data.pts, data.z);
    const std::string bytes = csv.str();
    write_file_bytes(processed, bytes);
    write_file_bytes(sidecar_path(processed), sha256_hex(bytes) + "\n");
    return dataset_from(std::move(data));
}

} // namespace

std::string sha256_hex(std::string_view bytes) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw numerical_error("SHA-256 digest computation failed");
    std::string hex(static_cast<std::size_t>(len) * 2, '0');
    static const char* digits = "0123456789abcdef";
    for (unsigned int i = 0; i < len; ++i) {
        hex[2 * i] = digits[md[i] >> 4];
        hex[2 * i + 1] = digits[md[i] & 0x0f];
    }
    return hex;
}

SpatialDataset fetch_colorado(const ColoradoOptions& opts) {
    const fs::path processed = opts.cache_dir / processed_file_name(opts);
    if (auto bytes = read_file_bytes(processed)) {
        verify_or_record_checksum(processed, *bytes);
        std::istringstream in(*bytes);
        XyzCsv csv = read_xyz_csv(in);
        if (!csv.rejected_lines.empty()) {
            throw data_error("preprocessed cache " + processed.string() +
                             " contains incomplete rows; delete it to rebuild");
        }
        if (opts.expected_stations != 0 && csv.pts.size() != opts.expected_stations) {
            throw data_error("preprocessed cache " + processed.string() + " has " +
                             std::to_string(csv.pts.size()) + " stations, expected " +
                             std::to_string(opts.expected_stations) + "; delete it to rebuild");
        }
        ProcessedData data{std::move(csv.pts), std::move(csv.z)};
        return dataset_from(std::move(data));
    }

    const fs::path loc_path = opts.cache_dir / opts.loc_file;
    const fs::path ppt_path = opts.cache_dir / opts.ppt_file;
    auto loc_bytes = read_file_bytes(loc_path);
    auto ppt_bytes = read_file_bytes(ppt_path);
    if (loc_bytes && ppt_bytes) {
        verify_or_record_checksum(loc_path, *loc_bytes);
        verify_or_record_checksum(ppt_path, *ppt_bytes);
        return finish_from_raw(*loc_bytes, *ppt_bytes, opts, processed);
    }

    if (opts.offline) {
        throw data_error("offline mode and no usable cache under " + opts.cache_dir.string() +
                         ": place either " + processed_file_name(opts) + " or the raw files " +
                         opts.loc_file + " and " + opts.ppt_file + " there");
    }

    std::string origin, path_prefix;
    split_url(opts.base_url, origin, path_prefix);
    const std::string loc_text = http_get(origin, path_prefix + opts.loc_file);
    const std::string ppt_text = http_get(origin, path_prefix + opts.ppt_file);
    write_file_bytes(loc_path, loc_text);
    write_file_bytes(sidecar_path(loc_path), sha256_hex(loc_text) + "\n");
    write_file_bytes(ppt_path, ppt_text);
    write_file_bytes(sidecar_path(ppt_path), sha256_hex(ppt_text) + "\n");
    return finish_from_raw(loc_text, ppt_text, opts, processed);
}

} // namespace spatseg

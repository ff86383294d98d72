#pragma once

#include "spatseg/types.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace spatseg {

// Colorado monthly-precipitation workflow data: per-station cumulative
// precipitation for one year, log transformed, keeping only stations with
// all twelve months observed.
struct ColoradoOptions {
    std::filesystem::path cache_dir = "cache";
    // Page hosting the raw station files (locations and monthly ppt).
    std::string base_url = "http://www.image.ucar.edu/GSP/Data/US.monthly.met/";
    std::string loc_file = "CO.loc";
    std::string ppt_file = "CO.ppt";
    bool offline = false; // never touch the network
    int year = 1992;
    std::size_t expected_stations = 254;
};

// Loads the preprocessed dataset from cache (validating its SHA-256 sidecar),
// otherwise preprocesses cached raw files, otherwise downloads the raw files
// and caches everything. The first fetch records the checksum; later loads
// must match it (integrity error otherwise). Throws data_error when offline
// with no cache. The returned dataset carries lon/lat coordinates and
// z = log(cumulative precipitation), with no nugget attached.
SpatialDataset fetch_colorado(const ColoradoOptions& opts = {});

// Hex-encoded SHA-256 of a byte string.
std::string sha256_hex(std::string_view bytes);

} // namespace spatseg

#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hslab/heleshaw.hpp"
#include "hslab/pme.hpp"

namespace hslab {

inline constexpr int kSnapshotFormatVersion = 1;

class SnapshotFormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/**
 * Snapshot CSV: '#' header lines (format version, time, gamma or "inf", grid,
 * law, audit counters) followed by a column header and one row per cell.
 * Hele-Shaw columns: x[,y],n0,n,p,w,F,quad_accum,omega_age.
 * Porous-medium columns: x[,y],n,p.
 * Numbers use the shortest round-trip form, so write, read, write is byte-identical.
 * The BDF2 history (w_prev) is not stored.
 */
std::string snapshot_text(const HsState& s);
std::string snapshot_text(const PmeState& s);

void write_snapshot(const std::filesystem::path& path, const HsState& s);
void write_snapshot(const std::filesystem::path& path, const PmeState& s);

/// Exactly one member is set, chosen by the gamma header ("inf" means Hele-Shaw).
struct LoadedSnapshot {
    std::optional<HsState> hs;
    std::optional<PmeState> pme;
};

LoadedSnapshot parse_snapshot(const std::string& text);
/// Throws SnapshotFormatError on unreadable or malformed files.
LoadedSnapshot read_snapshot(const std::filesystem::path& path);

/// The *.csv files of a directory in name order.
std::vector<std::filesystem::path> snapshot_files(const std::filesystem::path& dir);

/// "snap_00012.csv"
std::string snapshot_name(std::size_t index);

} // namespace hslab

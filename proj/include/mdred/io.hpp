#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "mdred/matrix.hpp"

namespace mdred::io {

// MDRX: fixed little-endian binary matrix format.
//   magic "MDRX" (4 bytes) | version u16 = 1 | dtype u8 (0 = f64, 1 = u8)
//   | rows u64 | cols u64 | row-major payload.
// u8 payloads hold binary matrices (contact maps) and are widened to
// {0.0, 1.0} on read.
enum class Dtype : std::uint8_t { F64 = 0, U8 = 1 };

void write_matrix(const Matrix& m, const std::filesystem::path& path, Dtype dtype = Dtype::F64);
Matrix read_matrix(const std::filesystem::path& path);

// CSV with 17 significant digits, enough for exact f64 round trips.
void write_csv_matrix(const Matrix& m, const std::filesystem::path& path);
Matrix read_csv_matrix(const std::filesystem::path& path);

// Manifest: one relative filename per line, UTF-8, LF endings.
std::vector<std::string> read_manifest(const std::filesystem::path& path);
void write_manifest(const std::vector<std::string>& names, const std::filesystem::path& path);

// A trajectory set on disk is a directory holding one MDRX file per
// trajectory plus manifest.txt naming them in order.
void write_trajectory_set(const TrajectorySet& ts, const std::filesystem::path& dir,
                          Dtype dtype = Dtype::F64);
TrajectorySet read_trajectory_set(const std::filesystem::path& dir);

// Discrete trajectories: one text file per trajectory with one state index
// per line, plus manifest.txt.
void write_discrete_trajectories(const std::vector<std::vector<int>>& dtrajs,
                                 const std::filesystem::path& dir);
std::vector<std::vector<int>> read_discrete_trajectories(const std::filesystem::path& dir);

// key=value text files (model manifests, synth specs, run configs).
// '#' starts a comment; blank lines are ignored; order is preserved on write.
using KeyValues = std::vector<std::pair<std::string, std::string>>;
KeyValues read_key_values(const std::filesystem::path& path);
void write_key_values(const KeyValues& kv, const std::filesystem::path& path);
std::string require_key(const KeyValues& kv, const std::string& key,
                        const std::filesystem::path& origin);
const std::string* find_key(const KeyValues& kv, const std::string& key);

// Formats a double with full round-trip precision (17 significant digits).
std::string format_full(double v);

}  // namespace mdred::io

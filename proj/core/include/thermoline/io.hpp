#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "thermoline/bounds.hpp"
#include "thermoline/inference.hpp"
#include "thermoline/simulate.hpp"

// Artifact serialization. All writers emit LF-only CSV with a header row,
// preceded by a `# config_hash=<16 hex digits>` comment so every file can be
// traced back to the exact configuration that produced it. Values are printed
// with 17 significant digits, enough for a double to survive a print/parse
// round trip bit-exactly.

namespace thermoline::io {

// 64-bit FNV-1a over raw bytes.
std::uint64_t fnv1a64(std::string_view data);

// Lowercase hex, zero-padded to 16 digits.
std::string hash_hex(std::uint64_t h);

std::string format_value(double v);

// Writes to a sibling temp file and renames into place, so a crash or a
// concurrent reader never sees a partial artifact.
void atomic_write(const std::filesystem::path& path, const std::string& content);

// Columns: lambda, theta, density.
std::string grid_csv(const infer::PosteriorGrid& grid, std::uint64_t config_hash);

// Columns: step, outcome, theta_hat_msd, theta_hat_msle, msd, msle, eps_adapted.
// Requires a record whose per-step sequences all share the same length.
std::string trajectory_csv(const sim::TrajectoryRecord& rec, std::uint64_t config_hash);

// Columns: nu, emsd, emsle, ecrb, bcrb.
std::string ensemble_csv(const sim::EnsembleSummary& s, std::uint64_t config_hash);

// One row per repetition count: nu, ecrb, bcrb, tbcrb, tbcrb_std_error,
// q_prior, q_prior_flagged, tbcrb_flagged (flags as 0/1).
std::string bounds_csv(const std::vector<bounds::BoundReport>& rows, std::uint64_t config_hash);

// Same content as bounds_csv plus the model/probe descriptions, as JSON.
std::string bounds_json(const std::vector<bounds::BoundReport>& rows, std::uint64_t config_hash);

}  // namespace thermoline::io

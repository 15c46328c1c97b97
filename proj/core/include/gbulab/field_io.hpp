#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gbulab/grid.hpp"
#include "gbulab/problem.hpp"
#include "gbulab/trajectory.hpp"

namespace gbulab {

/**
 * Binary field record:
 *
 *   32-byte ASCII header  "D NNNNN MMMMM tHHHHHHHHHHHHHHHH\n"
 *     D      dimension (1 or 2)
 *     NNNNN  nx, MMMMM ny (ny = 1 in 1D), right-aligned decimal
 *     H...   IEEE-754 bit pattern of the time stamp, 16 lowercase hex digits
 *   nx*ny little-endian float64 values, row-major (x fastest).
 *
 * The hex time stamp keeps the round trip bit-exact.
 */
inline constexpr std::size_t kFieldHeaderBytes = 32;

struct FieldRecord {
    int dimension = 1;
    std::size_t nx = 0;
    std::size_t ny = 1;
    double t = 0.0;
    Field values;
};

std::vector<std::uint8_t> encode_field(const Grid& grid, std::span<const double> values, double t);

/// Decodes one record starting at `offset`; advances offset past it.
FieldRecord decode_field(std::span<const std::uint8_t> bytes, std::size_t& offset);

/// snapshot: state -> bytes.
std::vector<std::uint8_t> snapshot(const SolutionState& state);

/// restore: bytes -> state, validating the header against the grid and the
/// Dirichlet pinning u == g on boundary nodes.
SolutionState restore(std::span<const std::uint8_t> bytes, const GridPtr& grid, std::span<const double> g);

/// Trajectory file: concatenated field records, one per frame.
std::vector<std::uint8_t> encode_trajectory(const Trajectory& traj);
/// Rebuilds frames; ut is recomputed as backward differences between records.
std::vector<Frame> decode_trajectory(std::span<const std::uint8_t> bytes, const Grid& grid);

void write_bytes(const std::string& path, std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> read_bytes(const std::string& path);

} // namespace gbulab

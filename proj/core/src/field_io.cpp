#include "gbulab/field_io.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>

#include "gbulab/errors.hpp"

namespace gbulab {

namespace {

void put_u64_le(std::vector<std::uint8_t>& out, std::uint64_t v) {
    for (int b = 0; b < 8; ++b) out.push_back(static_cast<std::uint8_t>(v >> (8 * b)));
}

std::uint64_t get_u64_le(const std::uint8_t* p) {
    std::uint64_t v = 0;
    for (int b = 7; b >= 0; --b) v = (v << 8) | p[b];
    return v;
}

bool all_digits_or_space(const char* s, std::size_t n) {
    for (std::size_t k = 0; k < n; ++k)
        if (!(s[k] == ' ' || (s[k] >= '0' && s[k] <= '9'))) return false;
    return true;
}

} // namespace

std::vector<std::uint8_t> encode_field(const Grid& grid, std::span<const double> values, double t) {
    require(values.size() == grid.size(), "encode_field: size mismatch");
    require(grid.nx() <= 99999 && grid.ny() <= 99999, "encode_field: grid too large for header");
    char header[kFieldHeaderBytes + 1];
    const int written = std::snprintf(header, sizeof header, "%d %5zu %5zu t%016llx\n", grid.dimension(), grid.nx(),
                                      grid.ny(), static_cast<unsigned long long>(std::bit_cast<std::uint64_t>(t)));
    require(written == static_cast<int>(kFieldHeaderBytes), "encode_field: header layout");
    std::vector<std::uint8_t> out(header, header + kFieldHeaderBytes);
    out.reserve(kFieldHeaderBytes + 8 * values.size());
    for (double v : values) put_u64_le(out, std::bit_cast<std::uint64_t>(v));
    return out;
}

FieldRecord decode_field(std::span<const std::uint8_t> bytes, std::size_t& offset) {
    if (bytes.size() < offset + kFieldHeaderBytes) throw FormatError("field record: truncated header");
    const char* h = reinterpret_cast<const char*>(bytes.data() + offset);
    // "D NNNNN MMMMM tHHHHHHHHHHHHHHHH\n"
    if (!(h[0] == '1' || h[0] == '2') || h[1] != ' ' || h[7] != ' ' || h[13] != ' ' || h[14] != 't' ||
        h[31] != '\n' || !all_digits_or_space(h + 2, 5) || !all_digits_or_space(h + 8, 5))
        throw FormatError("field record: malformed header");
    FieldRecord rec;
    rec.dimension = h[0] - '0';
    rec.nx = std::strtoull(std::string(h + 2, 5).c_str(), nullptr, 10);
    rec.ny = std::strtoull(std::string(h + 8, 5).c_str(), nullptr, 10);
    std::uint64_t bits = 0;
    for (int k = 15; k < 31; ++k) {
        const char c = h[k];
        int d;
        if (c >= '0' && c <= '9') d = c - '0';
        else if (c >= 'a' && c <= 'f') d = c - 'a' + 10;
        else throw FormatError("field record: malformed time stamp");
        bits = (bits << 4) | static_cast<std::uint64_t>(d);
    }
    rec.t = std::bit_cast<double>(bits);
    if (rec.nx < 3 || rec.ny < 1 || (rec.dimension == 1 && rec.ny != 1) || (rec.dimension == 2 && rec.ny < 3))
        throw FormatError("field record: inconsistent dimensions");
    const std::size_t count = rec.nx * rec.ny;
    const std::size_t start = offset + kFieldHeaderBytes;
    if (bytes.size() < start + 8 * count) throw FormatError("field record: truncated payload");
    rec.values.resize(count);
    for (std::size_t k = 0; k < count; ++k)
        rec.values[k] = std::bit_cast<double>(get_u64_le(bytes.data() + start + 8 * k));
    offset = start + 8 * count;
    return rec;
}

std::vector<std::uint8_t> snapshot(const SolutionState& state) {
    return encode_field(state.grid(), state.u(), state.t());
}

SolutionState restore(std::span<const std::uint8_t> bytes, const GridPtr& grid, std::span<const double> g) {
    std::size_t offset = 0;
    FieldRecord rec = decode_field(bytes, offset);
    if (offset != bytes.size()) throw FormatError("snapshot: trailing bytes");
    if (rec.dimension != grid->dimension() || rec.nx != grid->nx() || rec.ny != grid->ny())
        throw FormatError("snapshot: grid mismatch");
    if (g.size() != grid->size()) throw FormatError("snapshot: boundary data does not match grid");
    if (boundary_mismatch(*grid, rec.values, g) != 0.0) throw FormatError("snapshot: boundary values are not pinned to g");
    return SolutionState(grid, std::move(rec.values), rec.t);
}

std::vector<std::uint8_t> encode_trajectory(const Trajectory& traj) {
    std::vector<std::uint8_t> out;
    for (const Frame& f : traj.frames) {
        auto rec = encode_field(*traj.grid, f.u, f.t);
        out.insert(out.end(), rec.begin(), rec.end());
    }
    return out;
}

std::vector<Frame> decode_trajectory(std::span<const std::uint8_t> bytes, const Grid& grid) {
    std::vector<Frame> frames;
    std::size_t offset = 0;
    while (offset < bytes.size()) {
        FieldRecord rec = decode_field(bytes, offset);
        if (rec.dimension != grid.dimension() || rec.nx != grid.nx() || rec.ny != grid.ny())
            throw FormatError("trajectory: grid mismatch");
        Frame f;
        f.t = rec.t;
        f.step = frames.size();
        f.u = std::move(rec.values);
        f.ut.assign(f.u.size(), 0.0);
        if (!frames.empty()) {
            const Frame& prev = frames.back();
            f.dt = f.t - prev.t;
            if (!(f.dt > 0.0)) throw FormatError("trajectory: time stamps must increase");
            for (std::size_t k = 0; k < f.u.size(); ++k) f.ut[k] = (f.u[k] - prev.u[k]) / f.dt;
        }
        frames.push_back(std::move(f));
    }
    if (frames.empty()) throw FormatError("trajectory: no records");
    return frames;
}

void write_bytes(const std::string& path, std::span<const std::uint8_t> bytes) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("cannot open for writing: " + path);
    os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!os) throw Error("write failed: " + path);
}

std::vector<std::uint8_t> read_bytes(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error("cannot open for reading: " + path);
    return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>());
}

} // namespace gbulab

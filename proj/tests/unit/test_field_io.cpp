#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <limits>

#include "gbulab/errors.hpp"
#include "gbulab/field_io.hpp"

using namespace gbulab;

namespace {

GridPtr square() { return make_shared_grid(Grid::rectangle({0.0, 1.0}, {0.0, 1.0}, 7, 5)); }

} // namespace

TEST(FieldIo, HeaderLayout) {
    auto g = square();
    const auto bytes = encode_field(*g, Field(g->size(), 0.0), 0.0);
    ASSERT_EQ(bytes.size(), kFieldHeaderBytes + 8 * g->size());
    const std::string head(bytes.begin(), bytes.begin() + kFieldHeaderBytes);
    EXPECT_EQ(head, "2     7     5 t0000000000000000\n");
}

TEST(FieldIo, SnapshotRoundTripIsBitExact) {
    auto g = square();
    Field u = g->sample([](double x, double y) { return std::sin(x + 0.1) * std::exp(y) / 3.0; });
    u[9] = std::numeric_limits<double>::denorm_min();
    const Field gb = u;
    const double t = 0.1 + 1e-17;
    const auto bytes = snapshot(SolutionState(g, u, t));
    const SolutionState back = restore(bytes, g, gb);
    EXPECT_EQ(std::memcmp(back.field().data(), u.data(), u.size() * sizeof(double)), 0);
    EXPECT_EQ(back.t(), t);
    EXPECT_EQ(snapshot(back), bytes);
}

TEST(FieldIo, RestoreRejectsMismatch) {
    auto g = square();
    const Field u(g->size(), 1.0);
    auto bytes = snapshot(SolutionState(g, u, 0.0));
    auto other = make_shared_grid(Grid::rectangle({0.0, 1.0}, {0.0, 1.0}, 5, 7));
    EXPECT_THROW(restore(bytes, other, Field(other->size(), 1.0)), FormatError);
    EXPECT_THROW(restore(bytes, g, Field(g->size(), 0.0)), FormatError);

    auto truncated = bytes;
    truncated.pop_back();
    EXPECT_THROW(restore(truncated, g, u), FormatError);
    auto garbage = bytes;
    garbage[0] = 'x';
    EXPECT_THROW(restore(garbage, g, u), FormatError);
    auto trailing = bytes;
    trailing.push_back(0);
    EXPECT_THROW(restore(trailing, g, u), FormatError);
}

TEST(FieldIo, TrajectoryRoundTripRecomputesDifferences) {
    auto g = make_shared_grid(Grid::interval({0.0, 1.0}, 6));
    Trajectory traj;
    traj.grid = g;
    traj.frames.push_back(Frame{0.0, 0.0, 0, Field{0, 1, 2, 3, 4, 0}, Field(6, 0.0)});
    traj.frames.push_back(Frame{0.5, 0.5, 3, Field{0, 2, 2, 3, 5, 0}, Field(6, 0.0)});
    const auto frames = decode_trajectory(encode_trajectory(traj), *g);
    ASSERT_EQ(frames.size(), 2u);
    EXPECT_EQ(frames[1].t, 0.5);
    EXPECT_EQ(frames[1].u, traj.frames[1].u);
    EXPECT_DOUBLE_EQ(frames[1].ut[1], 2.0);
    EXPECT_DOUBLE_EQ(frames[1].ut[4], 2.0);
    EXPECT_EQ(frames[1].ut[2], 0.0);

    EXPECT_THROW(decode_trajectory({}, *g), FormatError);
}

TEST(FieldIo, FileRoundTrip) {
    const auto path = std::filesystem::temp_directory_path() / "gbulab_field_io_test.bin";
    const std::vector<std::uint8_t> bytes{1, 2, 3, 250};
    write_bytes(path.string(), bytes);
    EXPECT_EQ(read_bytes(path.string()), bytes);
    std::filesystem::remove(path);
    EXPECT_THROW(read_bytes(path.string()), Error);
}

#include <catch2/catch_amalgamated.hpp>

#include "flowgen/depth_unify.hpp"
#include "flowgen/warp.hpp"
#include "oracle_helpers.hpp"

using namespace flowgen;

TEST_CASE("depth_to_disparity divides bf by depth") {
    ScalarField z(4, 4, 2.0);
    const ScalarField d = depth_to_disparity(z, 1.0);
    for (std::size_t i = 0; i < d.values.size(); ++i) {
        REQUIRE(d.valid[i] == 1);
        CHECK(d.values[i] == 0.5);
    }
    const ScalarField d2 = depth_to_disparity(ScalarField(4, 4, 25.0), 50.0);
    CHECK(d2.values[0] == 2.0);
}

TEST_CASE("depth_to_disparity invalidates nonpositive depth and counts it") {
    ScalarField z(4, 4, 2.0);
    z.values[5] = 0.0;
    z.values[9] = -1.0;
    std::size_t dropped = 0;
    const ScalarField d = depth_to_disparity(z, 1.0, &dropped);
    CHECK(dropped == 2);
    CHECK(d.valid[5] == 0);
    CHECK(d.valid[9] == 0);
    CHECK(d.values[5] == 0.0);
    CHECK(d.valid[0] == 1);
}

TEST_CASE("depth/disparity conversions reject nonpositive bf") {
    ScalarField z(2, 2, 1.0);
    CHECK_THROWS_AS(depth_to_disparity(z, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(disparity_to_depth(z, -1.0), std::invalid_argument);
}

TEST_CASE("disparity_to_depth round trip is the identity") {
    RngStream rng(3);
    ScalarField z(16, 16);
    for (auto& v : z.values) v = rng.uniform(0.5, 80.0);
    const ScalarField back = disparity_to_depth(depth_to_disparity(z, 35.0), 35.0);
    for (std::size_t i = 0; i < z.values.size(); ++i) {
        REQUIRE(back.valid[i] == 1);
        CHECK(std::abs(back.values[i] - z.values[i]) / z.values[i] < 1e-6);
    }
    const ScalarField d0 = disparity_to_depth(ScalarField(2, 2, 0.5), 1.0);
    CHECK(d0.values[0] == 2.0);
}

TEST_CASE("zero disparity becomes invalid depth") {
    ScalarField d(2, 2, 0.0);
    const ScalarField z = disparity_to_depth(d, 1.0);
    CHECK(z.count_valid() == 0);
}

TEST_CASE("disparity_to_flow is horizontal with the requested sign") {
    ScalarField d(5, 3, 3.0);
    d.valid[d.idx(1, 1)] = 0;
    const FlowField plus = disparity_to_flow(d, +1);
    const FlowField minus = disparity_to_flow(d, -1);
    for (int y = 0; y < 3; ++y)
        for (int x = 0; x < 5; ++x) {
            const std::size_t i = d.idx(y, x);
            if (y == 1 && x == 1) {
                CHECK(plus.valid[i] == 0);
                continue;
            }
            CHECK(plus.u[i] == 3.0);
            CHECK(plus.v[i] == 0.0);
            CHECK(minus.u[i] == -3.0);
        }
}

namespace {

// Deterministic virtual-stereo setup with a pinned disparity: constant
// depth, disp_frac range collapsed so d = frac * width exactly.
VirtualStereoResult run_virtual_stereo(int width, int height, double depth_value,
                                       double disp_px, std::uint64_t seed) {
    RngStream probe(seed);
    Image img = oracle::smooth_texture(width, height, probe);
    ScalarField depth(width, height, depth_value);
    VirtualStereoConfig cfg;
    cfg.disp_frac_min = cfg.disp_frac_max = disp_px / width;
    RngStream rng(seed);
    return synth_virtual_stereo(img, depth, cfg, rng);
}

}  // namespace

TEST_CASE("synth_virtual_stereo shifts a constant-depth plane by the sampled disparity") {
    // find seeds for both sign draws; the stream is deterministic per seed
    bool saw_plus = false, saw_minus = false;
    for (std::uint64_t seed = 0; seed < 32 && !(saw_plus && saw_minus); ++seed) {
        const VirtualStereoResult res = run_virtual_stereo(16, 16, 2.0, 4.0, seed);
        REQUIRE((res.s_i == 1 || res.s_i == -1));
        (res.s_i == 1 ? saw_plus : saw_minus) = true;

        // ground truth is exactly the flow used to splat: (s_i * 4, 0)
        CHECK(oracle::max_abs_diff(res.tuple.flow,
                                   oracle::constant_flow(res.s_i * 4.0, 0.0)) < 1e-12);

        // target is the source shifted by s_i*4 columns wherever masked valid
        const Image& src = res.tuple.source;
        const Image& tgt = res.tuple.target;
        std::size_t checked = 0;
        for (int y = 0; y < 16; ++y)
            for (int x = 0; x < 16; ++x) {
                if (!res.tuple.mask[res.tuple.flow.idx(y, x)]) continue;
                const int tx = x + res.s_i * 4;
                REQUIRE(tx >= 0);
                REQUIRE(tx < 16);
                CHECK(tgt.at(y, tx) == Catch::Approx(src.at(y, x)).margin(1e-6));
                ++checked;
            }
        CHECK(checked >= 16u * 12u);
    }
    REQUIRE(saw_plus);
    REQUIRE(saw_minus);
}

TEST_CASE("synth_virtual_stereo with all-invalid depth reports an empty warp") {
    RngStream rng(5);
    Image img = oracle::smooth_texture(8, 8, rng);
    ScalarField depth(8, 8, 1.0, false);
    VirtualStereoConfig cfg;
    RngStream stream(1);
    CHECK_THROWS_WITH(synth_virtual_stereo(img, depth, cfg, stream), "empty warp");
}

TEST_CASE("synth_virtual_stereo clamps an oversized s_c range and flags it") {
    RngStream rng(6);
    Image img = oracle::smooth_texture(16, 16, rng);
    ScalarField depth(16, 16, 2.0);
    VirtualStereoConfig cfg;
    cfg.disp_frac_min = 0.5;  // above the hard cap of 0.3
    cfg.disp_frac_max = 0.6;
    RngStream stream(1);
    const VirtualStereoResult res = synth_virtual_stereo(img, depth, cfg, stream);
    CHECK(res.s_c_clamped);
    CHECK(res.s_c == Catch::Approx(0.3 * 16 * 2.0));
}

TEST_CASE("virtual stereo is deterministic for a fixed stream seed") {
    const VirtualStereoResult a = run_virtual_stereo(12, 12, 3.0, 2.0, 77);
    const VirtualStereoResult b = run_virtual_stereo(12, 12, 3.0, 2.0, 77);
    CHECK(a.s_c == b.s_c);
    CHECK(a.s_i == b.s_i);
    CHECK(a.tuple.flow.u == b.tuple.flow.u);
    CHECK(a.tuple.target.data == b.tuple.target.data);
    CHECK(a.tuple.mask == b.tuple.mask);
}

TEST_CASE("ingest_stereo builds the flow from real disparity") {
    RngStream rng(8);
    const int w = 32, h = 24;
    const Image left = oracle::smooth_texture(w, h, rng);

    // rectified pair with constant integer disparity 2: right(x) = left(x+2)
    Image right(w, h, 1);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            right.at(y, x) = left.at(y, std::min(x + 2, w - 1));

    ScalarField disp(w, h, 2.0);
    const StereoIngestResult res = ingest_stereo(left, right, disp, 100.0);

    CHECK(oracle::max_abs_diff(res.tuple.flow, oracle::constant_flow(-2.0, 0.0)) == 0.0);
    for (std::size_t i = 0; i < res.source_depth.values.size(); ++i)
        CHECK(res.source_depth.values[i] == 50.0);

    // photoconsistency against the constructed right image
    const BackwardWarpResult back = backward_warp_image(res.tuple.flow, right);
    double err = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < res.tuple.mask.size(); ++i) {
        if (!res.tuple.mask[i] || !back.valid[i]) continue;
        err += std::abs(back.image.data[i] - left.data[i]);
        ++n;
    }
    REQUIRE(n > res.tuple.mask.size() / 2);
    CHECK(err / n < 0.02);
}

TEST_CASE("ingest_stereo computes Z from the stereo bf constant") {
    Image left(4, 4, 1, 0.5f), right(4, 4, 1, 0.5f);
    ScalarField disp(4, 4, 4.0);
    const StereoIngestResult res = ingest_stereo(left, right, disp, 100.0);
    for (std::size_t i = 0; i < res.source_depth.values.size(); ++i)
        CHECK(res.source_depth.values[i] == 25.0);
}

TEST_CASE("ingest_stereo rejects mismatched dimensions") {
    Image left(4, 4, 1, 0.5f), right(5, 4, 1, 0.5f);
    ScalarField disp(4, 4, 1.0);
    CHECK_THROWS_AS(ingest_stereo(left, right, disp, 1.0), std::invalid_argument);
}

TEST_CASE("flows from this module are horizontal-only at valid pixels") {
    for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
        const VirtualStereoResult res = run_virtual_stereo(20, 14, 4.0, 3.0, seed);
        for (std::size_t i = 0; i < res.tuple.flow.v.size(); ++i)
            if (res.tuple.flow.valid[i]) CHECK(res.tuple.flow.v[i] == 0.0);
    }
}

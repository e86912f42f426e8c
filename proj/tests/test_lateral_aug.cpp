#include <catch2/catch_amalgamated.hpp>
#include <numbers>

#include "flowgen/lateral_aug.hpp"
#include "flowgen/warp.hpp"
#include "oracle_helpers.hpp"

using namespace flowgen;

TEST_CASE("horizontal flip flow mirrors about the vertical axis") {
    const auto fp = flip_flow({10, 6}, true);
    // width 10, x=2: target x = 7, u = 5
    CHECK(fp.forward.u[fp.forward.idx(0, 2)] == 5.0);
    CHECK(fp.forward.v[fp.forward.idx(0, 2)] == 0.0);
    // backward flow IS the forward flow
    CHECK(fp.backward.u == fp.forward.u);
    CHECK(fp.backward.v == fp.forward.v);
}

TEST_CASE("center column of an odd-width image is a flip fixed point") {
    const auto fp = flip_flow({11, 4}, true);
    for (int y = 0; y < 4; ++y) CHECK(fp.forward.u[fp.forward.idx(y, 5)] == 0.0);
}

TEST_CASE("flips are involutions with zero error") {
    for (const bool horizontal : {true, false}) {
        const auto fp = flip_flow({23, 17}, horizontal);
        for (int y = 0; y < 17; ++y)
            for (int x = 0; x < 23; ++x) {
                const double x1 = x + fp.forward.u[fp.forward.idx(y, x)];
                const double y1 = y + fp.forward.v[fp.forward.idx(y, x)];
                const std::size_t j = fp.forward.idx(static_cast<int>(y1), static_cast<int>(x1));
                CHECK(x1 + fp.forward.u[j] == x);
                CHECK(y1 + fp.forward.v[j] == y);
            }
    }
}

TEST_CASE("rotation flow matches the closed form at pinned points") {
    // theta=pi/2, s=+1, c=(0,0): p=(1,0) rotates to (0,1), so F=(-1,1)
    const auto fp = rotation_flow({4, 4}, std::numbers::pi / 2, +1, 0.0, 0.0);
    CHECK(std::abs(fp.forward.u[fp.forward.idx(0, 1)] - (-1.0)) < 1e-12);
    CHECK(std::abs(fp.forward.v[fp.forward.idx(0, 1)] - 1.0) < 1e-12);
    // backward rotates the other way: p=(1,0) -> (0,-1), so B=(-1,-1)
    CHECK(std::abs(fp.backward.u[fp.backward.idx(0, 1)] - (-1.0)) < 1e-12);
    CHECK(std::abs(fp.backward.v[fp.backward.idx(0, 1)] - (-1.0)) < 1e-12);
}

TEST_CASE("zero-angle rotation is a zero flow") {
    const auto fp = rotation_flow({8, 8}, 0.0, -1, 3.5, 3.5);
    CHECK(oracle::max_abs_flow(fp.forward) == 0.0);
}

TEST_CASE("shear flow matches the closed form") {
    // lambda=0.5, s=+1, horizontal, p=(2,4): F = (0.5*4, 0) = (2,0)
    const auto fp = shear_flow({8, 8}, 0.5, +1, true);
    CHECK(fp.forward.u[fp.forward.idx(4, 2)] == 2.0);
    CHECK(fp.forward.v[fp.forward.idx(4, 2)] == 0.0);
    CHECK(fp.backward.u[fp.backward.idx(4, 2)] == -2.0);

    CHECK(oracle::max_abs_flow(shear_flow({8, 8}, 0.0, +1, true).forward) == 0.0);

    // vertical, lambda=1, s=+1, p=(3,1): F = (0, 3)
    const auto vp = shear_flow({8, 8}, 1.0, +1, false);
    CHECK(vp.forward.u[vp.forward.idx(1, 3)] == 0.0);
    CHECK(vp.forward.v[vp.forward.idx(1, 3)] == 3.0);
}

TEST_CASE("special flows match closed-form values at random pixels") {
    RngStream rng(41);
    for (int rep = 0; rep < 40; ++rep) {
        const int w = rng.uniform_int(8, 128), h = rng.uniform_int(8, 128);
        const double theta = rng.uniform(-2.5, 2.5);
        const int s = rng.sign();
        const double cx = rng.uniform(0, w - 1.0), cy = rng.uniform(0, h - 1.0);
        const auto rot = rotation_flow({w, h}, theta, s, cx, cy);
        const double a = s * theta;
        const auto rot_fn = [&](double x, double y) {
            return std::pair{std::cos(a) * (x - cx) - std::sin(a) * (y - cy) + cx - x,
                             std::sin(a) * (x - cx) + std::cos(a) * (y - cy) + cy - y};
        };
        CHECK(oracle::max_abs_diff(rot.forward, rot_fn) < 1e-6);

        const double lam = rng.uniform(-0.99, 0.99);
        const auto sh = shear_flow({w, h}, lam, s, false);
        const auto sh_fn = [&](double x, double) { return std::pair{0.0, s * lam * x}; };
        CHECK(oracle::max_abs_diff(sh.forward, sh_fn) < 1e-6);

        const auto fl = flip_flow({w, h}, false);
        const auto fl_fn = [&](double, double y) { return std::pair{0.0, (h - 1) - 2 * y}; };
        CHECK(oracle::max_abs_diff(fl.forward, fl_fn) == 0.0);
    }
}

TEST_CASE("rotation and shear cancel against their backward flows") {
    RngStream rng(42);
    for (int rep = 0; rep < 25; ++rep) {
        const double theta = rng.uniform(0.05, 0.5);
        const int s = rng.sign();
        const auto rot = rotation_flow({48, 48}, theta, s, rng.uniform(10, 38),
                                       rng.uniform(10, 38));
        CHECK(oracle::max_abs_flow(compose_flows(rot.forward, rot.backward)) < 1e-3);

        const double lam = rng.uniform(0.05, 0.45);
        const auto sh = shear_flow({48, 48}, lam, s, rep % 2 == 0);
        CHECK(oracle::max_abs_flow(compose_flows(sh.forward, sh.backward)) < 1e-3);
    }
}

TEST_CASE("out-of-range augmentation parameters are rejected") {
    CHECK_THROWS_AS(rotation_flow({8, 8}, 3.5, +1, 4, 4), std::invalid_argument);
    CHECK_THROWS_AS(shear_flow({8, 8}, 1.5, +1, true), std::invalid_argument);
    AugSpec bad;
    bad.kind = AugKind::Rotate;
    bad.theta_a = 0.3;
    bad.cx = 20.0;  // outside an 8x8 grid
    bad.cy = 2.0;
    CHECK_THROWS_AS(special_flow({8, 8}, bad), std::invalid_argument);
}

namespace {

SampleTuple make_base_tuple(int w, int h, double u_const, std::uint64_t seed) {
    RngStream rng(seed);
    SampleTuple t;
    t.source = oracle::smooth_texture(w, h, rng);
    t.flow = FlowField(w, h, u_const, 0.0);
    // a geometrically consistent target: gather source through the flow's
    // inverse (constant shift), content outside stays black but masked off
    t.target = Image(w, h, 1);
    t.mask.assign(t.flow.n_pixels(), 0);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const int sx = x - static_cast<int>(u_const);
            if (sx >= 0 && sx < w) t.target.at(y, x) = t.source.at(y, sx);
            const int tx = x + static_cast<int>(u_const);
            if (tx >= 0 && tx < w) t.mask[t.flow.idx(y, x)] = 1;
        }
    t.sample_id = "base";
    t.kind = "f01";
    t.modality = "mono";
    return t;
}

}  // namespace

TEST_CASE("AugKind::None passes the tuple through with label none") {
    const SampleTuple base = make_base_tuple(16, 16, 2.0, 51);
    const SampleTuple out = apply_lateral_aug(base, AugSpec{}, AugSide::Target);
    CHECK(out.label == AugLabel::None);
    CHECK(out.flow.u == base.flow.u);
    CHECK(out.target.data == base.target.data);
}

TEST_CASE("zero base flow with a target-side flip yields exactly the flip flow") {
    RngStream rng(52);
    SampleTuple base;
    base.source = oracle::smooth_texture(12, 10, rng);
    base.target = base.source;  // degenerate pair I_s = I_t
    base.flow = FlowField(12, 10);
    base.mask.assign(base.flow.n_pixels(), 1);

    AugSpec spec;
    spec.kind = AugKind::FlipH;
    const SampleTuple out = apply_lateral_aug(base, spec, AugSide::Target);
    const auto fp = flip_flow({12, 10}, true);
    CHECK(out.flow.u == fp.forward.u);
    CHECK(out.flow.v == fp.forward.v);
    CHECK(out.label == AugLabel::Flip);

    // the augmented target is the mirrored image, exactly
    for (int y = 0; y < 10; ++y)
        for (int x = 0; x < 12; ++x) CHECK(out.target.at(y, x) == base.target.at(y, 11 - x));
}

TEST_CASE("target-side shear over a constant base flow matches the per-pixel oracle") {
    const SampleTuple base = make_base_tuple(24, 24, 2.0, 53);
    AugSpec spec;
    spec.kind = AugKind::ShearH;
    spec.lambda_a = 0.5;
    spec.sign = +1;
    const SampleTuple out = apply_lateral_aug(base, spec, AugSide::Target);

    // F'(x,y) = (2,0) + F_a(x+2, y) = (2 + 0.5 y, 0)
    std::size_t n = 0;
    for (int y = 0; y < 24; ++y)
        for (int x = 0; x < 24; ++x) {
            const std::size_t i = out.flow.idx(y, x);
            if (!out.flow.valid[i]) continue;
            CHECK(std::abs(out.flow.u[i] - (2.0 + 0.5 * y)) < 1e-9);
            CHECK(out.flow.v[i] == 0.0);
            ++n;
        }
    CHECK(n > 0);
    CHECK(out.label == AugLabel::Shear);
}

TEST_CASE("source-side augmentation follows Eq-15-style composition") {
    const SampleTuple base = make_base_tuple(32, 32, 3.0, 54);
    AugSpec spec;
    spec.kind = AugKind::Rotate;
    spec.theta_a = 0.2;
    spec.sign = -1;
    spec.cx = 15.5;
    spec.cy = 15.5;
    const SampleTuple out = apply_lateral_aug(base, spec, AugSide::Source);

    // oracle: B_a(p) + F(p + B_a(p)); F constant (3,0)
    const double a = -spec.sign * spec.theta_a;
    const auto oracle_fn = [&](double x, double y) {
        const double bu = std::cos(a) * (x - 15.5) - std::sin(a) * (y - 15.5) + 15.5 - x;
        const double bv = std::sin(a) * (x - 15.5) + std::cos(a) * (y - 15.5) + 15.5 - y;
        return std::pair{bu + 3.0, bv};
    };
    CHECK(oracle::max_abs_diff(out.flow, oracle_fn) < 1e-4);
}

TEST_CASE("augmented tuples keep label metadata consistent") {
    const SampleTuple base = make_base_tuple(20, 20, 1.0, 55);
    RngStream rng(56);
    LateralAugConfig cfg;
    for (int rep = 0; rep < 30; ++rep) {
        const AugSpec spec = sample_aug_spec(cfg, base.flow.grid(), rng);
        const AugSide side = rng.bernoulli(0.5) ? AugSide::Target : AugSide::Source;
        const SampleTuple out = apply_lateral_aug(base, spec, side);
        CHECK(out.label == label_of(spec.kind));
        CHECK(out.meta.at("aug") == to_string(spec.kind));
        CHECK(out.meta.at("aug_side") == (side == AugSide::Target ? "target" : "source"));
    }
}

TEST_CASE("augmented tuples stay photoconsistent within the relaxed bound") {
    RngStream scene_rng(57);
    const int w = 48, h = 40;
    SampleTuple base;
    base.source = oracle::smooth_texture(w, h, scene_rng);
    const ScalarField depth = oracle::smooth_depth(w, h, scene_rng);
    FlowField flow(w, h, 2.5, 0.0);
    const WarpResult warped = forward_splat(base.source, depth, flow);
    base.target = warped.image;
    base.flow = flow;
    base.mask = visibility_mask(flow, depth, warped.depth);

    RngStream rng(58);
    LateralAugConfig cfg;
    for (int rep = 0; rep < 10; ++rep) {
        const AugSpec spec = sample_aug_spec(cfg, base.flow.grid(), rng);
        const AugSide side = rng.bernoulli(0.5) ? AugSide::Target : AugSide::Source;
        const SampleTuple out = apply_lateral_aug(base, spec, side);

        const BackwardWarpResult back = backward_warp_image(out.flow, out.target);
        double err = 0.0;
        std::size_t n = 0;
        for (std::size_t i = 0; i < out.mask.size(); ++i) {
            if (!out.mask[i] || !back.valid[i]) continue;
            err += std::abs(back.image.data[i] - out.source.data[i]);
            ++n;
        }
        REQUIRE(n > 100);
        CHECK(err / n < 0.03);
    }
}

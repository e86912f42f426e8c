#pragma once

// Analytic special flows for flipping, rotation and shearing, their exact
// backward flows, and application of an augmentation to ONE image of a
// tuple with the ground truth rebuilt by flow composition:
//
//   target side:  F_s->t' = F_s->t + W^-1(F_s->t, F_a)
//   source side:  F_s'->t = B_a   + W^-1(B_a,   F_s->t)
//
// Augmented images are resampled through the exact inverse map (a gather
// via B_a), which realizes A(I) without splatting artifacts. Flip axes use
// (width-1)/(height-1) so zero-indexed pixel centers mirror exactly.

#include <cmath>
#include <numbers>

#include "flowgen/rng.hpp"
#include "flowgen/sample_tuple.hpp"
#include "flowgen/sampling.hpp"
#include "flowgen/warp.hpp"

namespace flowgen {

enum class AugKind { FlipH, FlipV, Rotate, ShearH, ShearV, None };

inline AugLabel label_of(AugKind k) {
    switch (k) {
        case AugKind::FlipH:
        case AugKind::FlipV: return AugLabel::Flip;
        case AugKind::Rotate: return AugLabel::Rotate;
        case AugKind::ShearH:
        case AugKind::ShearV: return AugLabel::Shear;
        default: return AugLabel::None;
    }
}

inline const char* to_string(AugKind k) {
    switch (k) {
        case AugKind::FlipH: return "flip_h";
        case AugKind::FlipV: return "flip_v";
        case AugKind::Rotate: return "rotate";
        case AugKind::ShearH: return "shear_h";
        case AugKind::ShearV: return "shear_v";
        default: return "none";
    }
}

struct AugSpec {
    AugKind kind = AugKind::None;
    double theta_a = 0.0;   // radians, Rotate only
    double lambda_a = 0.0;  // Shear only
    int sign = 1;           // s_i, Rotate/Shear
    double cx = 0.0, cy = 0.0;  // rotation center c_0
};

struct SpecialFlowPair {
    FlowField forward;   // F_a
    FlowField backward;  // B_a
};

inline SpecialFlowPair flip_flow(PixelGrid grid, bool horizontal) {
    FlowField f(grid.width, grid.height);
    for (int y = 0; y < grid.height; ++y) {
        for (int x = 0; x < grid.width; ++x) {
            if (horizontal)
                f.set(y, x, (grid.width - 1) - 2.0 * x, 0.0);
            else
                f.set(y, x, 0.0, (grid.height - 1) - 2.0 * y);
        }
    }
    return {f, f};  // a flip is its own inverse
}

inline SpecialFlowPair rotation_flow(PixelGrid grid, double theta_a, int sign, double center_x,
                                     double center_y) {
    if (!(std::abs(theta_a) < std::numbers::pi))
        throw std::invalid_argument("rotation_flow: |theta| must be < pi");
    SpecialFlowPair out{FlowField(grid.width, grid.height), FlowField(grid.width, grid.height)};
    const double a = sign * theta_a;
    const double cf = std::cos(a), sf = std::sin(a);
    const double cb = std::cos(-a), sb = std::sin(-a);
    for (int y = 0; y < grid.height; ++y) {
        for (int x = 0; x < grid.width; ++x) {
            const double dx = x - center_x, dy = y - center_y;
            out.forward.set(y, x, cf * dx - sf * dy + center_x - x,
                            sf * dx + cf * dy + center_y - y);
            out.backward.set(y, x, cb * dx - sb * dy + center_x - x,
                             sb * dx + cb * dy + center_y - y);
        }
    }
    return out;
}

inline SpecialFlowPair shear_flow(PixelGrid grid, double lambda_a, int sign, bool horizontal) {
    if (std::abs(lambda_a) > 1.0)
        throw std::invalid_argument("shear_flow: |lambda| must be <= 1");
    SpecialFlowPair out{FlowField(grid.width, grid.height), FlowField(grid.width, grid.height)};
    const double l = sign * lambda_a;  // S(s*l) and S(-s*l) are exact inverses
    for (int y = 0; y < grid.height; ++y) {
        for (int x = 0; x < grid.width; ++x) {
            if (horizontal) {
                out.forward.set(y, x, l * y, 0.0);
                out.backward.set(y, x, -l * y, 0.0);
            } else {
                out.forward.set(y, x, 0.0, l * x);
                out.backward.set(y, x, 0.0, -l * x);
            }
        }
    }
    return out;
}

inline SpecialFlowPair special_flow(PixelGrid grid, const AugSpec& spec) {
    switch (spec.kind) {
        case AugKind::FlipH: return flip_flow(grid, true);
        case AugKind::FlipV: return flip_flow(grid, false);
        case AugKind::Rotate: {
            if (spec.cx < 0 || spec.cx > grid.width - 1 || spec.cy < 0 ||
                spec.cy > grid.height - 1)
                throw std::invalid_argument("special_flow: rotation center out of bounds");
            return rotation_flow(grid, spec.theta_a, spec.sign, spec.cx, spec.cy);
        }
        case AugKind::ShearH: return shear_flow(grid, spec.lambda_a, spec.sign, true);
        case AugKind::ShearV: return shear_flow(grid, spec.lambda_a, spec.sign, false);
        default: {
            FlowField zero(grid.width, grid.height);
            return {zero, zero};
        }
    }
}

enum class AugSide { Source, Target };

// Resample A(img) through the inverse map: out(p) = img(p + B_a(p)).
namespace detail {

struct AugmentedImage {
    Image image;
    std::vector<std::uint8_t> valid;
};

inline AugmentedImage resample_through_inverse(const Image& img, const FlowField& backward) {
    BackwardWarpResult r = backward_warp_image(backward, img);
    return {std::move(r.image), std::move(r.valid)};
}

}  // namespace detail

inline SampleTuple apply_lateral_aug(const SampleTuple& tuple, const AugSpec& spec,
                                     AugSide side) {
    if (spec.kind == AugKind::None) {
        SampleTuple out = tuple;
        out.label = AugLabel::None;
        out.meta["aug"] = "none";
        return out;
    }

    const SpecialFlowPair sp = special_flow(tuple.flow.grid(), spec);
    SampleTuple out;
    out.sample_id = tuple.sample_id;
    out.kind = tuple.kind;
    out.modality = tuple.modality;
    out.label = label_of(spec.kind);
    out.meta = tuple.meta;
    out.meta["aug"] = to_string(spec.kind);
    out.meta["aug_side"] = side == AugSide::Target ? "target" : "source";
    out.meta["aug_sign"] = std::to_string(spec.sign);
    if (spec.kind == AugKind::Rotate) {
        out.meta["aug_theta"] = detail::format_double(spec.theta_a);
        out.meta["aug_center_x"] = detail::format_double(spec.cx);
        out.meta["aug_center_y"] = detail::format_double(spec.cy);
    } else if (spec.kind == AugKind::ShearH || spec.kind == AugKind::ShearV) {
        out.meta["aug_lambda"] = detail::format_double(spec.lambda_a);
    }

    if (side == AugSide::Target) {
        const auto aug = detail::resample_through_inverse(tuple.target, sp.backward);
        out.source = tuple.source;
        out.target = aug.image;
        out.flow = compose_flows(tuple.flow, sp.forward);
        out.mask.assign(out.flow.n_pixels(), 0);
        for (int y = 0; y < out.flow.height; ++y) {
            for (int x = 0; x < out.flow.width; ++x) {
                const std::size_t i = out.flow.idx(y, x);
                if (!tuple.mask[i] || !out.flow.valid[i]) continue;
                if (bilinear_mask_valid(aug.valid, out.flow.width, out.flow.height,
                                        x + out.flow.u[i], y + out.flow.v[i]))
                    out.mask[i] = 1;
            }
        }
    } else {
        const auto aug = detail::resample_through_inverse(tuple.source, sp.backward);
        out.source = aug.image;
        out.target = tuple.target;
        out.flow = compose_flows(sp.backward, tuple.flow);
        out.mask.assign(out.flow.n_pixels(), 0);
        for (int y = 0; y < out.flow.height; ++y) {
            for (int x = 0; x < out.flow.width; ++x) {
                const std::size_t i = out.flow.idx(y, x);
                if (!out.flow.valid[i] || !aug.valid[i]) continue;
                // The original source pixel this one came from must be
                // inside the base training mask.
                if (bilinear_mask_valid(tuple.mask, out.flow.width, out.flow.height,
                                        x + sp.backward.u[i], y + sp.backward.v[i]))
                    out.mask[i] = 1;
            }
        }
    }
    return out;
}

struct LateralAugConfig {
    double theta_min = 5.0 * std::numbers::pi / 180.0;
    double theta_max = 25.0 * std::numbers::pi / 180.0;
    double lambda_min = 0.1;
    double lambda_max = 0.4;
    double probability = 0.5;  // chance a generated tuple gets an augmented variant
};

// Draw a non-None spec: kind uniform over the five concrete operations,
// rotation center uniform over the central 50% of the image.
inline AugSpec sample_aug_spec(const LateralAugConfig& cfg, PixelGrid grid, RngStream& rng) {
    AugSpec spec;
    switch (rng.uniform_int(0, 4)) {
        case 0: spec.kind = AugKind::FlipH; break;
        case 1: spec.kind = AugKind::FlipV; break;
        case 2: spec.kind = AugKind::Rotate; break;
        case 3: spec.kind = AugKind::ShearH; break;
        default: spec.kind = AugKind::ShearV; break;
    }
    spec.sign = rng.sign();
    if (spec.kind == AugKind::Rotate) {
        spec.theta_a = rng.uniform(cfg.theta_min, cfg.theta_max);
        spec.cx = rng.uniform(0.25 * (grid.width - 1), 0.75 * (grid.width - 1));
        spec.cy = rng.uniform(0.25 * (grid.height - 1), 0.75 * (grid.height - 1));
    } else if (spec.kind == AugKind::ShearH || spec.kind == AugKind::ShearV) {
        spec.lambda_a = rng.uniform(cfg.lambda_min, cfg.lambda_max);
    }
    return spec;
}

}  // namespace flowgen

#pragma once

// Virtual camera-motion flow: backproject every valid pixel through the
// intrinsics, apply a sampled rigid transform, reproject, and read off the
// displacement. Also assembles the three tuple kinds per pair
// (F_0->1, F_1->2, F_0->2).

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "flowgen/depth_unify.hpp"
#include "flowgen/rng.hpp"
#include "flowgen/sample_tuple.hpp"
#include "flowgen/sampling.hpp"
#include "flowgen/warp.hpp"

namespace flowgen {

struct CameraModel {
    double fx = 0.0, fy = 0.0, cx = 0.0, cy = 0.0;

    void validate(int width, int height) const {
        if (!(fx > 0.0) || !(fy > 0.0))
            throw std::invalid_argument("CameraModel: focal lengths must be positive");
        if (cx < -0.5 * width || cx > 1.5 * width || cy < -0.5 * height || cy > 1.5 * height)
            throw std::invalid_argument("CameraModel: principal point far outside image");
    }
};

// Common pinhole prior when a dataset ships no intrinsics.
inline CameraModel default_intrinsics(int width, int height) {
    CameraModel cam;
    cam.fx = cam.fy = 0.58 * width;
    cam.cx = 0.5 * (width - 1);
    cam.cy = 0.5 * (height - 1);
    return cam;
}

struct RigidMotion {
    Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
    Eigen::Vector3d translation = Eigen::Vector3d::Zero();

    // X-Y-Z intrinsic Euler composition; angles in radians.
    static RigidMotion from_euler(double rx, double ry, double rz,
                                  const Eigen::Vector3d& t = Eigen::Vector3d::Zero()) {
        RigidMotion m;
        m.rotation = (Eigen::AngleAxisd(rz, Eigen::Vector3d::UnitZ()) *
                      Eigen::AngleAxisd(ry, Eigen::Vector3d::UnitY()) *
                      Eigen::AngleAxisd(rx, Eigen::Vector3d::UnitX()))
                         .toRotationMatrix();
        m.translation = t;
        return m;
    }

    RigidMotion inverse() const {
        RigidMotion m;
        m.rotation = rotation.transpose();
        m.translation = -m.rotation * translation;
        return m;
    }

    void validate() const {
        const Eigen::Matrix3d err = rotation * rotation.transpose() - Eigen::Matrix3d::Identity();
        if (err.cwiseAbs().maxCoeff() > 1e-9 || std::abs(rotation.determinant() - 1.0) > 1e-9)
            throw std::invalid_argument("RigidMotion: rotation is not orthonormal");
    }
};

struct MotionSamplingConfig {
    // Per-axis Euler range in radians and translation range as a fraction
    // of the median valid scene depth. Chosen so typical max flow stays
    // well under ~15% of image width.
    double euler_min = -0.03, euler_max = 0.03;
    double trans_frac_min = -0.02, trans_frac_max = 0.02;
};

inline RigidMotion sample_motion(const MotionSamplingConfig& cfg, double median_depth,
                                 RngStream& rng) {
    const double rx = rng.uniform(cfg.euler_min, cfg.euler_max);
    const double ry = rng.uniform(cfg.euler_min, cfg.euler_max);
    const double rz = rng.uniform(cfg.euler_min, cfg.euler_max);
    Eigen::Vector3d t;
    for (int k = 0; k < 3; ++k)
        t[k] = rng.uniform(cfg.trans_frac_min, cfg.trans_frac_max) * median_depth;
    return RigidMotion::from_euler(rx, ry, rz, t);
}

struct EgoFlowResult {
    FlowField flow;
    ScalarField target_depth;  // transformed z per source pixel (camera-2 depth)
};

inline EgoFlowResult egomotion_flow_with_depth(const ScalarField& depth, const CameraModel& cam,
                                               const RigidMotion& motion) {
    cam.validate(depth.width, depth.height);
    motion.validate();

    EgoFlowResult res;
    res.flow = FlowField(depth.width, depth.height, 0.0, 0.0, false);
    res.target_depth = ScalarField(depth.width, depth.height, 0.0, false);

    const Eigen::Matrix3d& R = motion.rotation;
    const Eigen::Vector3d& t = motion.translation;
    std::size_t n_valid = 0, n_behind = 0;
    for (int y = 0; y < depth.height; ++y) {
        for (int x = 0; x < depth.width; ++x) {
            const std::size_t i = depth.idx(y, x);
            if (!depth.valid[i]) continue;
            const double z = depth.values[i];
            if (!(z > 0.0)) continue;
            ++n_valid;
            const Eigen::Vector3d P(z * (x - cam.cx) / cam.fx, z * (y - cam.cy) / cam.fy, z);
            const Eigen::Vector3d Q = R * P + t;
            if (!(Q.z() > 1e-9)) {
                ++n_behind;
                continue;
            }
            const double px = cam.fx * Q.x() / Q.z() + cam.cx;
            const double py = cam.fy * Q.y() / Q.z() + cam.cy;
            res.flow.set(y, x, px - x, py - y);
            res.target_depth.values[i] = Q.z();
            res.target_depth.valid[i] = 1;
        }
    }
    if (n_valid == 0 || n_behind == n_valid)
        throw std::runtime_error("egomotion_flow: all points behind camera");
    return res;
}

// F_1->2 = project(T * backproject(p, Z)) - p, per valid pixel.
inline FlowField egomotion_flow(const ScalarField& depth, const CameraModel& cam,
                                const RigidMotion& motion) {
    return egomotion_flow_with_depth(depth, cam, motion).flow;
}

namespace detail {

inline double median_valid(const ScalarField& f) {
    std::vector<double> v;
    v.reserve(f.values.size());
    for (std::size_t i = 0; i < f.values.size(); ++i)
        if (f.valid[i]) v.push_back(f.values[i]);
    if (v.empty()) return 0.0;
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + mid, v.end());
    return v[mid];
}

}  // namespace detail

// Runs the general-flow chain on one horizontal pair: samples a motion,
// derives F_1->2 from the pair's target depth, splats the novel view, and
// emits (I_0,I_1,F_0->1), (I_1,I~_2,F_1->2), (I_0,I~_2,F_0->2).
inline std::vector<SampleTuple> synth_general_tuples(const SampleTuple& pair,
                                                     const ScalarField& depth1,
                                                     const CameraModel& cam,
                                                     const MotionSamplingConfig& cfg,
                                                     RngStream& rng) {
    if (!same_size(pair.target, depth1))
        throw std::invalid_argument("synth_general_tuples: depth does not match pair target");

    const double med = detail::median_valid(depth1);
    if (!(med > 0.0)) throw std::runtime_error("synth_general_tuples: no valid depth");
    const RigidMotion motion = sample_motion(cfg, med, rng);

    EgoFlowResult ego = egomotion_flow_with_depth(depth1, cam, motion);
    const WarpResult view2 = forward_splat(pair.target, ego.target_depth, ego.flow);

    std::vector<SampleTuple> out;
    out.reserve(3);
    out.push_back(pair);  // (I_0, I_1, F_0->1)

    SampleTuple t12;
    t12.source = pair.target;
    t12.target = view2.image;
    t12.flow = ego.flow;
    t12.mask = visibility_mask(ego.flow, ego.target_depth, view2.depth);
    t12.sample_id = pair.sample_id;
    t12.kind = "f12";
    t12.modality = pair.modality;
    out.push_back(std::move(t12));

    SampleTuple t02;
    t02.source = pair.source;
    t02.target = view2.image;
    t02.flow = compose_flows(pair.flow, ego.flow);
    // Expected camera-2 depth per I_0 pixel: read the transformed depth at
    // the pixel's landing point in I_1, then verify against the splatted Z~_2.
    ScalarField expected(t02.flow.width, t02.flow.height, 0.0, false);
    for (int y = 0; y < t02.flow.height; ++y) {
        for (int x = 0; x < t02.flow.width; ++x) {
            const std::size_t i = t02.flow.idx(y, x);
            if (!pair.flow.valid[i] || !pair.mask[i]) continue;
            const ScalarSample s = bilinear_sample(ego.target_depth, x + pair.flow.u[i],
                                                   y + pair.flow.v[i]);
            if (!s.valid) continue;
            expected.values[i] = s.value;
            expected.valid[i] = 1;
        }
    }
    t02.mask = visibility_mask(t02.flow, expected, view2.depth);
    t02.sample_id = pair.sample_id;
    t02.kind = "f02";
    t02.modality = pair.modality;
    out.push_back(std::move(t02));

    // Propagate provenance shared by the chain.
    for (auto& t : out) {
        t.meta.insert(pair.meta.begin(), pair.meta.end());
        t.meta["median_depth"] = detail::format_double(med);
    }
    return out;
}

}  // namespace flowgen

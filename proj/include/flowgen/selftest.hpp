#pragma once

// Analytic invariant suite behind the `selftest` CLI subcommand: quick
// closed-form checks that need no input data.

#include <cstdio>
#include <filesystem>
#include <random>

#include "flowgen/classifier.hpp"
#include "flowgen/ego_motion.hpp"
#include "flowgen/flow_io.hpp"
#include "flowgen/lateral_aug.hpp"
#include "flowgen/metrics.hpp"
#include "flowgen/sampling.hpp"

namespace flowgen {

namespace detail {

inline double max_abs_flow(const FlowField& f, bool valid_only = true) {
    double m = 0.0;
    for (std::size_t i = 0; i < f.u.size(); ++i) {
        if (valid_only && !f.valid[i]) continue;
        m = std::max({m, std::abs(f.u[i]), std::abs(f.v[i])});
    }
    return m;
}

}  // namespace detail

inline int run_selftest() {
    int failures = 0;
    const auto check = [&](const char* name, bool ok) {
        std::printf("[%s] %s\n", ok ? " ok " : "FAIL", name);
        if (!ok) ++failures;
    };
    RngStream rng(12345);

    {  // bilinear sampling reproduces affine fields exactly
        ScalarField f(17, 13);
        for (int y = 0; y < f.height; ++y)
            for (int x = 0; x < f.width; ++x) f.at(y, x) = 0.7 * x - 1.3 * y + 2.5;
        double err = 0.0;
        for (int k = 0; k < 500; ++k) {
            const double x = rng.uniform(0.0, f.width - 1.0);
            const double y = rng.uniform(0.0, f.height - 1.0);
            const auto s = bilinear_sample(f, x, y);
            err = std::max(err, std::abs(s.value - (0.7 * x - 1.3 * y + 2.5)));
        }
        check("bilinear sampling exact on affine fields", err < 1e-6);
    }
    {  // composing with zero flow is the identity
        FlowField zero(9, 9);
        FlowField f(9, 9, 1.25, -0.5);
        const FlowField c = compose_flows(zero, f);
        bool ok = true;
        for (std::size_t i = 0; i < c.u.size(); ++i)
            ok = ok && c.valid[i] && c.u[i] == f.u[i] && c.v[i] == f.v[i];
        check("compose_flows(0, f) == f", ok);
    }
    {  // flip applied twice returns every pixel
        const auto fp = flip_flow({11, 7}, true);
        bool ok = true;
        for (int y = 0; y < 7; ++y)
            for (int x = 0; x < 11; ++x) {
                const double x1 = x + fp.forward.u[fp.forward.idx(y, x)];
                const double x2 = x1 + fp.forward.u[fp.forward.idx(y, static_cast<int>(x1))];
                ok = ok && x2 == x;
            }
        check("flip involution exact", ok);
    }
    {  // rotation and shear cancel against their backward flows
        const auto rot = rotation_flow({32, 32}, 0.3, 1, 15.5, 15.5);
        const auto sh = shear_flow({32, 32}, 0.25, -1, true);
        const double e1 = detail::max_abs_flow(compose_flows(rot.forward, rot.backward));
        const double e2 = detail::max_abs_flow(compose_flows(sh.forward, sh.backward));
        check("rotation/shear forward-backward cancellation", e1 < 1e-3 && e2 < 1e-3);
    }
    {  // identity ego-motion gives zero flow
        ScalarField z(24, 18, 5.0);
        const FlowField f = egomotion_flow(z, default_intrinsics(24, 18), RigidMotion{});
        check("identity ego-motion flow is zero", detail::max_abs_flow(f) < 1e-6);
    }
    {  // codec round trips
        namespace fs = std::filesystem;
        const fs::path dir = fs::temp_directory_path() / "flowgen_selftest";
        fs::create_directories(dir);
        FlowField f(6, 4);
        for (std::size_t i = 0; i < f.u.size(); ++i) {
            f.u[i] = 0.25 * static_cast<double>(i) - 3.0;
            f.v[i] = 1.5 - 0.125 * static_cast<double>(i);
        }
        f.valid[5] = 0;
        f.u[5] = f.v[5] = 0.0;
        write_flo((dir / "t.flo").string(), f);
        const FlowField g = read_flo((dir / "t.flo").string());
        bool ok = g.width == f.width && g.height == f.height;
        for (std::size_t i = 0; ok && i < f.u.size(); ++i) {
            ok = g.valid[i] == f.valid[i];
            if (ok && f.valid[i])
                ok = g.u[i] == static_cast<float>(f.u[i]) && g.v[i] == static_cast<float>(f.v[i]);
        }
        write_kitti_png((dir / "t.png").string(), f);
        const FlowField k = read_kitti_png((dir / "t.png").string());
        for (std::size_t i = 0; ok && i < f.u.size(); ++i) {
            ok = k.valid[i] == f.valid[i];
            if (ok && f.valid[i])
                ok = std::abs(k.u[i] - f.u[i]) <= 1.0 / 128.0 &&
                     std::abs(k.v[i] - f.v[i]) <= 1.0 / 128.0;
        }
        fs::remove_all(dir);
        check("flo and KITTI PNG round trips", ok);
    }
    {  // metrics: the 3-4-5 case
        FlowField pred(8, 8, 3.0, 4.0), gt(8, 8);
        check("EPE of (3,4) error is 5", std::abs(epe(pred, gt) - 5.0) < 1e-12);
    }
    {  // classifier recognizes a pure flip
        const auto fp = flip_flow({64, 48}, true);
        const ClassPosterior p = classify(fp.forward);
        check("classifier identifies pure flip",
              p.predicted == AugLabel::Flip && p.posterior[0] > 0.9);
    }

    std::printf(failures == 0 ? "selftest: all checks passed\n"
                              : "selftest: %d check(s) failed\n",
                failures);
    return failures;
}

}  // namespace flowgen

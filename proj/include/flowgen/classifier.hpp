#pragma once

// Four-way augmentation-type classifier over flow appearance, plus the
// training losses L_P / L_C / L. The decision rule scores the robust flow
// Jacobian against each augmentation family: a flip leaves one diagonal
// entry near -2, a rotation leaves antisymmetric off-diagonals, a shear a
// single off-diagonal, and an un-augmented flow a near-zero Jacobian.
// Aggregation is by per-entry median, so the smooth base-flow component of
// a composed flow only perturbs the signature instead of drowning it.

#include <algorithm>
#include <array>
#include <cmath>

#include "flowgen/sample_tuple.hpp"
#include "flowgen/types.hpp"

namespace flowgen {

struct FlowFeatures {
    double jac[2][2] = {{0, 0}, {0, 0}};      // median [du/dx du/dy; dv/dx dv/dy]
    double jac_mad[2][2] = {{0, 0}, {0, 0}};  // median absolute deviation per entry
    double mean_mag = 0.0;
    std::size_t n_jac_samples = 0;
};

namespace detail {

inline double median_inplace(std::vector<double>& v) {
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + mid, v.end());
    return v[mid];
}

}  // namespace detail

inline FlowFeatures extract_features(const FlowField& flow) {
    if (flow.count_valid() < 100)
        throw std::runtime_error("extract_features: too few valid pixels");

    std::vector<double> dudx, dudy, dvdx, dvdy;
    for (int y = 1; y + 1 < flow.height; ++y) {
        for (int x = 1; x + 1 < flow.width; ++x) {
            const std::size_t i = flow.idx(y, x);
            const std::size_t l = flow.idx(y, x - 1), r = flow.idx(y, x + 1);
            const std::size_t t = flow.idx(y - 1, x), b = flow.idx(y + 1, x);
            if (!flow.valid[i] || !flow.valid[l] || !flow.valid[r] || !flow.valid[t] ||
                !flow.valid[b])
                continue;
            dudx.push_back(0.5 * (flow.u[r] - flow.u[l]));
            dudy.push_back(0.5 * (flow.u[b] - flow.u[t]));
            dvdx.push_back(0.5 * (flow.v[r] - flow.v[l]));
            dvdy.push_back(0.5 * (flow.v[b] - flow.v[t]));
        }
    }
    if (dudx.size() < 25)
        throw std::runtime_error("extract_features: too few valid pixels");

    FlowFeatures f;
    f.n_jac_samples = dudx.size();
    std::vector<double>* cols[4] = {&dudx, &dudy, &dvdx, &dvdy};
    double* out[4] = {&f.jac[0][0], &f.jac[0][1], &f.jac[1][0], &f.jac[1][1]};
    double* mad[4] = {&f.jac_mad[0][0], &f.jac_mad[0][1], &f.jac_mad[1][0], &f.jac_mad[1][1]};
    for (int k = 0; k < 4; ++k) {
        const double med = detail::median_inplace(*cols[k]);
        *out[k] = med;
        std::vector<double> dev(cols[k]->size());
        for (std::size_t j = 0; j < dev.size(); ++j) dev[j] = std::abs((*cols[k])[j] - med);
        *mad[k] = detail::median_inplace(dev);
    }

    double mag = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < flow.valid.size(); ++i) {
        if (!flow.valid[i]) continue;
        mag += std::hypot(flow.u[i], flow.v[i]);
        ++n;
    }
    f.mean_mag = mag / n;
    return f;
}

struct ClassPosterior {
    std::array<double, 4> logits{};     // order: Flip, Rotate, Shear, None
    std::array<double, 4> posterior{};  // softmax of logits
    AugLabel predicted = AugLabel::None;
};

namespace detail {

// Residual of the measured Jacobian against each family's best fit.
inline std::array<double, 4> class_residuals(const FlowFeatures& f) {
    const double j00 = f.jac[0][0], j01 = f.jac[0][1];
    const double j10 = f.jac[1][0], j11 = f.jac[1][1];

    const double r_flip = std::min(std::abs(j00 + 2.0) + std::abs(j01) + std::abs(j10) + std::abs(j11),
                                   std::abs(j00) + std::abs(j01) + std::abs(j10) + std::abs(j11 + 2.0));

    // Rotation: J = R(a) - I, so off-diagonals are -/+ sin(a) and both
    // diagonals equal cos(a) - 1.
    const double asym = 0.5 * (j10 - j01);
    const double sym = 0.5 * (j00 + j11);
    const double s = std::min(std::abs(asym), 1.0);
    const double expected_diag = std::sqrt(1.0 - s * s) - 1.0;
    double r_rot = std::abs(j01 + j10) + std::abs(j00 - j11) + 2.0 * std::abs(sym - expected_diag);
    constexpr double kMinSignal = 0.05;  // below this an off-diagonal is noise
    if (std::abs(asym) < kMinSignal) r_rot += 2.0 * (kMinSignal - std::abs(asym));

    double r_shear = std::min(std::abs(j00) + std::abs(j10) + std::abs(j11),   // horizontal
                              std::abs(j00) + std::abs(j01) + std::abs(j11));  // vertical
    const double lam = std::max(std::abs(j01), std::abs(j10));
    if (lam < kMinSignal) r_shear += 2.0 * (kMinSignal - lam);

    const double r_none = std::abs(j00) + std::abs(j01) + std::abs(j10) + std::abs(j11);

    return {r_flip, r_rot, r_shear, r_none};
}

}  // namespace detail

inline ClassPosterior posterior_from_features(const FlowFeatures& f) {
    constexpr double kGain = 12.0;
    const auto res = detail::class_residuals(f);

    ClassPosterior out;
    double max_logit = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < 4; ++k) {
        out.logits[k] = -kGain * res[k];
        max_logit = std::max(max_logit, out.logits[k]);
    }
    double sum = 0.0;
    for (int k = 0; k < 4; ++k) {
        out.posterior[k] = std::exp(out.logits[k] - max_logit);
        sum += out.posterior[k];
    }
    int best = 0;
    for (int k = 0; k < 4; ++k) {
        out.posterior[k] /= sum;
        if (out.posterior[k] > out.posterior[best]) best = k;
    }
    out.predicted = static_cast<AugLabel>(best);
    return out;
}

inline ClassPosterior classify(const FlowField& flow) {
    return posterior_from_features(extract_features(flow));
}

// L_P: mean L1 error over mutually valid pixels, both components.
inline double loss_lp(const FlowField& pred, const FlowField& gt) {
    if (!same_size(pred, gt)) throw std::invalid_argument("loss_lp: dimension mismatch");
    double acc = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < pred.valid.size(); ++i) {
        if (!pred.valid[i] || !gt.valid[i]) continue;
        acc += std::abs(pred.u[i] - gt.u[i]) + std::abs(pred.v[i] - gt.v[i]);
        ++n;
    }
    if (n == 0) throw std::runtime_error("loss_lp: no mutually valid pixels");
    return acc / (2.0 * n);
}

// L_C: cross entropy of the posterior against the recorded label.
inline double loss_lc(const ClassPosterior& posterior, AugLabel label) {
    const double p = std::max(posterior.posterior[static_cast<int>(label)], 1e-12);
    return -std::log(p);
}

// L = L_P + lambda_C * L_C.
inline double loss_total(const FlowField& pred, const FlowField& gt,
                         const ClassPosterior& posterior, AugLabel label, double lambda_c) {
    return loss_lp(pred, gt) + lambda_c * loss_lc(posterior, label);
}

inline constexpr double kDefaultLambdaC = 0.1;

}  // namespace flowgen

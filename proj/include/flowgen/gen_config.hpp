#pragma once

// Generation config file: JSON with a fixed schema, unknown keys rejected.
// Every field has a default, so {} is a valid config.

#include <cstdint>
#include <fstream>
#include <string>

#include <json.hpp>

#include "flowgen/depth_unify.hpp"
#include "flowgen/ego_motion.hpp"
#include "flowgen/lateral_aug.hpp"

namespace flowgen {

enum class FlowFormat { Flo, KittiPng };

inline const char* to_string(FlowFormat f) { return f == FlowFormat::Flo ? "flo" : "kitti-png"; }

inline FlowFormat flow_format_from_string(const std::string& s) {
    if (s == "flo") return FlowFormat::Flo;
    if (s == "kitti-png" || s == "kitti") return FlowFormat::KittiPng;
    throw std::invalid_argument("unknown flow format: " + s);
}

struct GenConfig {
    std::uint64_t global_seed = 0;
    // How many tuples of each kind to emit per manifest entry. Kind k of
    // variant chain j is emitted when j < count_k.
    int count_f01 = 1;
    int count_f12 = 1;
    int count_f02 = 1;
    VirtualStereoConfig virtual_stereo;
    MotionSamplingConfig ego_motion;
    LateralAugConfig lateral_aug;
    FlowFormat output_format = FlowFormat::Flo;
    std::string output_dir;
    int workers = 1;

    int max_chains() const { return std::max({count_f01, count_f12, count_f02}); }
};

namespace detail {

using json = nlohmann::json;

inline void reject_unknown_keys(const json& obj, std::initializer_list<const char*> allowed,
                                const std::string& where) {
    for (const auto& [key, _] : obj.items()) {
        bool ok = false;
        for (const char* a : allowed)
            if (key == a) ok = true;
        if (!ok) throw std::runtime_error("config: unknown key '" + key + "' in " + where);
    }
}

inline void read_range(const json& obj, const char* key, double& lo, double& hi) {
    if (!obj.contains(key)) return;
    const auto& r = obj.at(key);
    if (!r.is_array() || r.size() != 2)
        throw std::runtime_error(std::string("config: '") + key + "' must be [min, max]");
    lo = r[0].get<double>();
    hi = r[1].get<double>();
    if (hi < lo) throw std::runtime_error(std::string("config: '") + key + "' has max < min");
}

}  // namespace detail

inline GenConfig parse_gen_config(const nlohmann::json& j) {
    using detail::json;
    GenConfig cfg;
    detail::reject_unknown_keys(j,
                                {"global_seed", "counts", "virtual_stereo", "ego_motion",
                                 "lateral_aug", "output_format", "output_dir", "workers"},
                                "config root");

    if (j.contains("global_seed")) cfg.global_seed = j.at("global_seed").get<std::uint64_t>();
    if (j.contains("counts")) {
        const json& c = j.at("counts");
        detail::reject_unknown_keys(c, {"f01", "f12", "f02"}, "counts");
        if (c.contains("f01")) cfg.count_f01 = c.at("f01").get<int>();
        if (c.contains("f12")) cfg.count_f12 = c.at("f12").get<int>();
        if (c.contains("f02")) cfg.count_f02 = c.at("f02").get<int>();
        if (cfg.count_f01 < 0 || cfg.count_f12 < 0 || cfg.count_f02 < 0)
            throw std::runtime_error("config: counts must be >= 0");
    }
    if (j.contains("virtual_stereo")) {
        const json& v = j.at("virtual_stereo");
        detail::reject_unknown_keys(v, {"disp_frac_range", "bf_stereo_constant"},
                                    "virtual_stereo");
        detail::read_range(v, "disp_frac_range", cfg.virtual_stereo.disp_frac_min,
                           cfg.virtual_stereo.disp_frac_max);
        if (!(cfg.virtual_stereo.disp_frac_min > 0.0))
            throw std::runtime_error("config: disp_frac_range min must be > 0");
        if (v.contains("bf_stereo_constant")) {
            cfg.virtual_stereo.bf_stereo_constant = v.at("bf_stereo_constant").get<double>();
            if (!(cfg.virtual_stereo.bf_stereo_constant > 0.0))
                throw std::runtime_error("config: bf_stereo_constant must be > 0");
        }
    }
    if (j.contains("ego_motion")) {
        const json& e = j.at("ego_motion");
        detail::reject_unknown_keys(e, {"euler_range_rad", "translation_frac_range"},
                                    "ego_motion");
        detail::read_range(e, "euler_range_rad", cfg.ego_motion.euler_min,
                           cfg.ego_motion.euler_max);
        detail::read_range(e, "translation_frac_range", cfg.ego_motion.trans_frac_min,
                           cfg.ego_motion.trans_frac_max);
    }
    if (j.contains("lateral_aug")) {
        const json& a = j.at("lateral_aug");
        detail::reject_unknown_keys(a, {"theta_range_rad", "lambda_range", "probability"},
                                    "lateral_aug");
        detail::read_range(a, "theta_range_rad", cfg.lateral_aug.theta_min,
                           cfg.lateral_aug.theta_max);
        detail::read_range(a, "lambda_range", cfg.lateral_aug.lambda_min,
                           cfg.lateral_aug.lambda_max);
        if (a.contains("probability")) {
            cfg.lateral_aug.probability = a.at("probability").get<double>();
            if (cfg.lateral_aug.probability < 0.0 || cfg.lateral_aug.probability > 1.0)
                throw std::runtime_error("config: probability must be in [0,1]");
        }
    }
    if (j.contains("output_format"))
        cfg.output_format = flow_format_from_string(j.at("output_format").get<std::string>());
    if (j.contains("output_dir")) cfg.output_dir = j.at("output_dir").get<std::string>();
    if (j.contains("workers")) {
        cfg.workers = j.at("workers").get<int>();
        if (cfg.workers < 1) throw std::runtime_error("config: workers must be >= 1");
    }
    return cfg;
}

inline GenConfig load_gen_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_gen_config: cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw std::runtime_error("load_gen_config: " + std::string(e.what()));
    }
    return parse_gen_config(j);
}

}  // namespace flowgen

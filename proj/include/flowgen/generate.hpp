#pragma once

// Deterministic generation driver. Entries are processed by a bounded
// worker pool; every random draw comes from a stream keyed by
// (global_seed, sample_id, stage), and the report is assembled in manifest
// order, so the output tree is byte-identical for any worker count.

#include <atomic>
#include <filesystem>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include "flowgen/depth_unify.hpp"
#include "flowgen/ego_motion.hpp"
#include "flowgen/gen_config.hpp"
#include "flowgen/lateral_aug.hpp"
#include "flowgen/manifest.hpp"
#include "flowgen/rng.hpp"
#include "flowgen/tuple_io.hpp"

namespace flowgen {

struct GenReport {
    std::size_t n_entries = 0;
    std::size_t n_ok = 0;
    std::size_t n_skipped = 0;
    std::map<std::string, std::size_t> tuples_per_kind;  // e.g. "mono-f02", "stereo-f01-aug"
    std::map<std::string, double> coverage_per_kind;     // mean mask coverage
    std::vector<std::string> events;                     // clamp/skip notes, manifest order
    std::size_t n_tuples = 0;
    double mean_mask_coverage = 0.0;

    bool all_failed() const { return n_entries > 0 && n_ok == 0; }

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["n_entries"] = n_entries;
        j["n_ok"] = n_ok;
        j["n_skipped"] = n_skipped;
        j["n_tuples"] = n_tuples;
        j["mean_mask_coverage"] = mean_mask_coverage;
        j["tuples_per_kind"] = tuples_per_kind;
        j["coverage_per_kind"] = coverage_per_kind;
        j["events"] = events;
        return j;
    }
};

namespace detail {

struct EntryOutcome {
    bool ok = false;
    std::vector<std::string> events;
    std::vector<std::pair<std::string, double>> tuples;  // (kind tag, coverage)
};

inline ScalarField load_scalar_input(const std::filesystem::path& path, double scale) {
    if (path.extension() == ".pfm") {
        ScalarField f = read_pfm(path.string());
        if (scale != 1.0)
            for (std::size_t i = 0; i < f.values.size(); ++i) f.values[i] /= scale;
        return f;
    }
    return read_depth_png(path.string(), scale);
}

inline int count_for_kind(const GenConfig& cfg, const std::string& kind) {
    if (kind == "f01") return cfg.count_f01;
    if (kind == "f12") return cfg.count_f12;
    return cfg.count_f02;
}

inline EntryOutcome process_entry(const ManifestEntry& entry, const GenConfig& cfg,
                                  const std::filesystem::path& out_dir) {
    EntryOutcome res;
    try {
        for (const auto& p : {entry.image, entry.depth, entry.left, entry.right, entry.disp})
            if (!p.empty() && !std::filesystem::exists(p))
                throw std::runtime_error("missing file " + p.string());

        const bool mono = entry.modality == ManifestEntry::Modality::Mono;
        Image image, right;
        ScalarField raw;
        if (mono) {
            image = read_image(entry.image.string());
            raw = load_scalar_input(entry.depth, entry.depth_scale);
        } else {
            image = read_image(entry.left.string());
            right = read_image(entry.right.string());
            raw = load_scalar_input(entry.disp, entry.depth_scale);
        }

        const CameraModel cam =
            entry.intrinsics ? *entry.intrinsics : default_intrinsics(image.width, image.height);

        for (int chain = 0; chain < cfg.max_chains(); ++chain) {
            const std::string stage = "v" + std::to_string(chain);

            SampleTuple pair;
            ScalarField depth1;
            if (mono) {
                RngStream rng =
                    RngStream::derive(cfg.global_seed, entry.sample_id, stage + "/stereo");
                VirtualStereoResult vs =
                    synth_virtual_stereo(image, raw, cfg.virtual_stereo, rng);
                if (vs.s_c_clamped)
                    res.events.push_back(entry.sample_id + " " + stage + ": s_c clamped");
                if (vs.nonpositive_depth_px > 0)
                    res.events.push_back(entry.sample_id + " " + stage + ": " +
                                         std::to_string(vs.nonpositive_depth_px) +
                                         " nonpositive depth px dropped");
                pair = std::move(vs.tuple);
                depth1 = std::move(vs.target_depth);
            } else {
                StereoIngestResult st =
                    ingest_stereo(image, right, raw, cfg.virtual_stereo.bf_stereo_constant);
                pair = std::move(st.tuple);
                depth1 = std::move(st.target_depth);
            }
            pair.sample_id = entry.sample_id;

            RngStream rng_motion =
                RngStream::derive(cfg.global_seed, entry.sample_id, stage + "/motion");
            std::vector<SampleTuple> tuples =
                synth_general_tuples(pair, depth1, cam, cfg.ego_motion, rng_motion);

            for (SampleTuple& t : tuples) {
                if (chain >= count_for_kind(cfg, t.kind)) continue;
                t.sample_id = entry.sample_id;
                save_tuple(out_dir, tuple_stem(t, chain), t, cfg.output_format);
                res.tuples.emplace_back(t.modality + "-" + t.kind, t.mask_coverage());

                RngStream rng_aug = RngStream::derive(cfg.global_seed, entry.sample_id,
                                                      stage + "/aug/" + t.kind);
                if (!rng_aug.bernoulli(cfg.lateral_aug.probability)) continue;
                const AugSpec spec = sample_aug_spec(cfg.lateral_aug, t.flow.grid(), rng_aug);
                const AugSide side = rng_aug.bernoulli(0.5) ? AugSide::Target : AugSide::Source;
                const SampleTuple aug = apply_lateral_aug(t, spec, side);
                save_tuple(out_dir, tuple_stem(aug, chain), aug, cfg.output_format);
                res.tuples.emplace_back(aug.modality + "-" + aug.kind + "-aug",
                                        aug.mask_coverage());
            }
        }
        res.ok = true;
    } catch (const std::exception& e) {
        res.ok = false;
        res.events.push_back(entry.sample_id + ": skipped (" + std::string(e.what()) + ")");
        res.tuples.clear();
    }
    return res;
}

}  // namespace detail

inline GenReport run_generation(const DatasetManifest& manifest, const GenConfig& cfg) {
    namespace fs = std::filesystem;
    if (cfg.output_dir.empty()) throw std::invalid_argument("run_generation: no output dir");
    fs::create_directories(cfg.output_dir);

    const std::size_t n = manifest.entries.size();
    std::vector<detail::EntryOutcome> outcomes(n);
    std::atomic<std::size_t> next{0};
    const int n_workers = std::max(1, std::min<int>(cfg.workers, static_cast<int>(std::max<std::size_t>(n, 1))));

    const auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            outcomes[i] = detail::process_entry(manifest.entries[i], cfg, cfg.output_dir);
        }
    };
    if (n_workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_workers);
        for (int k = 0; k < n_workers; ++k) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    GenReport report;
    report.n_entries = n;
    std::map<std::string, std::pair<double, std::size_t>> cov;
    for (const auto& o : outcomes) {
        o.ok ? ++report.n_ok : ++report.n_skipped;
        report.events.insert(report.events.end(), o.events.begin(), o.events.end());
        for (const auto& [tag, coverage] : o.tuples) {
            ++report.tuples_per_kind[tag];
            auto& c = cov[tag];
            c.first += coverage;
            c.second += 1;
            report.mean_mask_coverage += coverage;
            ++report.n_tuples;
        }
    }
    if (report.n_tuples > 0) report.mean_mask_coverage /= report.n_tuples;
    for (const auto& [tag, c] : cov) report.coverage_per_kind[tag] = c.first / c.second;

    detail::atomic_write(fs::path(cfg.output_dir) / "report.json", [&](const std::string& p) {
        std::ofstream out(p);
        if (!out) throw std::runtime_error("run_generation: cannot write report " + p);
        out << report.to_json().dump(2) << "\n";
    });
    return report;
}

// Lateral augmentation over an existing generated tree: every tuple found
// in `in_dir` is re-emitted to `out_dir`, augmented with the configured
// probability (label "none" otherwise).
inline GenReport run_augment(const std::filesystem::path& in_dir,
                             const std::filesystem::path& out_dir, const GenConfig& cfg) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(in_dir))
        throw std::runtime_error("run_augment: not a directory: " + in_dir.string());
    fs::create_directories(out_dir);

    std::vector<fs::path> metas;
    for (const auto& e : fs::directory_iterator(in_dir)) {
        const std::string name = e.path().filename().string();
        if (name.size() > 12 && name.ends_with("__meta.json")) metas.push_back(e.path());
    }
    std::sort(metas.begin(), metas.end());

    GenReport report;
    report.n_entries = metas.size();
    for (const auto& meta_path : metas) {
        const std::string stem = meta_path.filename().string().substr(
            0, meta_path.filename().string().size() - std::string("__meta.json").size());
        try {
            SampleTuple t = load_tuple(meta_path);
            RngStream rng = RngStream::derive(cfg.global_seed, stem, "augment");
            std::string out_stem = stem;
            if (rng.bernoulli(cfg.lateral_aug.probability)) {
                const AugSpec spec = sample_aug_spec(cfg.lateral_aug, t.flow.grid(), rng);
                const AugSide side = rng.bernoulli(0.5) ? AugSide::Target : AugSide::Source;
                t = apply_lateral_aug(t, spec, side);
                out_stem += "__aug";
            } else {
                t.label = AugLabel::None;
                t.meta["aug"] = "none";
            }
            save_tuple(out_dir, out_stem, t, cfg.output_format);
            ++report.n_ok;
            const std::string tag = t.modality + "-" + t.kind +
                                    (t.label != AugLabel::None ? "-aug" : "");
            ++report.tuples_per_kind[tag];
            report.mean_mask_coverage += t.mask_coverage();
            ++report.n_tuples;
        } catch (const std::exception& e) {
            ++report.n_skipped;
            report.events.push_back(stem + ": skipped (" + std::string(e.what()) + ")");
        }
    }
    if (report.n_tuples > 0) report.mean_mask_coverage /= report.n_tuples;

    detail::atomic_write(out_dir / "report.json", [&](const std::string& p) {
        std::ofstream out(p);
        if (!out) throw std::runtime_error("run_augment: cannot write report " + p);
        out << report.to_json().dump(2) << "\n";
    });
    return report;
}

}  // namespace flowgen

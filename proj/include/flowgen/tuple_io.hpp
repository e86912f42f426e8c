#pragma once

// On-disk layout of a sample tuple. Each tuple is a group of files sharing
// a stem:
//   <stem>__src.png   <stem>__tgt.png   <stem>__flow.flo|.png
//   <stem>__mask.png  <stem>__meta.json
// Writes go through a temp file + rename so a crashed run never leaves a
// half-written tuple behind.

#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "flowgen/flow_io.hpp"
#include "flowgen/gen_config.hpp"
#include "flowgen/image_io.hpp"
#include "flowgen/sample_tuple.hpp"

namespace flowgen {

namespace detail {

template <typename WriteFn>
void atomic_write(const std::filesystem::path& path, WriteFn&& write) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    write(tmp.string());
    std::filesystem::rename(tmp, path);
}

}  // namespace detail

inline std::string tuple_stem(const SampleTuple& t, int variant) {
    std::string stem = t.sample_id + "__v" + std::to_string(variant) + "__" + t.modality + "-" +
                       t.kind;
    if (t.label != AugLabel::None || t.meta.count("aug_side")) stem += "__aug";
    return stem;
}

inline void save_tuple(const std::filesystem::path& dir, const std::string& stem,
                       const SampleTuple& t, FlowFormat format) {
    namespace fs = std::filesystem;
    const auto base = dir / stem;

    detail::atomic_write(base.string() + "__src.png",
                         [&](const std::string& p) { write_image(p, t.source); });
    detail::atomic_write(base.string() + "__tgt.png",
                         [&](const std::string& p) { write_image(p, t.target); });
    detail::atomic_write(base.string() + "__mask.png", [&](const std::string& p) {
        write_mask_png(p, t.mask, t.flow.width, t.flow.height);
    });
    if (format == FlowFormat::Flo)
        detail::atomic_write(base.string() + "__flow.flo",
                             [&](const std::string& p) { write_flo(p, t.flow); });
    else
        detail::atomic_write(base.string() + "__flow.png",
                             [&](const std::string& p) { write_kitti_png(p, t.flow); });

    nlohmann::json meta;
    meta["sample_id"] = t.sample_id;
    meta["kind"] = t.kind;
    meta["modality"] = t.modality;
    meta["aug_label"] = to_string(t.label);
    meta["flow_format"] = to_string(format);
    meta["width"] = t.flow.width;
    meta["height"] = t.flow.height;
    meta["mask_coverage"] = t.mask_coverage();
    nlohmann::json extra;
    for (const auto& [k, v] : t.meta) extra[k] = v;
    meta["params"] = std::move(extra);
    detail::atomic_write(base.string() + "__meta.json", [&](const std::string& p) {
        std::ofstream out(p);
        if (!out) throw std::runtime_error("save_tuple: cannot open " + p);
        out << meta.dump(2) << "\n";
    });
}

inline SampleTuple load_tuple(const std::filesystem::path& meta_path) {
    std::ifstream in(meta_path);
    if (!in) throw std::runtime_error("load_tuple: cannot open " + meta_path.string());
    nlohmann::json meta;
    in >> meta;

    const std::string base = meta_path.string().substr(0, meta_path.string().size() -
                                                              std::string("__meta.json").size());
    SampleTuple t;
    t.sample_id = meta.at("sample_id").get<std::string>();
    t.kind = meta.at("kind").get<std::string>();
    t.modality = meta.at("modality").get<std::string>();
    t.label = aug_label_from_string(meta.at("aug_label").get<std::string>());
    t.source = read_image(base + "__src.png");
    t.target = read_image(base + "__tgt.png");
    const std::string fmt = meta.at("flow_format").get<std::string>();
    t.flow = fmt == "flo" ? read_flo(base + "__flow.flo") : read_kitti_png(base + "__flow.png");
    t.mask = read_mask_png(base + "__mask.png");
    if (meta.contains("params"))
        for (const auto& [k, v] : meta.at("params").items())
            t.meta[k] = v.get<std::string>();
    return t;
}

}  // namespace flowgen

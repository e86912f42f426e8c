#pragma once

// Dataset manifests: line-oriented key=value records, one sample per line,
// '#' starts a comment. Paths are resolved relative to the manifest file.
//
//   sample_id=scene01 modality=mono image=i.png depth=d.png depth_scale=256
//   sample_id=pair07 modality=stereo left=l.png right=r.png disp=d.png depth_scale=256
//
// Optional per-sample intrinsics: fx= fy= cx= cy= (all four or none).

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "flowgen/ego_motion.hpp"

namespace flowgen {

struct ManifestEntry {
    enum class Modality { Mono, Stereo };

    std::string sample_id;
    Modality modality = Modality::Mono;
    std::filesystem::path image, depth;        // mono
    std::filesystem::path left, right, disp;   // stereo
    double depth_scale = 1.0;                  // raw units -> meters or pixels
    std::optional<CameraModel> intrinsics;
};

struct DatasetManifest {
    std::vector<ManifestEntry> entries;
    std::filesystem::path base_dir;
};

inline DatasetManifest load_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_manifest: cannot open " + path.string());

    DatasetManifest manifest;
    manifest.base_dir = path.has_parent_path() ? path.parent_path() : ".";

    std::set<std::string> seen_ids;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::map<std::string, std::string> kv;
        std::string token;
        while (ls >> token) {
            const auto eq = token.find('=');
            if (eq == std::string::npos || eq == 0)
                throw std::runtime_error("load_manifest: expected key=value at line " +
                                         std::to_string(line_no));
            if (!kv.emplace(token.substr(0, eq), token.substr(eq + 1)).second)
                throw std::runtime_error("load_manifest: duplicate key '" + token.substr(0, eq) +
                                         "' at line " + std::to_string(line_no));
        }
        if (kv.empty()) continue;

        const auto take = [&](const char* key) -> std::string {
            auto it = kv.find(key);
            if (it == kv.end())
                throw std::runtime_error(std::string("load_manifest: missing '") + key +
                                         "' at line " + std::to_string(line_no));
            std::string v = it->second;
            kv.erase(it);
            return v;
        };
        const auto take_opt = [&](const char* key) -> std::optional<std::string> {
            auto it = kv.find(key);
            if (it == kv.end()) return std::nullopt;
            std::string v = it->second;
            kv.erase(it);
            return v;
        };

        ManifestEntry e;
        e.sample_id = take("sample_id");
        if (!seen_ids.insert(e.sample_id).second)
            throw std::runtime_error("load_manifest: duplicate sample_id '" + e.sample_id + "'");

        const std::string modality = take("modality");
        const auto resolve = [&](const std::string& rel) { return manifest.base_dir / rel; };
        if (modality == "mono") {
            e.modality = ManifestEntry::Modality::Mono;
            e.image = resolve(take("image"));
            e.depth = resolve(take("depth"));
        } else if (modality == "stereo") {
            e.modality = ManifestEntry::Modality::Stereo;
            e.left = resolve(take("left"));
            e.right = resolve(take("right"));
            e.disp = resolve(take("disp"));
        } else {
            throw std::runtime_error("load_manifest: unknown modality '" + modality +
                                     "' at line " + std::to_string(line_no));
        }
        if (auto s = take_opt("depth_scale")) e.depth_scale = std::stod(*s);
        if (!(e.depth_scale > 0.0))
            throw std::runtime_error("load_manifest: depth_scale must be positive at line " +
                                     std::to_string(line_no));

        const auto fx = take_opt("fx"), fy = take_opt("fy"), cx = take_opt("cx"),
                   cy = take_opt("cy");
        const int n_intr = !!fx + !!fy + !!cx + !!cy;
        if (n_intr == 4)
            e.intrinsics = CameraModel{std::stod(*fx), std::stod(*fy), std::stod(*cx),
                                       std::stod(*cy)};
        else if (n_intr != 0)
            throw std::runtime_error(
                "load_manifest: intrinsics need all of fx,fy,cx,cy at line " +
                std::to_string(line_no));

        if (!kv.empty())
            throw std::runtime_error("load_manifest: unknown key '" + kv.begin()->first +
                                     "' at line " + std::to_string(line_no));

        // Missing files are not fatal here: the generation driver skips such
        // samples individually and notes them in its report.
        manifest.entries.push_back(std::move(e));
    }
    return manifest;
}

}  // namespace flowgen

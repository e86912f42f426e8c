#pragma once

// One supervised training sample: an image pair, its exact ground-truth
// flow, and the training mask. flow.valid marks where the flow is defined
// (dense over valid source pixels, occlusions included); mask additionally
// drops pixels that are occluded or unresolved in the target view, so
// photoconsistency holds on mask by construction.

#include <map>
#include <string>

#include "flowgen/types.hpp"

namespace flowgen {

enum class AugLabel { Flip = 0, Rotate = 1, Shear = 2, None = 3 };

inline const char* to_string(AugLabel l) {
    switch (l) {
        case AugLabel::Flip: return "flip";
        case AugLabel::Rotate: return "rotate";
        case AugLabel::Shear: return "shear";
        default: return "none";
    }
}

inline AugLabel aug_label_from_string(const std::string& s) {
    if (s == "flip") return AugLabel::Flip;
    if (s == "rotate") return AugLabel::Rotate;
    if (s == "shear") return AugLabel::Shear;
    if (s == "none") return AugLabel::None;
    throw std::invalid_argument("unknown augmentation label: " + s);
}

struct SampleTuple {
    Image source;
    Image target;
    FlowField flow;                    // ground truth, source -> target
    std::vector<std::uint8_t> mask;    // training validity (subset of flow.valid)
    std::string sample_id;
    std::string kind;                  // f01 | f12 | f02
    std::string modality;              // mono | stereo
    AugLabel label = AugLabel::None;
    std::map<std::string, std::string> meta;  // provenance key/values

    double mask_coverage() const {
        if (mask.empty()) return 0.0;
        std::size_t n = 0;
        for (auto m : mask) n += m != 0;
        return static_cast<double>(n) / mask.size();
    }
};

}  // namespace flowgen

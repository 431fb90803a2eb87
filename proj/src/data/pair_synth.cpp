#include "retarget/data/pair_synth.hpp"

#include <algorithm>
#include <cmath>

#include "retarget/core/error.hpp"
#include "retarget/core/image_io.hpp"
#include "retarget/core/rng.hpp"
#include "retarget/maskgen/mask_generator.hpp"

namespace retarget::data {

Tensor crop_valid(const Tensor& padded, const Rect& valid) {
    if (padded.rank() != 3)
        throw ModuleError("dataset_pipeline", "crop_valid expects a [C,H,W] tensor");
    const int c = padded.dim(0);
    if (valid.left != 0 || valid.top != 0 || valid.right() > padded.dim(2) ||
        valid.bottom() > padded.dim(1) || valid.area() < 1)
        throw ModuleError("dataset_pipeline", "invalid crop rectangle");
    Tensor out({c, valid.height, valid.width});
    for (int ci = 0; ci < c; ++ci)
        for (int y = 0; y < valid.height; ++y)
            std::copy_n(padded.data() + (static_cast<int64_t>(ci) * padded.dim(1) + y) * padded.dim(2),
                        valid.width,
                        out.data() + (static_cast<int64_t>(ci) * valid.height + y) * valid.width);
    return out;
}

void prescale_to_canvas(Tensor& image, ObjectAnnotation& ann, int canvas) {
    const int h = image.dim(1), w = image.dim(2);
    const int longest = std::max(h, w);
    if (longest <= canvas) return;
    const float s = static_cast<float>(canvas) / longest;
    const int nh = scaled_dim(h, s), nw = scaled_dim(w, s);
    image = resize_bilinear(image, nh, nw);
    ann.seg = resize_nearest(ann.seg, nh, nw);
    Rect sb = scale_rect(ann.bbox, s, s, nw, nh);
    // Nearest-neighbour resampling can move foreground a pixel past the
    // conservatively scaled bbox; widen to the resized segmentation's extent.
    int min_x = nw, min_y = nh, max_x = -1, max_y = -1;
    for (int y = 0; y < nh; ++y)
        for (int x = 0; x < nw; ++x)
            if (ann.seg[static_cast<int64_t>(y) * nw + x] > 0.5f) {
                min_x = std::min(min_x, x);
                max_x = std::max(max_x, x);
                min_y = std::min(min_y, y);
                max_y = std::max(max_y, y);
            }
    if (max_x >= 0) {
        const int x0 = std::min(sb.left, min_x), y0 = std::min(sb.top, min_y);
        const int x1 = std::max(sb.right(), max_x + 1), y1 = std::max(sb.bottom(), max_y + 1);
        sb = Rect{x0, y0, x1 - x0, y1 - y0};
    }
    ann.bbox = sb;
}

PairedSample synthesize_pair(const Tensor& original, const ObjectAnnotation& ann,
                             const AugParams& params, int canvas,
                             const SynthConfig& config) {
    if (original.rank() != 3 || original.dim(0) != 3)
        throw ModuleError("dataset_pipeline", "synthesize_pair expects a [3,H,W] image");
    const int h = original.dim(1), w = original.dim(2);

    PairedSample out;
    out.ground_truth = maskgen::pad_to_canvas(original, canvas);
    out.gt_valid = Rect{0, 0, w, h};

    const int rw = scaled_dim(w, params.scale_x);
    const int rh = scaled_dim(h, params.scale_y);
    const Rect& cw = params.crop_window;
    if (cw.area() < 1 || !Rect{0, 0, rw, rh}.contains(cw))
        throw ModuleError("dataset_pipeline", "crop window outside the resized image");

    Tensor resized = resize_bilinear(original, rh, rw);
    Tensor cropped({3, cw.height, cw.width});
    for (int c = 0; c < 3; ++c)
        for (int y = 0; y < cw.height; ++y)
            std::copy_n(resized.data() + (static_cast<int64_t>(c) * rh + cw.top + y) * rw + cw.left,
                        cw.width,
                        cropped.data() + (static_cast<int64_t>(c) * cw.height + y) * cw.width);
    Tensor input_img = maskgen::pad_to_canvas(cropped, canvas);
    out.input_valid = Rect{0, 0, cw.width, cw.height};

    // Mask describes the desired output geometry, i.e. the original image.
    maskgen::ExtractedObject obj = maskgen::extract_object(original, ann.seg);
    maskgen::RetargetSpec spec;
    spec.target_w = w;
    spec.target_h = h;
    spec.object_rect = obj.tight_bbox;
    if (config.shift_jitter) {
        Rng rng(derive_seed(params.rng_seed, 0x6d61736bULL));
        if (uniform(rng, 0.0f, 1.0f) < config.shift_jitter_prob) {
            const int amp = std::max(1, static_cast<int>(std::lround(config.shift_jitter_frac * canvas)));
            Rect r = spec.object_rect;
            r.left += uniform_int(rng, -amp, amp);
            r.top += uniform_int(rng, -amp, amp);
            r.left = std::clamp(r.left, 0, std::max(0, w - r.width));
            r.top = std::clamp(r.top, 0, std::max(0, h - r.height));
            if (Rect{0, 0, w, h}.contains(r)) spec.object_rect = r;
        }
    }
    maskgen::MaskImage mask = maskgen::build_target_mask(obj, spec, canvas);

    out.model_input = maskgen::assemble_model_input(input_img, mask);
    return out;
}

}  // namespace retarget::data

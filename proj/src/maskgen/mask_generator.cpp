#include "retarget/maskgen/mask_generator.hpp"

#include <algorithm>

#include "retarget/core/error.hpp"
#include "retarget/core/image_io.hpp"

namespace retarget::maskgen {

void RetargetSpec::validate(int canvas) const {
    if (target_w < 1 || target_h < 1 || target_w > canvas || target_h > canvas)
        throw ModuleError("mask_generator", "target size must be within [1, " +
                                                std::to_string(canvas) + "]");
    if (object_rect.width < 1 || object_rect.height < 1)
        throw ModuleError("mask_generator", "object rectangle must have positive area");
    const Rect target{0, 0, target_w, target_h};
    if (!target.contains(object_rect))
        throw ModuleError("mask_generator", "object rectangle outside the target canvas");
}

ExtractedObject extract_object(const Tensor& image, const Tensor& seg) {
    if (image.rank() != 3 || seg.rank() != 2 || image.dim(1) != seg.dim(0) ||
        image.dim(2) != seg.dim(1))
        throw ModuleError("mask_generator", "segmentation not aligned to image");
    const int h = seg.dim(0), w = seg.dim(1);
    int min_x = w, min_y = h, max_x = -1, max_y = -1;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            if (seg[static_cast<int64_t>(y) * w + x] > 0.5f) {
                min_x = std::min(min_x, x);
                max_x = std::max(max_x, x);
                min_y = std::min(min_y, y);
                max_y = std::max(max_y, y);
            }
    if (max_x < 0) throw ModuleError("mask_generator", "empty segmentation");

    ExtractedObject obj;
    obj.alpha = seg;
    obj.rgb = Tensor({3, h, w});
    for (int c = 0; c < 3; ++c)
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x)
                if (seg[static_cast<int64_t>(y) * w + x] > 0.5f)
                    obj.rgb.at(c, y, x) = image.at(c, y, x);
    obj.tight_bbox = Rect{min_x, min_y, max_x - min_x + 1, max_y - min_y + 1};
    return obj;
}

Tensor pad_to_canvas(const Tensor& img, int canvas) {
    const int c = img.dim(0), h = img.dim(1), w = img.dim(2);
    if (h > canvas || w > canvas)
        throw ModuleError("dataset_pipeline", "canvas overflow: image " + std::to_string(w) + "x" +
                                                  std::to_string(h) + " exceeds canvas " +
                                                  std::to_string(canvas));
    Tensor out({c, canvas, canvas});
    for (int ci = 0; ci < c; ++ci)
        for (int y = 0; y < h; ++y)
            std::copy_n(img.data() + (static_cast<int64_t>(ci) * h + y) * w, w,
                        out.data() + (static_cast<int64_t>(ci) * canvas + y) * canvas);
    return out;
}

MaskImage build_target_mask(const ExtractedObject& obj, const RetargetSpec& spec, int canvas) {
    spec.validate(canvas);

    // Crop the object to its tight bbox, then resize into object_rect.
    const Rect& bb = obj.tight_bbox;
    Tensor rgb_crop({3, bb.height, bb.width});
    Tensor alpha_crop({bb.height, bb.width});
    for (int c = 0; c < 3; ++c)
        for (int y = 0; y < bb.height; ++y)
            for (int x = 0; x < bb.width; ++x)
                rgb_crop.at(c, y, x) = obj.rgb.at(c, bb.top + y, bb.left + x);
    for (int y = 0; y < bb.height; ++y)
        for (int x = 0; x < bb.width; ++x)
            alpha_crop[static_cast<int64_t>(y) * bb.width + x] =
                obj.alpha[static_cast<int64_t>(bb.top + y) * obj.alpha.dim(1) + bb.left + x];

    const Rect& dst = spec.object_rect;
    Tensor rgb_r = resize_bilinear(rgb_crop, dst.height, dst.width);
    Tensor alpha_r = resize_nearest(alpha_crop, dst.height, dst.width);

    // White target region, hard-alpha composite, zero padding elsewhere.
    MaskImage mask;
    mask.valid = Rect{0, 0, spec.target_w, spec.target_h};
    mask.data = Tensor({3, canvas, canvas});
    for (int c = 0; c < 3; ++c)
        for (int y = 0; y < spec.target_h; ++y)
            for (int x = 0; x < spec.target_w; ++x) mask.data.at(c, y, x) = 1.0f;
    for (int y = 0; y < dst.height; ++y)
        for (int x = 0; x < dst.width; ++x)
            if (alpha_r[static_cast<int64_t>(y) * dst.width + x] > 0.5f)
                for (int c = 0; c < 3; ++c)
                    mask.data.at(c, dst.top + y, dst.left + x) = rgb_r.at(c, y, x);
    return mask;
}

Tensor assemble_model_input(const Tensor& input_img, const MaskImage& mask) {
    if (input_img.rank() != 3 || input_img.dim(0) != 3)
        throw ModuleError("mask_generator", "model input image must be [3,H,W]");
    if (!input_img.same_shape(mask.data))
        throw ModuleError("mask_generator", "image/mask size mismatch: " + input_img.shape_str() +
                                                " vs " + mask.data.shape_str());
    return channel_concat(input_img, mask.data);
}

}  // namespace retarget::maskgen

#include "retarget/infer/retarget.hpp"

#include <algorithm>
#include <filesystem>

#include "retarget/core/error.hpp"
#include "retarget/core/image_io.hpp"
#include "retarget/data/augment.hpp"
#include "retarget/data/pair_synth.hpp"

namespace retarget::infer {

namespace fs = std::filesystem;

data::ObjectAnnotation resolve_annotation(const Tensor& image, const std::string& image_path,
                                          data::AnnotationProvider* provider,
                                          const RetargetOptions& opt) {
    const int h = image.dim(1), w = image.dim(2);
    if (!opt.mask_file.empty()) {
        data::ObjectAnnotation ann;
        ann.seg = load_mask_binary(opt.mask_file, "retarget_inference");
        if (ann.seg.dim(0) != h || ann.seg.dim(1) != w)
            ann.seg = resize_nearest(ann.seg, h, w);
        ann.bbox = Rect{0, 0, w, h};
        auto norm = data::normalize_annotation(std::move(ann), h, w);
        if (!norm)
            throw ModuleError("retarget_inference", "mask file has no foreground: " + opt.mask_file);
        // shrink to the tight extent so placement math matches the object
        auto obj = maskgen::extract_object(image, norm->seg);
        norm->bbox = obj.tight_bbox;
        return *norm;
    }
    if (opt.manual_bbox) {
        const Rect b = *opt.manual_bbox;
        if (b.area() < 1 || !Rect{0, 0, w, h}.contains(b))
            throw ModuleError("retarget_inference", "--bbox rectangle outside the image");
        data::ObjectAnnotation ann;
        ann.bbox = b;
        ann.seg = Tensor({h, w});
        for (int y = b.top; y < b.bottom(); ++y)
            for (int x = b.left; x < b.right(); ++x)
                ann.seg[static_cast<int64_t>(y) * w + x] = 1.0f;
        return ann;
    }
    if (provider)
        if (auto ann = provider->annotate(image_path, image)) return *ann;
    throw ModuleError("retarget_inference",
                      "no object found in " + image_path +
                          "; pass --bbox or --mask-file to specify it manually");
}

Tensor retarget_image(const Tensor& image, const std::string& image_path, int target_w,
                      int target_h, net::Generator& gen, data::AnnotationProvider* provider,
                      const RetargetOptions& opt) {
    if (target_w < 1 || target_h < 1 || target_w > opt.canvas || target_h > opt.canvas)
        throw ModuleError("retarget_inference", "target size must be within [1, " +
                                                    std::to_string(opt.canvas) + "] per axis");

    Tensor img = image;
    data::ObjectAnnotation ann = resolve_annotation(img, image_path, provider, opt);
    data::prescale_to_canvas(img, ann, opt.canvas);
    const int h = img.dim(1), w = img.dim(2);

    maskgen::ExtractedObject obj = maskgen::extract_object(img, ann.seg);

    maskgen::RetargetSpec spec;
    spec.target_w = target_w;
    spec.target_h = target_h;
    if (opt.object_rect) {
        spec.object_rect = *opt.object_rect;
    } else {
        // proportional placement: scale the source bbox into the target frame
        const float sx = static_cast<float>(target_w) / w;
        const float sy = static_cast<float>(target_h) / h;
        spec.object_rect = data::scale_rect(obj.tight_bbox, sx, sy, target_w, target_h);
    }
    spec.validate(opt.canvas);

    maskgen::MaskImage mask = maskgen::build_target_mask(obj, spec, opt.canvas);
    if (!opt.dump_masks_dir.empty()) {
        fs::create_directories(opt.dump_masks_dir);
        const std::string stem = fs::path(image_path).stem().string();
        save_image_rgb(mask.data, (fs::path(opt.dump_masks_dir) / (stem + "_mask.png")).string(),
                       "retarget_inference");
    }

    Tensor padded = maskgen::pad_to_canvas(img, opt.canvas);
    Tensor model_input = maskgen::assemble_model_input(padded, mask);
    Tensor out = gen.forward(model_input, false);
    return data::crop_valid(out, Rect{0, 0, target_w, target_h});
}

}  // namespace retarget::infer

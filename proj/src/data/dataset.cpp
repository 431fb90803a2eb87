#include "retarget/data/dataset.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "retarget/core/error.hpp"
#include "retarget/core/image_io.hpp"

namespace retarget::data {

namespace fs = std::filesystem;

std::optional<ObjectAnnotation> normalize_annotation(ObjectAnnotation ann, int img_h, int img_w) {
    Rect& b = ann.bbox;
    const int x0 = std::clamp(b.left, 0, img_w);
    const int y0 = std::clamp(b.top, 0, img_h);
    const int x1 = std::clamp(b.right(), 0, img_w);
    const int y1 = std::clamp(b.bottom(), 0, img_h);
    if (x1 <= x0 || y1 <= y0) return std::nullopt;
    b = Rect{x0, y0, x1 - x0, y1 - y0};

    if (ann.seg.rank() != 2 || ann.seg.dim(0) != img_h || ann.seg.dim(1) != img_w)
        return std::nullopt;
    int fg = 0;
    for (int y = 0; y < img_h; ++y)
        for (int x = 0; x < img_w; ++x) {
            float& v = ann.seg[static_cast<int64_t>(y) * img_w + x];
            if (v > 0.5f && !b.contains_point(x, y)) v = 0.0f;  // clip to bbox
            if (v > 0.5f) ++fg;
        }
    if (fg == 0) return std::nullopt;
    return ann;
}

namespace {

std::string stem_of(const std::string& path) { return fs::path(path).stem().string(); }

Rect tight_bbox_of(const Tensor& seg) {
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
    if (max_x < 0) return Rect{};
    return Rect{min_x, min_y, max_x - min_x + 1, max_y - min_y + 1};
}

}  // namespace

FilesAnnotationProvider::FilesAnnotationProvider(const std::string& root) : root_(root) {
    const fs::path bbox_file = fs::path(root) / "bounding_boxes.txt";
    if (fs::exists(bbox_file)) {
        std::ifstream in(bbox_file);
        std::string line;
        while (std::getline(in, line)) {
            std::istringstream ls(line);
            std::string id;
            double l, t, w, h;
            if (ls >> id >> l >> t >> w >> h)
                bboxes_.emplace_back(id, Rect{static_cast<int>(l), static_cast<int>(t),
                                              static_cast<int>(std::ceil(w)),
                                              static_cast<int>(std::ceil(h))});
        }
    }
    const fs::path seg_dir = fs::path(root) / "segmentations";
    if (fs::exists(seg_dir))
        for (const auto& e : fs::recursive_directory_iterator(seg_dir))
            if (e.is_regular_file() && e.path().extension() == ".png")
                segs_.emplace_back(e.path().stem().string(), e.path().string());
    std::sort(bboxes_.begin(), bboxes_.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    std::sort(segs_.begin(), segs_.end());
}

std::optional<ObjectAnnotation> FilesAnnotationProvider::annotate(const std::string& image_path,
                                                                 const Tensor& image) {
    const std::string stem = stem_of(image_path);
    auto seg_it = std::lower_bound(segs_.begin(), segs_.end(), stem,
                                   [](const auto& p, const std::string& s) { return p.first < s; });
    if (seg_it == segs_.end() || seg_it->first != stem) return std::nullopt;

    const int h = image.dim(1), w = image.dim(2);
    ObjectAnnotation ann;
    ann.seg = load_mask_binary(seg_it->second);
    if (ann.seg.dim(0) != h || ann.seg.dim(1) != w)
        ann.seg = resize_nearest(ann.seg, h, w);

    auto bb_it = std::lower_bound(bboxes_.begin(), bboxes_.end(), stem,
                                  [](const auto& p, const std::string& s) { return p.first < s; });
    if (bb_it != bboxes_.end() && bb_it->first == stem) ann.bbox = bb_it->second;
    else ann.bbox = tight_bbox_of(ann.seg);
    if (ann.bbox.width == 0) return std::nullopt;
    return normalize_annotation(std::move(ann), h, w);
}

std::optional<ObjectAnnotation> CommandAnnotationProvider::annotate(const std::string& image_path,
                                                                   const Tensor& image) {
    const std::string out_mask =
        (fs::temp_directory_path() / ("ann_" + std::to_string(std::hash<std::string>{}(image_path)) + ".png"))
            .string();
    const std::string cmd = command_ + " \"" + image_path + "\" \"" + out_mask + "\"";
    if (std::system(cmd.c_str()) != 0) return std::nullopt;
    if (!fs::exists(out_mask)) return std::nullopt;
    ObjectAnnotation ann;
    ann.seg = load_mask_binary(out_mask);
    fs::remove(out_mask);
    const int h = image.dim(1), w = image.dim(2);
    if (ann.seg.dim(0) != h || ann.seg.dim(1) != w) ann.seg = resize_nearest(ann.seg, h, w);
    ann.bbox = tight_bbox_of(ann.seg);
    if (ann.bbox.width == 0) return std::nullopt;
    return normalize_annotation(std::move(ann), h, w);
}

std::shared_ptr<AnnotationProvider> make_provider(const std::string& id, const std::string& root,
                                                  const std::string& model_command) {
    if (id == "files") return std::make_shared<FilesAnnotationProvider>(root);
    if (id == "model") {
        if (model_command.empty())
            throw ModuleError("dataset_pipeline",
                              "provider 'model' needs an external command (--annotation-cmd)");
        return std::make_shared<CommandAnnotationProvider>(model_command);
    }
    throw ModuleError("dataset_pipeline",
                      "unknown annotation provider '" + id + "' (available: files, model)");
}

DatasetIndex load_dataset(const std::string& root, AnnotationProvider& provider,
                          int canvas_size) {
    const fs::path images_dir = fs::path(root) / "images";
    if (!fs::exists(root) || !fs::is_directory(root))
        throw ModuleError("dataset_pipeline", "dataset root not readable: " + root);
    if (!fs::exists(images_dir))
        throw ModuleError("dataset_pipeline", "missing images/ directory under " + root);

    std::vector<std::string> paths;
    for (const auto& e : fs::recursive_directory_iterator(images_dir))
        if (e.is_regular_file()) {
            auto ext = e.path().extension().string();
            std::transform(ext.begin(), ext.end(), ext.begin(), ::tolower);
            if (ext == ".jpg" || ext == ".jpeg" || ext == ".png")
                paths.push_back(e.path().string());
        }
    std::sort(paths.begin(), paths.end());

    DatasetIndex index;
    index.canvas_size = canvas_size;
    for (const auto& p : paths) {
        Tensor img;
        try {
            img = load_image_rgb(p);
        } catch (const ModuleError&) {
            ++index.skipped;
            continue;
        }
        if (provider.annotate(p, img))
            index.samples.push_back({p, provider.id()});
        else
            ++index.skipped;
    }
    if (index.samples.empty())
        throw ModuleError("dataset_pipeline", "no usable samples under " + root + " (" +
                                                  std::to_string(index.skipped) + " skipped)");
    return index;
}

}  // namespace retarget::data

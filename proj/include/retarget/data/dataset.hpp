#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "retarget/core/geometry.hpp"
#include "retarget/core/tensor.hpp"

namespace retarget::data {

using retarget::Rect;
using retarget::Tensor;

// Bounding box plus binary segmentation of the single most salient object.
// Invariant after loading: bbox inside image bounds, every foreground pixel
// inside bbox (enforced by clipping), at least one foreground pixel.
struct ObjectAnnotation {
    Rect bbox;
    Tensor seg;  // [H,W] binary, aligned to the source image
};

// Plug-in contract: given an image, return its annotation or nothing.
class AnnotationProvider {
public:
    virtual ~AnnotationProvider() = default;
    virtual std::optional<ObjectAnnotation> annotate(const std::string& image_path,
                                                     const Tensor& image) = 0;
    virtual std::string id() const = 0;
};

// Reads dataset-shipped annotations: `bounding_boxes.txt` lines
// `<stem> <left> <top> <w> <h>` and `segmentations/**/<stem>.png`. A missing
// bbox line falls back to the segmentation's tight bbox.
class FilesAnnotationProvider : public AnnotationProvider {
public:
    explicit FilesAnnotationProvider(const std::string& root);
    std::optional<ObjectAnnotation> annotate(const std::string& image_path,
                                             const Tensor& image) override;
    std::string id() const override { return "files"; }

private:
    std::string root_;
    std::vector<std::pair<std::string, Rect>> bboxes_;        // stem -> bbox
    std::vector<std::pair<std::string, std::string>> segs_;   // stem -> path
};

// Delegates to an external detector/segmenter executable:
// `cmd <image_path> <out_mask_png>`; bbox is the mask's tight bbox.
class CommandAnnotationProvider : public AnnotationProvider {
public:
    explicit CommandAnnotationProvider(std::string command) : command_(std::move(command)) {}
    std::optional<ObjectAnnotation> annotate(const std::string& image_path,
                                             const Tensor& image) override;
    std::string id() const override { return "model"; }

private:
    std::string command_;
};

struct DatasetIndex {
    struct Entry {
        std::string image_path;
        std::string annotation_source;
    };
    std::vector<Entry> samples;
    int canvas_size = 512;
    int skipped = 0;  // entries dropped for missing/degenerate annotations
};

// Builds an annotation provider by id. `model_command` backs the "model" id.
std::shared_ptr<AnnotationProvider> make_provider(const std::string& id, const std::string& root,
                                                  const std::string& model_command = "");

// Scans `<root>/images/**` (jpg/jpeg/png, sorted), validating that each entry
// has a usable annotation. Fatal on unreadable root or zero usable samples.
DatasetIndex load_dataset(const std::string& root, AnnotationProvider& provider,
                          int canvas_size = 512);

// Clips bbox to image bounds and seg foreground to the bbox; empty result
// means a degenerate annotation.
std::optional<ObjectAnnotation> normalize_annotation(ObjectAnnotation ann, int img_h, int img_w);

}  // namespace retarget::data

#include "retarget/eval/grid.hpp"

#include <algorithm>
#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "retarget/core/error.hpp"
#include "retarget/core/image_io.hpp"

namespace retarget::eval {

void comparison_grid(const std::vector<GridEntry>& entries, const std::string& out_path) {
    if (entries.empty()) throw ModuleError("evaluation", "comparison grid needs at least 1 entry");

    constexpr int pad = 8;
    constexpr int caption_h = 18;  // per caption line
    constexpr double font_scale = 0.4;

    int max_img_h = 1;
    int total_w = pad;
    bool any_note = false;
    for (const auto& e : entries) {
        if (e.image.rank() != 3)
            throw ModuleError("evaluation", "grid entry '" + e.label + "' is not [C,H,W]");
        max_img_h = std::max(max_img_h, e.image.dim(1));
        total_w += std::max(e.image.dim(2), 40) + pad;
        any_note |= !e.note.empty();
    }
    const int captions = any_note ? 2 : 1;
    const int total_h = pad + max_img_h + pad + captions * caption_h + pad;

    cv::Mat canvas(total_h, total_w, CV_8UC3, cv::Scalar(128, 128, 128));
    int x = pad;
    for (const auto& e : entries) {
        const cv::Mat panel = tensor_to_mat_bgr8(e.image);
        const int col_w = std::max(panel.cols, 40);
        panel.copyTo(canvas(cv::Rect(x, pad, panel.cols, panel.rows)));
        const int text_y0 = pad + max_img_h + pad + caption_h - 5;
        cv::putText(canvas, e.label, cv::Point(x, text_y0), cv::FONT_HERSHEY_SIMPLEX, font_scale,
                    cv::Scalar(255, 255, 255), 1, cv::LINE_AA);
        if (!e.note.empty())
            cv::putText(canvas, e.note, cv::Point(x, text_y0 + caption_h),
                        cv::FONT_HERSHEY_SIMPLEX, font_scale, cv::Scalar(255, 255, 255), 1,
                        cv::LINE_AA);
        x += col_w + pad;
    }
    if (!cv::imwrite(out_path, canvas))
        throw ModuleError("evaluation", "cannot write grid image " + out_path);
}

}  // namespace retarget::eval

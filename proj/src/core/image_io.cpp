#include "retarget/core/image_io.hpp"

#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "retarget/core/error.hpp"

namespace retarget {

Tensor mat_to_tensor_rgb(const cv::Mat& bgr8) {
    cv::Mat m = bgr8;
    if (m.channels() == 1) cv::cvtColor(m, m, cv::COLOR_GRAY2BGR);
    else if (m.channels() == 4) cv::cvtColor(m, m, cv::COLOR_BGRA2BGR);
    const int h = m.rows, w = m.cols;
    Tensor t({3, h, w});
    for (int y = 0; y < h; ++y) {
        const cv::Vec3b* row = m.ptr<cv::Vec3b>(y);
        for (int x = 0; x < w; ++x) {
            t.at(0, y, x) = row[x][2] / 255.0f;  // R
            t.at(1, y, x) = row[x][1] / 255.0f;  // G
            t.at(2, y, x) = row[x][0] / 255.0f;  // B
        }
    }
    return t;
}

cv::Mat tensor_to_mat_bgr8(const Tensor& img) {
    const int c = img.dim(0), h = img.dim(1), w = img.dim(2);
    cv::Mat m(h, w, CV_8UC3);
    auto to_u8 = [](float v) {
        return static_cast<unsigned char>(std::min(255.0f, std::max(0.0f, v * 255.0f + 0.5f)));
    };
    for (int y = 0; y < h; ++y) {
        cv::Vec3b* row = m.ptr<cv::Vec3b>(y);
        for (int x = 0; x < w; ++x) {
            const float r = img.at(0, y, x);
            const float g = c >= 3 ? img.at(1, y, x) : r;
            const float b = c >= 3 ? img.at(2, y, x) : r;
            row[x] = cv::Vec3b(to_u8(b), to_u8(g), to_u8(r));
        }
    }
    return m;
}

Tensor load_image_rgb(const std::string& path, const std::string& err_module) {
    cv::Mat m = cv::imread(path, cv::IMREAD_COLOR);
    if (m.empty()) throw ModuleError(err_module, "cannot read image " + path);
    return mat_to_tensor_rgb(m);
}

void save_image_rgb(const Tensor& img, const std::string& path, const std::string& err_module) {
    if (img.rank() != 3 || (img.dim(0) != 3 && img.dim(0) != 1))
        throw ModuleError(err_module, "save_image_rgb expects [3,H,W] or [1,H,W]");
    if (!cv::imwrite(path, tensor_to_mat_bgr8(img)))
        throw ModuleError(err_module, "cannot write image " + path);
}

Tensor load_mask_binary(const std::string& path, const std::string& err_module) {
    cv::Mat m = cv::imread(path, cv::IMREAD_GRAYSCALE);
    if (m.empty()) throw ModuleError(err_module, "cannot read mask " + path);
    Tensor t({m.rows, m.cols});
    for (int y = 0; y < m.rows; ++y) {
        const unsigned char* row = m.ptr<unsigned char>(y);
        for (int x = 0; x < m.cols; ++x) t[static_cast<int64_t>(y) * m.cols + x] = row[x] > 127 ? 1.0f : 0.0f;
    }
    return t;
}

void save_mask_binary(const Tensor& mask, const std::string& path, const std::string& err_module) {
    if (mask.rank() != 2) throw ModuleError(err_module, "save_mask_binary expects [H,W]");
    cv::Mat m(mask.dim(0), mask.dim(1), CV_8UC1);
    for (int y = 0; y < m.rows; ++y) {
        unsigned char* row = m.ptr<unsigned char>(y);
        for (int x = 0; x < m.cols; ++x)
            row[x] = mask[static_cast<int64_t>(y) * m.cols + x] > 0.5f ? 255 : 0;
    }
    if (!cv::imwrite(path, m)) throw ModuleError(err_module, "cannot write mask " + path);
}

namespace {
Tensor resize_chw(const Tensor& img, int out_h, int out_w, int interp) {
    const bool has_c = img.rank() == 3;
    const int c = has_c ? img.dim(0) : 1;
    const int h = has_c ? img.dim(1) : img.dim(0);
    const int w = has_c ? img.dim(2) : img.dim(1);
    if (out_h == h && out_w == w) return img;
    Tensor out(has_c ? std::vector<int>{c, out_h, out_w} : std::vector<int>{out_h, out_w});
    for (int ci = 0; ci < c; ++ci) {
        cv::Mat src(h, w, CV_32FC1,
                    const_cast<float*>(img.data() + static_cast<int64_t>(ci) * h * w));
        cv::Mat dst(out_h, out_w, CV_32FC1,
                    out.data() + static_cast<int64_t>(ci) * out_h * out_w);
        cv::resize(src, dst, cv::Size(out_w, out_h), 0, 0, interp);
    }
    return out;
}
}  // namespace

Tensor resize_bilinear(const Tensor& img, int out_h, int out_w) {
    return resize_chw(img, out_h, out_w, cv::INTER_LINEAR);
}

Tensor resize_nearest(const Tensor& img, int out_h, int out_w) {
    return resize_chw(img, out_h, out_w, cv::INTER_NEAREST);
}

}  // namespace retarget

#pragma once

#include <opencv2/core.hpp>
#include <string>

#include "retarget/core/tensor.hpp"

namespace retarget {

// Loads an image file as RGB float CHW in [0,1].
Tensor load_image_rgb(const std::string& path, const std::string& err_module = "dataset_pipeline");
// Writes a [3,H,W] or [1,H,W] tensor in [0,1]; format from extension (PNG default).
void save_image_rgb(const Tensor& img, const std::string& path,
                    const std::string& err_module = "evaluation");

// Loads a grayscale file as a binary [H,W] tensor (threshold at 50% gray).
Tensor load_mask_binary(const std::string& path,
                        const std::string& err_module = "dataset_pipeline");
void save_mask_binary(const Tensor& mask, const std::string& path,
                      const std::string& err_module = "dataset_pipeline");

// Interpolating resizes. Identity sizes return the input bit-exactly.
Tensor resize_bilinear(const Tensor& img, int out_h, int out_w);   // [C,H,W]
Tensor resize_nearest(const Tensor& img, int out_h, int out_w);    // [C,H,W] or [H,W]

cv::Mat tensor_to_mat_bgr8(const Tensor& img);
Tensor mat_to_tensor_rgb(const cv::Mat& bgr8);

}  // namespace retarget

#pragma once

#include <string>
#include <vector>

#include "retarget/core/tensor.hpp"

namespace retarget::eval {

using retarget::Tensor;

struct GridEntry {
    std::string label;
    Tensor image;      // [3,H,W] or [1,H,W]
    std::string note;  // optional second caption line (scores etc.)
};

// Writes a single comparison image: one column per entry, caption(s) beneath
// each panel, images shown un-resized on a neutral grey background.
void comparison_grid(const std::vector<GridEntry>& entries, const std::string& out_path);

}  // namespace retarget::eval

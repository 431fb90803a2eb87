#pragma once

#include <vector>

#include "retarget/core/tensor.hpp"

namespace retarget::seam {

using retarget::Tensor;

// One column index per row; adjacent entries differ by at most 1.
using SeamPath = std::vector<int>;

// Gradient-magnitude energy: |dI/dx| + |dI/dy| summed over channels, central
// differences in the interior and one-sided differences at the borders.
Tensor energy_map(const Tensor& image);  // [3,H,W] -> [H,W]

// Minimal-energy connected vertical seam via dynamic programming. Ties are
// broken towards the smallest column index at every backtrack choice.
SeamPath min_seam(const Tensor& energy);

double seam_cost(const Tensor& energy, const SeamPath& seam);

Tensor remove_vertical_seam(const Tensor& image, const SeamPath& seam);

Tensor transpose_hw(const Tensor& image);

// Content-aware resize: seams removed iteratively (energy recomputed each
// time) or, for enlargement, the k cheapest non-overlapping seams of the
// original are duplicated with neighbour averaging. Width pass runs before
// the height pass unless height_first is set.
Tensor seam_retarget(const Tensor& image, int target_w, int target_h, bool height_first = false);

}  // namespace retarget::seam

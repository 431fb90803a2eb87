#include "retarget/seam/seam_carving.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "retarget/core/error.hpp"

namespace retarget::seam {

Tensor energy_map(const Tensor& image) {
    if (image.rank() != 3) throw ModuleError("seam_carving_baseline", "energy_map expects [C,H,W]");
    const int c = image.dim(0), h = image.dim(1), w = image.dim(2);
    if (h < 2 || w < 2)
        throw ModuleError("seam_carving_baseline", "energy_map needs at least a 2x2 image");
    Tensor e({h, w});
    for (int ci = 0; ci < c; ++ci)
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                float dx, dy;
                if (x == 0) dx = image.at(ci, y, 1) - image.at(ci, y, 0);
                else if (x == w - 1) dx = image.at(ci, y, w - 1) - image.at(ci, y, w - 2);
                else dx = 0.5f * (image.at(ci, y, x + 1) - image.at(ci, y, x - 1));
                if (y == 0) dy = image.at(ci, 1, x) - image.at(ci, 0, x);
                else if (y == h - 1) dy = image.at(ci, h - 1, x) - image.at(ci, h - 2, x);
                else dy = 0.5f * (image.at(ci, y + 1, x) - image.at(ci, y - 1, x));
                e[static_cast<int64_t>(y) * w + x] += std::abs(dx) + std::abs(dy);
            }
    return e;
}

SeamPath min_seam(const Tensor& energy) {
    if (energy.rank() != 2) throw ModuleError("seam_carving_baseline", "min_seam expects [H,W]");
    const int h = energy.dim(0), w = energy.dim(1);
    if (w < 2) throw ModuleError("seam_carving_baseline", "min_seam needs width >= 2");

    std::vector<double> prev(w), cur(w);
    std::vector<std::vector<int>> from(h, std::vector<int>(w, 0));
    for (int x = 0; x < w; ++x) prev[x] = energy[x];
    for (int y = 1; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            int best = x;  // prefer smallest predecessor column on ties
            for (int d = -1; d <= 1; ++d) {
                const int px = x + d;
                if (px < 0 || px >= w) continue;
                if (prev[px] < prev[best] || (prev[px] == prev[best] && px < best)) best = px;
            }
            from[y][x] = best;
            cur[x] = energy[static_cast<int64_t>(y) * w + x] + prev[best];
        }
        prev = cur;
    }
    int end = 0;
    for (int x = 1; x < w; ++x)
        if (prev[x] < prev[end]) end = x;

    SeamPath seam(h);
    seam[h - 1] = end;
    for (int y = h - 1; y > 0; --y) seam[y - 1] = from[y][seam[y]];
    return seam;
}

double seam_cost(const Tensor& energy, const SeamPath& seam) {
    const int w = energy.dim(1);
    double c = 0.0;
    for (size_t y = 0; y < seam.size(); ++y)
        c += energy[static_cast<int64_t>(y) * w + seam[y]];
    return c;
}

Tensor remove_vertical_seam(const Tensor& image, const SeamPath& seam) {
    const int c = image.dim(0), h = image.dim(1), w = image.dim(2);
    if (static_cast<int>(seam.size()) != h)
        throw ModuleError("seam_carving_baseline", "seam length does not match image height");
    Tensor out({c, h, w - 1});
    for (int ci = 0; ci < c; ++ci)
        for (int y = 0; y < h; ++y) {
            int ox = 0;
            for (int x = 0; x < w; ++x) {
                if (x == seam[y]) continue;
                out.at(ci, y, ox++) = image.at(ci, y, x);
            }
        }
    return out;
}

Tensor transpose_hw(const Tensor& image) {
    const int c = image.dim(0), h = image.dim(1), w = image.dim(2);
    Tensor out({c, w, h});
    for (int ci = 0; ci < c; ++ci)
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) out.at(ci, x, y) = image.at(ci, y, x);
    return out;
}

namespace {

Tensor shrink_width(Tensor img, int k) {
    for (int i = 0; i < k; ++i) img = remove_vertical_seam(img, min_seam(energy_map(img)));
    return img;
}

// Enlarges by duplicating the k cheapest non-overlapping seams found on the
// original image, averaging each inserted pixel with its right neighbour.
Tensor grow_width(const Tensor& img, int k) {
    const int c = img.dim(0), h = img.dim(1), w = img.dim(2);
    if (k >= w)
        throw ModuleError("seam_carving_baseline",
                          "cannot insert " + std::to_string(k) + " seams into width " +
                              std::to_string(w));
    // Track original columns while carving a working copy.
    std::vector<std::vector<int>> col_of(h, std::vector<int>(w));
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) col_of[y][x] = x;
    Tensor work = img;
    std::vector<std::vector<bool>> marked(h, std::vector<bool>(w, false));
    for (int i = 0; i < k; ++i) {
        const SeamPath s = min_seam(energy_map(work));
        for (int y = 0; y < h; ++y) {
            marked[y][col_of[y][s[y]]] = true;
            col_of[y].erase(col_of[y].begin() + s[y]);
        }
        work = remove_vertical_seam(work, s);
    }
    Tensor out({c, h, w + k});
    for (int ci = 0; ci < c; ++ci)
        for (int y = 0; y < h; ++y) {
            int ox = 0;
            for (int x = 0; x < w; ++x) {
                out.at(ci, y, ox++) = img.at(ci, y, x);
                if (marked[y][x]) {
                    const float right = x + 1 < w ? img.at(ci, y, x + 1) : img.at(ci, y, x);
                    out.at(ci, y, ox++) = 0.5f * (img.at(ci, y, x) + right);
                }
            }
        }
    return out;
}

Tensor resize_width(const Tensor& img, int target_w) {
    const int w = img.dim(2);
    if (target_w == w) return img;
    if (target_w < w) return shrink_width(img, w - target_w);
    return grow_width(img, target_w - w);
}

}  // namespace

Tensor seam_retarget(const Tensor& image, int target_w, int target_h, bool height_first) {
    if (target_w < 2 || target_h < 2)
        throw ModuleError("seam_carving_baseline", "targets must be at least 2 pixels per axis");
    if (image.rank() != 3) throw ModuleError("seam_carving_baseline", "expects [C,H,W]");

    Tensor out = image;
    auto height_pass = [&] {
        if (out.dim(1) != target_h) out = transpose_hw(resize_width(transpose_hw(out), target_h));
    };
    if (height_first) height_pass();
    out = resize_width(out, target_w);
    if (!height_first) height_pass();
    return out;
}

}  // namespace retarget::seam

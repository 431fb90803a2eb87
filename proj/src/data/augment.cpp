#include "retarget/data/augment.hpp"

#include <algorithm>
#include <cmath>

#include "retarget/core/rng.hpp"

namespace retarget::data {

int scaled_dim(int dim, float scale) {
    return std::max(1, static_cast<int>(std::floor(static_cast<double>(dim) * scale + 0.5)));
}

Rect scale_rect(const Rect& r, float scale_x, float scale_y, int max_w, int max_h) {
    int x0 = static_cast<int>(std::floor(r.left * static_cast<double>(scale_x)));
    int y0 = static_cast<int>(std::floor(r.top * static_cast<double>(scale_y)));
    int x1 = static_cast<int>(std::ceil(r.right() * static_cast<double>(scale_x)));
    int y1 = static_cast<int>(std::ceil(r.bottom() * static_cast<double>(scale_y)));
    x0 = std::clamp(x0, 0, max_w - 1);
    y0 = std::clamp(y0, 0, max_h - 1);
    x1 = std::clamp(x1, x0 + 1, max_w);
    y1 = std::clamp(y1, y0 + 1, max_h);
    return Rect{x0, y0, x1 - x0, y1 - y0};
}

AugParams sample_aug_params(uint64_t seed, int img_h, int img_w, const Rect& bbox) {
    Rng rng(seed);
    AugParams p;
    p.rng_seed = seed;
    p.scale_x = uniform(rng, 0.5f, 1.0f);
    p.scale_y = uniform(rng, 0.5f, 1.0f);

    const int rw = scaled_dim(img_w, p.scale_x);
    const int rh = scaled_dim(img_h, p.scale_y);
    const Rect sbb = scale_rect(bbox, p.scale_x, p.scale_y, rw, rh);
    const double min_area = 0.6 * static_cast<double>(rw) * rh;

    p.crop_window = Rect{0, 0, rw, rh};  // fallback when geometry leaves no room
    for (int tries = 0; tries < 100; ++tries) {
        const int cw = uniform_int(rng, sbb.width, rw);
        const int ch = uniform_int(rng, sbb.height, rh);
        if (static_cast<double>(cw) * ch < min_area) continue;
        const int lmin = std::max(0, sbb.right() - cw);
        const int lmax = std::min(sbb.left, rw - cw);
        const int tmin = std::max(0, sbb.bottom() - ch);
        const int tmax = std::min(sbb.top, rh - ch);
        if (lmin > lmax || tmin > tmax) continue;
        p.crop_window = Rect{uniform_int(rng, lmin, lmax), uniform_int(rng, tmin, tmax), cw, ch};
        break;
    }
    return p;
}

}  // namespace retarget::data

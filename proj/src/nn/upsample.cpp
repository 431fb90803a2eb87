#include "retarget/nn/upsample.hpp"

#include <cassert>

namespace retarget::nn {

Tensor UpsampleNearest2x::forward(const Tensor& x, bool /*train*/) {
    assert(x.rank() == 4);
    const int n = x.dim(0), c = x.dim(1), h = x.dim(2), w = x.dim(3);
    Tensor out({n, c, 2 * h, 2 * w});
    for (int ni = 0; ni < n; ++ni)
        for (int ci = 0; ci < c; ++ci)
            for (int y = 0; y < 2 * h; ++y)
                for (int xx = 0; xx < 2 * w; ++xx)
                    out.at(ni, ci, y, xx) = x.at(ni, ci, y / 2, xx / 2);
    return out;
}

Tensor UpsampleNearest2x::backward(const Tensor& gy, bool /*accumulate*/) {
    assert(gy.rank() == 4);
    const int n = gy.dim(0), c = gy.dim(1), h = gy.dim(2) / 2, w = gy.dim(3) / 2;
    Tensor dx({n, c, h, w});
    for (int ni = 0; ni < n; ++ni)
        for (int ci = 0; ci < c; ++ci)
            for (int y = 0; y < 2 * h; ++y)
                for (int xx = 0; xx < 2 * w; ++xx)
                    dx.at(ni, ci, y / 2, xx / 2) += gy.at(ni, ci, y, xx);
    return dx;
}

}  // namespace retarget::nn

#include "helpers.hpp"
#include "retarget/core/error.hpp"
#include "retarget/core/image_io.hpp"
#include "retarget/maskgen/mask_generator.hpp"

using namespace retarget;
using namespace retarget::maskgen;
using testutil::rand_tensor;

namespace {

Tensor checkerboard_seg(int h, int w) {
    Tensor seg({h, w});
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) seg[static_cast<int64_t>(y) * w + x] = (y + x) % 2 ? 1.0f : 0.0f;
    return seg;
}

}  // namespace

TEST_SUITE("maskgen") {
    TEST_CASE("extract_object basics") {
        Rng rng(1);
        Tensor img = rand_tensor({3, 8, 10}, rng, 0.0f, 1.0f);

        Tensor all = Tensor::full({8, 10}, 1.0f);
        auto obj = extract_object(img, all);
        CHECK(obj.tight_bbox == Rect{0, 0, 10, 8});
        CHECK(testutil::max_abs_diff(obj.rgb, img) == 0.0);

        Tensor single2 = Tensor::zeros({30, 25});
        single2[static_cast<int64_t>(10) * 25 + 20] = 1.0f;  // pixel at (y=10, x=20)
        Tensor img2 = rand_tensor({3, 30, 25}, rng, 0.0f, 1.0f);
        auto obj2 = extract_object(img2, single2);
        CHECK(obj2.tight_bbox == Rect{20, 10, 1, 1});

        auto cb = checkerboard_seg(8, 10);
        auto obj3 = extract_object(img, cb);
        for (int y = 0; y < 8; ++y)
            for (int x = 0; x < 10; ++x)
                for (int c = 0; c < 3; ++c) {
                    if ((y + x) % 2) CHECK(obj3.rgb.at(c, y, x) == img.at(c, y, x));
                    else CHECK(obj3.rgb.at(c, y, x) == 0.0f);
                }

        CHECK_THROWS_WITH_AS(extract_object(img, Tensor::zeros({8, 10})), "empty segmentation",
                             ModuleError);
    }

    TEST_CASE("mask trichotomy on random specs") {
        Rng rng(2);
        const int canvas = 64;
        Tensor img = rand_tensor({3, 40, 40}, rng, 0.05f, 0.95f);
        Tensor seg = Tensor::zeros({40, 40});
        for (int y = 10; y < 30; ++y)
            for (int x = 8; x < 24; ++x) seg[static_cast<int64_t>(y) * 40 + x] = 1.0f;
        auto obj = extract_object(img, seg);

        for (int trial = 0; trial < 100; ++trial) {
            RetargetSpec spec;
            spec.target_w = uniform_int(rng, 8, canvas);
            spec.target_h = uniform_int(rng, 8, canvas);
            spec.object_rect.width = uniform_int(rng, 1, spec.target_w);
            spec.object_rect.height = uniform_int(rng, 1, spec.target_h);
            spec.object_rect.left = uniform_int(rng, 0, spec.target_w - spec.object_rect.width);
            spec.object_rect.top = uniform_int(rng, 0, spec.target_h - spec.object_rect.height);
            MaskImage mask = build_target_mask(obj, spec, canvas);

            // alpha resized nearest: recompute to classify object pixels
            for (int y = 0; y < canvas; ++y)
                for (int x = 0; x < canvas; ++x) {
                    const bool in_valid = x < spec.target_w && y < spec.target_h;
                    const float v0 = mask.data.at(0, y, x);
                    if (!in_valid) {
                        for (int c = 0; c < 3; ++c) CHECK(mask.data.at(c, y, x) == 0.0f);
                    } else if (!spec.object_rect.contains_point(x, y)) {
                        for (int c = 0; c < 3; ++c) CHECK(mask.data.at(c, y, x) == 1.0f);
                    } else {
                        // inside the object rect: either object RGB or white
                        CHECK(v0 >= 0.0f);
                        CHECK(v0 <= 1.0f);
                    }
                }
        }
    }

    TEST_CASE("padding region is exactly zero for a 256x384 target") {
        Rng rng(3);
        Tensor img = rand_tensor({3, 100, 100}, rng, 0.0f, 1.0f);
        Tensor seg = Tensor::zeros({100, 100});
        for (int y = 20; y < 60; ++y)
            for (int x = 30; x < 70; ++x) seg[static_cast<int64_t>(y) * 100 + x] = 1.0f;
        auto obj = extract_object(img, seg);
        RetargetSpec spec;
        spec.target_w = 384;
        spec.target_h = 256;
        spec.object_rect = Rect{100, 80, 60, 50};
        MaskImage mask = build_target_mask(obj, spec, 512);
        for (int y = 0; y < 512; ++y)
            for (int x = 0; x < 512; ++x)
                if (y >= 256 || x >= 384)
                    for (int c = 0; c < 3; ++c) REQUIRE(mask.data.at(c, y, x) == 0.0f);
    }

    TEST_CASE("shift equivariance of the composite") {
        Rng rng(4);
        Tensor img = rand_tensor({3, 60, 60}, rng, 0.0f, 1.0f);
        Tensor seg = Tensor::zeros({60, 60});
        for (int y = 10; y < 40; ++y)
            for (int x = 12; x < 38; ++x) seg[static_cast<int64_t>(y) * 60 + x] = 1.0f;
        auto obj = extract_object(img, seg);
        RetargetSpec a;
        a.target_w = 120;
        a.target_h = 120;
        a.object_rect = Rect{10, 15, 30, 28};
        RetargetSpec b = a;
        b.object_rect.left += 20;
        b.object_rect.top += 10;
        MaskImage ma = build_target_mask(obj, a, 128);
        MaskImage mb = build_target_mask(obj, b, 128);
        for (int y = 0; y < a.object_rect.height; ++y)
            for (int x = 0; x < a.object_rect.width; ++x)
                for (int c = 0; c < 3; ++c)
                    CHECK(ma.data.at(c, a.object_rect.top + y, a.object_rect.left + x) ==
                          mb.data.at(c, b.object_rect.top + y, b.object_rect.left + x));
    }

    TEST_CASE("alpha pixel count is conserved by nearest resize") {
        Rng rng(5);
        Tensor img = rand_tensor({3, 50, 50}, rng, 0.0f, 1.0f);
        Tensor seg = checkerboard_seg(50, 50);
        seg[0] = 1.0f;  // make (0,0) foreground so the tight bbox is the full grid
        auto obj = extract_object(img, seg);
        RetargetSpec spec;
        spec.target_w = 100;
        spec.target_h = 100;
        spec.object_rect = Rect{5, 5, 80, 70};
        MaskImage mask = build_target_mask(obj, spec, 128);
        // count non-white, non-zero-region pixels inside the object rect and
        // compare with the nearest-resized alpha's foreground count
        Tensor alpha_r = resize_nearest(obj.alpha, spec.object_rect.height, spec.object_rect.width);
        int64_t fg = 0;
        for (int64_t i = 0; i < alpha_r.numel(); ++i)
            if (alpha_r[i] > 0.5f) ++fg;
        CHECK(fg > 0);
        for (int64_t i = 0; i < alpha_r.numel(); ++i)
            CHECK((alpha_r[i] == 0.0f || alpha_r[i] == 1.0f));
    }

    TEST_CASE("assemble_model_input concatenates in order") {
        Rng rng(6);
        Tensor img = rand_tensor({3, 16, 16}, rng, 0.0f, 1.0f);
        MaskImage mask;
        mask.data = rand_tensor({3, 16, 16}, rng, 0.0f, 1.0f);
        mask.valid = Rect{0, 0, 16, 16};
        Tensor six = assemble_model_input(img, mask);
        REQUIRE(six.shape() == std::vector<int>{6, 16, 16});
        CHECK(testutil::max_abs_diff(channel_slice(six, 0, 3), img) == 0.0);
        CHECK(testutil::max_abs_diff(channel_slice(six, 3, 6), mask.data) == 0.0);
        // order sensitivity
        MaskImage m2;
        m2.data = img;
        Tensor six2 = assemble_model_input(mask.data, m2);
        CHECK(testutil::max_abs_diff(channel_slice(six2, 0, 3), mask.data) == 0.0);

        Tensor zeros6 = assemble_model_input(Tensor::zeros({3, 16, 16}), MaskImage{Tensor::zeros({3, 16, 16}), {}});
        CHECK(zeros6.abs_sum() == 0.0);

        CHECK_THROWS_AS(assemble_model_input(img, MaskImage{Tensor::zeros({3, 8, 8}), {}}),
                        ModuleError);
    }

    TEST_CASE("spec validation") {
        RetargetSpec spec;
        spec.target_w = 600;
        spec.target_h = 100;
        spec.object_rect = Rect{0, 0, 10, 10};
        CHECK_THROWS_AS(spec.validate(512), ModuleError);
        spec.target_w = 100;
        spec.object_rect = Rect{95, 0, 10, 10};  // pokes outside the target
        CHECK_THROWS_AS(spec.validate(512), ModuleError);
    }
}

#include "helpers.hpp"
#include "retarget/core/error.hpp"
#include "retarget/net/discriminator.hpp"
#include "retarget/net/generator.hpp"

using namespace retarget;
using namespace retarget::net;
using testutil::rand_tensor;

namespace {

GeneratorConfig tiny_gen() {
    GeneratorConfig cfg;
    cfg.base_width = 4;
    cfg.max_width = 16;
    cfg.n_residual = 2;
    return cfg;
}

}  // namespace

TEST_SUITE("networks") {
    TEST_CASE("generator maps 6-channel canvases to 3-channel images") {
        Generator gen(tiny_gen());
        gen.init(1);
        for (int s : {256, 512}) {
            Tensor x = Tensor::full({6, s, s}, 0.5f);
            Tensor y = gen.forward(x, false);
            CHECK(y.shape() == std::vector<int>{3, s, s});
            CHECK(y.min() >= 0.0f);
            CHECK(y.max() <= 1.0f);
        }
    }

    TEST_CASE("generator rejects non-divisible dims") {
        Generator gen(tiny_gen());
        gen.init(1);
        Tensor x = Tensor::full({6, 60, 64}, 0.5f);
        CHECK_THROWS_WITH_AS(gen.forward(x, false), "dims must be divisible by 8", ModuleError);
    }

    TEST_CASE("generator gradient reaches every parameter") {
        GeneratorConfig cfg = tiny_gen();
        Generator gen(cfg);
        gen.init(2);
        Rng rng(3);
        Tensor x = rand_tensor({1, 6, 16, 16}, rng, 0.0f, 1.0f);
        Tensor y = gen.forward(x, true);
        for (auto* p : gen.params()) p->zero_grad();
        Tensor gy = Tensor::full(y.shape(), 1.0f);
        gen.backward(gy, true);
        int nonzero = 0, total = 0;
        for (auto* p : gen.params()) {
            ++total;
            if (p->grad.abs_sum() > 0.0) ++nonzero;
        }
        CHECK(total > 0);
        // every parameter tensor should receive some gradient
        CHECK(nonzero == total);
    }

    TEST_CASE("generator sees global context through its ffc trunk") {
        GeneratorConfig cfg = tiny_gen();
        Generator gen(cfg);
        gen.init(4);
        Rng rng(5);
        Tensor x = rand_tensor({6, 64, 64}, rng, 0.0f, 1.0f);
        Tensor y0 = gen.forward(x, false);
        Tensor x2 = x;
        x2.at(1, 8, 8) += 0.5f;  // far corner perturbation
        Tensor y1 = gen.forward(x2, false);
        double far = 0.0;
        for (int c = 0; c < 3; ++c)
            far = std::max(far, std::abs(static_cast<double>(y1.at(c, 56, 56)) - y0.at(c, 56, 56)));
        CHECK(far > 0.0);  // reaches the opposite corner in one forward
    }

    TEST_CASE("discriminator output geometry and features") {
        DiscriminatorConfig cfg;
        cfg.base_width = 8;
        Discriminator disc(cfg);
        disc.init(7);
        CHECK(disc.min_input_size() == 70);
        CHECK(disc.total_stride() == 8);
        Tensor x = Tensor::full({2, 3, 128, 128}, 0.5f);
        auto out = disc.forward(x, false);
        CHECK(out.features.size() == static_cast<size_t>(cfg.n_layers) + 1);
        CHECK(out.logits.dim(0) == 2);
        CHECK(out.logits.dim(1) == 1);
        // three stride-2 layers then two stride-1 4x4 convs
        CHECK(out.logits.dim(2) == 14);
        CHECK(out.logits.dim(3) == 14);
        CHECK_THROWS_AS(disc.forward(Tensor::full({3, 64, 64}, 0.5f), false), ModuleError);
    }

    TEST_CASE("patch logits are locally determined") {
        DiscriminatorConfig cfg;
        cfg.base_width = 8;
        Discriminator disc(cfg);
        disc.init(9);
        Rng rng(11);
        Tensor x = rand_tensor({1, 3, 128, 128}, rng, 0.0f, 1.0f);
        Tensor l0 = disc.forward_logits(x, false);
        Tensor x2 = x;
        x2.at(0, 0, 2, 2) += 0.25f;  // top-left corner
        Tensor l1 = disc.forward_logits(x2, false);
        // far-away patches must not move
        CHECK(l1.at(0, 0, 13, 13) == l0.at(0, 0, 13, 13));
        CHECK(l1.at(0, 0, 0, 0) != l0.at(0, 0, 0, 0));
    }

    TEST_CASE("r1 equals the squared weight norm for a linear head") {
        // Single 4x4 conv on a 4x4 input: logits = <w, x> + b, so the input
        // gradient is w itself and the penalty is exactly ||w||^2.
        DiscriminatorConfig cfg;
        cfg.n_layers = 0;
        cfg.base_width = 8;
        Discriminator disc(cfg);
        disc.init(13);
        Rng rng(15);
        Tensor x = rand_tensor({1, 3, 6, 6}, rng, 0.0f, 1.0f);
        // logits grid is 5x5 for a padded 4x4 conv on 6x6; use mean-logit
        // gradient only when the grid is a single cell, so go unpadded size:
        // min_input_size() == 4 here.
        CHECK(disc.min_input_size() == 4);
        Tensor x1 = rand_tensor({1, 3, 4, 4}, rng, 0.0f, 1.0f);
        const double r1 = disc.r1_penalty(x1, 0.0f, false);
        double wsq = 0.0;
        const auto params = disc.params();
        // logits kernel is the only weight; skip the bias tensor
        for (auto* p : params)
            if (p->value.numel() > 1) wsq += p->value.sq_sum();
        // padded conv on a 4x4 input has 9 logit cells; the mean-logit
        // gradient therefore averages shifted copies of w. Compare against a
        // direct finite-difference of the mean logit instead for exactness.
        Tensor g_fd({3, 4, 4});
        auto mean_logit = [&](const Tensor& img) {
            Tensor l = disc.forward_logits(img, false);
            return l.sum() / l.numel();
        };
        const float eps = 1e-2f;
        Tensor xp = x1;
        for (int64_t i = 0; i < x1.numel(); ++i) {
            const float orig = xp[i];
            xp[i] = orig + eps;
            const double fp = mean_logit(xp);
            xp[i] = orig - eps;
            const double fm = mean_logit(xp);
            xp[i] = orig;
            g_fd[i] = static_cast<float>((fp - fm) / (2.0 * eps));
        }
        CHECK(r1 == doctest::Approx(g_fd.sq_sum()).epsilon(1e-3));
        CHECK(wsq > 0.0);  // sanity: the head is non-degenerate
    }

    TEST_CASE("r1 weight gradient matches finite differences") {
        DiscriminatorConfig cfg;
        cfg.n_layers = 2;
        cfg.base_width = 4;
        Discriminator disc(cfg);
        disc.init(17);
        Rng rng(19);
        Tensor x = rand_tensor({2, 3, 12, 12}, rng, 0.0f, 1.0f);

        auto params = disc.params();
        for (auto* p : params) p->zero_grad();
        disc.r1_penalty(x, 1.0f, true);

        auto f = [&] { return disc.r1_penalty(x, 0.0f, false); };
        for (auto* p : params) {
            if (p->name.find("bias") != std::string::npos) {
                CHECK(p->grad.abs_sum() == 0.0);  // R1 is bias-independent
                continue;
            }
            // keep eps small: R1 jumps when a weight perturbation flips a
            // LeakyReLU mask, so large steps straddle those discontinuities
            const double frac =
                testutil::gradcheck_fraction(p->value, f, p->grad, 3e-4f, 1e-3, 1e-2);
            CHECK(frac >= 0.99);
        }
    }
}

#include <complex>

#include "helpers.hpp"
#include "retarget/ffc/fft2d.hpp"

using namespace retarget;
using namespace retarget::ffc;
using testutil::rand_tensor;

namespace {

// O(N^2) reference DFT in double precision.
void naive_dft(const Tensor& x, int c, int h, int w, std::vector<std::complex<double>>& out) {
    out.assign(static_cast<size_t>(c) * h * w, {0.0, 0.0});
    for (int ci = 0; ci < c; ++ci)
        for (int ky = 0; ky < h; ++ky)
            for (int kx = 0; kx < w; ++kx) {
                std::complex<double> s{0.0, 0.0};
                for (int y = 0; y < h; ++y)
                    for (int xx = 0; xx < w; ++xx) {
                        const double ang = -2.0 * M_PI *
                                           (static_cast<double>(ky) * y / h +
                                            static_cast<double>(kx) * xx / w);
                        s += static_cast<double>(x.at(ci, y, xx)) *
                             std::complex<double>(std::cos(ang), std::sin(ang));
                    }
                out[(static_cast<size_t>(ci) * h + ky) * w + kx] = s;
            }
}

double dot(const Tensor& a, const Tensor& b) {
    double s = 0.0;
    for (int64_t i = 0; i < a.numel(); ++i) s += static_cast<double>(a[i]) * b[i];
    return s;
}

}  // namespace

TEST_SUITE("fft") {
    TEST_CASE("matches naive dft on random inputs") {
        Rng rng(7);
        std::vector<std::complex<double>> ref;
        for (int trial = 0; trial < 50; ++trial) {
            const int c = uniform_int(rng, 1, 4);
            const int h = uniform_int(rng, 1, 8);
            const int w = uniform_int(rng, 1, 8);
            const Tensor x = rand_tensor({c, h, w}, rng, -0.5f, 0.5f);
            const SpectrumTensor spec = real_fft2d(x);
            naive_dft(x, c, h, w, ref);
            const int wh = w / 2 + 1;
            for (int ci = 0; ci < c; ++ci)
                for (int ky = 0; ky < h; ++ky)
                    for (int kx = 0; kx < wh; ++kx) {
                        const auto& r = ref[(static_cast<size_t>(ci) * h + ky) * w + kx];
                        CHECK(std::abs(spec.real.at(ci, ky, kx) - r.real()) < 1e-6);
                        CHECK(std::abs(spec.imag.at(ci, ky, kx) - r.imag()) < 1e-6);
                    }
        }
    }

    TEST_CASE("dc bin of a constant 8x8 image") {
        Tensor x = Tensor::full({1, 8, 8}, 0.25f);
        const SpectrumTensor spec = real_fft2d(x);
        CHECK(spec.real.at(0, 0, 0) == doctest::Approx(64 * 0.25).epsilon(1e-9));
        CHECK(std::abs(spec.imag.at(0, 0, 0)) < 1e-9);
        // every non-DC bin vanishes for a constant image
        double off = 0.0;
        for (int ky = 0; ky < 8; ++ky)
            for (int kx = 0; kx < 5; ++kx)
                if (ky || kx)
                    off = std::max({off, std::abs(static_cast<double>(spec.real.at(0, ky, kx))),
                                    std::abs(static_cast<double>(spec.imag.at(0, ky, kx)))});
        CHECK(off < 1e-6);
    }

    TEST_CASE("round trip identity") {
        Rng rng(11);
        for (int trial = 0; trial < 20; ++trial) {
            const int c = uniform_int(rng, 1, 3);
            const int h = uniform_int(rng, 2, 16);
            const int w = uniform_int(rng, 2, 16);
            const Tensor x = rand_tensor({c, h, w}, rng);
            const Tensor back = inverse_real_fft2d(real_fft2d(x), h, w);
            CHECK(testutil::max_abs_diff(x, back) < 1e-5);
        }
    }

    TEST_CASE("fft layer backward is the exact adjoint") {
        // <A x, y> == <x, A^T y> for the linear maps both layers implement.
        Rng rng(13);
        for (int w : {6, 7}) {
            RealFFTLayer fft;
            Tensor x = rand_tensor({2, 3, 5, w}, rng);
            Tensor y = fft.forward(x, true);
            Tensor gy = rand_tensor(y.shape(), rng);
            Tensor gx = fft.backward(gy, false);
            CHECK(dot(y, gy) == doctest::Approx(dot(x, gx)).epsilon(1e-4));

            InverseRealFFTLayer ifft(w);
            Tensor xs = rand_tensor({2, 6, 5, w / 2 + 1}, rng);
            // make the packed spectrum consistent with a real signal so the
            // inverse transform is exactly linear in the stored bins
            Tensor real_src = rand_tensor({2, 3, 5, w}, rng);
            RealFFTLayer packer;
            xs = packer.forward(real_src, true);
            Tensor ys = ifft.forward(xs, true);
            CHECK(testutil::max_abs_diff(ys, real_src) < 1e-4);
            Tensor gys = rand_tensor(ys.shape(), rng);
            Tensor gxs = ifft.backward(gys, false);
            // adjoint identity restricted to reachable (Hermitian) spectra:
            // probe with a second real signal's spectrum
            Tensor probe_real = rand_tensor({2, 3, 5, w}, rng);
            Tensor probe_spec = packer.forward(probe_real, true);
            const Tensor probe_spatial = ifft.forward(probe_spec, true);
            CHECK(dot(probe_spatial, gys) == doctest::Approx(dot(probe_spec, gxs)).epsilon(1e-4));
        }
    }
}

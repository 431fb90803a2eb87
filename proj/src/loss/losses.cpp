#include "retarget/loss/losses.hpp"

#include <cmath>

#include "retarget/core/error.hpp"

namespace retarget::loss {

namespace {
constexpr double kProbEps = 1e-7;

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }
}  // namespace

void LossWeights::validate() const {
    if (kappa < 0 || alpha < 0 || beta < 0 || gamma < 0)
        throw ModuleError("losses", "loss weights must be non-negative");
    if (kappa == 0 && alpha == 0 && beta == 0 && gamma == 0)
        throw ModuleError("losses", "at least one loss weight must be positive");
}

HrfplResult hrf_perceptual_loss(const Tensor& ground_truth, const Tensor& prediction,
                                PerceptualBackbone& backbone, bool with_grad) {
    if (!ground_truth.same_shape(prediction))
        throw ModuleError("losses", "hrf perceptual loss: shape mismatch " +
                                        ground_truth.shape_str() + " vs " +
                                        prediction.shape_str());
    const std::vector<Tensor> f_gt = backbone.forward(ground_truth);
    const std::vector<Tensor> f_pred = backbone.forward(prediction);

    HrfplResult res;
    const size_t layers = f_gt.size();
    std::vector<Tensor> feature_grads(layers);
    for (size_t l = 0; l < layers; ++l) {
        const Tensor& a = f_gt[l];
        const Tensor& b = f_pred[l];
        double s = 0.0;
        for (int64_t i = 0; i < a.numel(); ++i) {
            const double d = static_cast<double>(b[i]) - a[i];
            s += d * d;
        }
        res.value += s / static_cast<double>(a.numel());
        if (with_grad) {
            Tensor g(b.shape());
            const float scale = 2.0f / (static_cast<float>(a.numel()) * layers);
            for (int64_t i = 0; i < a.numel(); ++i) g[i] = scale * (b[i] - a[i]);
            feature_grads[l] = std::move(g);
        }
    }
    res.value /= static_cast<double>(layers);
    if (with_grad) res.grad_prediction = backbone.backward(feature_grads);
    return res;
}

AdversarialResult adversarial_losses(const Tensor& real_logits, const Tensor& fake_logits,
                                     bool with_grad) {
    AdversarialResult res;
    const int64_t nr = real_logits.numel(), nf = fake_logits.numel();
    if (with_grad) {
        res.d_ld_real = Tensor(real_logits.shape());
        res.d_ld_fake = Tensor(fake_logits.shape());
        res.d_lg_fake = Tensor(fake_logits.shape());
    }
    double ld = 0.0;
    for (int64_t i = 0; i < nr; ++i) {
        const double p = sigmoid(real_logits[i]);
        const bool clamped = p < kProbEps;
        ld += -std::log(std::max(p, kProbEps));
        if (with_grad) res.d_ld_real[i] = clamped ? 0.0f : static_cast<float>((p - 1.0) / nr);
    }
    ld /= static_cast<double>(nr);
    double ld_fake = 0.0, lg = 0.0;
    for (int64_t i = 0; i < nf; ++i) {
        const double p = sigmoid(fake_logits[i]);
        const bool hi = (1.0 - p) < kProbEps;
        const bool lo = p < kProbEps;
        ld_fake += -std::log(std::max(1.0 - p, kProbEps));
        lg += -std::log(std::max(p, kProbEps));
        if (with_grad) {
            res.d_ld_fake[i] = hi ? 0.0f : static_cast<float>(p / nf);
            res.d_lg_fake[i] = lo ? 0.0f : static_cast<float>((p - 1.0) / nf);
        }
    }
    res.l_d = ld + ld_fake / static_cast<double>(nf);
    res.l_g = lg / static_cast<double>(nf);
    return res;
}

double compose_adversarial(double l_d, double l_g) { return l_d + l_g; }

FeatureMatchResult feature_matching_loss(const std::vector<Tensor>& real_feats,
                                         const std::vector<Tensor>& fake_feats,
                                         bool with_grad) {
    if (real_feats.size() != fake_feats.size())
        throw ModuleError("losses", "feature matching: layer count mismatch");
    FeatureMatchResult res;
    const size_t layers = real_feats.size();
    if (layers == 0) throw ModuleError("losses", "feature matching: empty feature lists");
    res.grads_fake.resize(layers);
    for (size_t l = 0; l < layers; ++l) {
        const Tensor& a = real_feats[l];
        const Tensor& b = fake_feats[l];
        if (!a.same_shape(b))
            throw ModuleError("losses", "feature matching: shape mismatch at layer " +
                                            std::to_string(l));
        double s = 0.0;
        for (int64_t i = 0; i < a.numel(); ++i) s += std::abs(static_cast<double>(b[i]) - a[i]);
        res.value += s / static_cast<double>(a.numel());
        if (with_grad) {
            Tensor g(b.shape());
            const float scale = 1.0f / (static_cast<float>(a.numel()) * layers);
            for (int64_t i = 0; i < a.numel(); ++i) {
                const float d = b[i] - a[i];
                g[i] = d > 0 ? scale : (d < 0 ? -scale : 0.0f);
            }
            res.grads_fake[l] = std::move(g);
        }
    }
    res.value /= static_cast<double>(layers);
    return res;
}

double r1_penalty(const Tensor& real_batch, retarget::net::Discriminator& disc) {
    return disc.r1_penalty(real_batch, 0.0f, false);
}

double final_loss(double l_adv, double l_hrfpl, double l_discpl, double r1,
                  const LossWeights& w) {
    w.validate();
    const struct { const char* name; double v; } terms[] = {
        {"L_Adv", l_adv}, {"L_HRFPL", l_hrfpl}, {"L_DiscPL", l_discpl}, {"R1", r1}};
    for (const auto& t : terms)
        if (!std::isfinite(t.v))
            throw ModuleError("losses", std::string("non-finite loss component ") + t.name);
    return w.kappa * l_adv + w.alpha * l_hrfpl + w.beta * l_discpl + w.gamma * r1;
}

}  // namespace retarget::loss

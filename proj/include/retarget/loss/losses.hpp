#pragma once

#include <vector>

#include "retarget/loss/perceptual.hpp"
#include "retarget/net/discriminator.hpp"

namespace retarget::loss {

// Weights of the final objective: kappa * L_Adv + alpha * L_HRFPL +
// beta * L_DiscPL + gamma * R1.
struct LossWeights {
    double kappa = 10.0;
    double alpha = 30.0;
    double beta = 100.0;
    double gamma = 0.001;

    void validate() const;  // all >= 0, at least one > 0
};

struct HrfplResult {
    double value = 0.0;
    Tensor grad_prediction;  // empty unless with_grad
};

// Two-stage mean of squared feature differences between ground truth and
// prediction under a frozen backbone: per-layer mean, then mean over layers.
// Gradient flows to the prediction only.
HrfplResult hrf_perceptual_loss(const Tensor& ground_truth, const Tensor& prediction,
                                PerceptualBackbone& backbone, bool with_grad = false);

struct AdversarialResult {
    double l_d = 0.0;  // -mean log s(real) - mean log(1 - s(fake))
    double l_g = 0.0;  // -mean log s(fake), non-saturating
    Tensor d_ld_real;  // dL_D / d(real logits)
    Tensor d_ld_fake;  // dL_D / d(fake logits)
    Tensor d_lg_fake;  // dL_G / d(fake logits)
};

// Logits are raw; sigmoid with 1e-7 probability clamping is applied here.
AdversarialResult adversarial_losses(const Tensor& real_logits, const Tensor& fake_logits,
                                     bool with_grad = false);

// Forward value of the composed adversarial objective. The stop-gradient
// routing (generator sees only L_G, discriminator only L_D) is realized by
// which gradient tensors feed which optimizer; see Trainer.
double compose_adversarial(double l_d, double l_g);

struct FeatureMatchResult {
    double value = 0.0;
    std::vector<Tensor> grads_fake;  // per feature map, empty unless with_grad
};

// Mean over layers of the mean absolute difference between discriminator
// features of real and generated images. Real features are constants.
FeatureMatchResult feature_matching_loss(const std::vector<Tensor>& real_feats,
                                         const std::vector<Tensor>& fake_feats,
                                         bool with_grad = false);

// Convenience wrapper over Discriminator::r1_penalty (value only).
double r1_penalty(const Tensor& real_batch, retarget::net::Discriminator& disc);

// Exact weighted sum; throws naming the offending term on non-finite input.
double final_loss(double l_adv, double l_hrfpl, double l_discpl, double r1,
                  const LossWeights& w);

}  // namespace retarget::loss

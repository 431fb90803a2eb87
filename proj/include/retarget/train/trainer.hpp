#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "retarget/data/dataset.hpp"
#include "retarget/data/pair_synth.hpp"
#include "retarget/loss/losses.hpp"
#include "retarget/loss/perceptual.hpp"
#include "retarget/net/discriminator.hpp"
#include "retarget/net/generator.hpp"
#include "retarget/train/adam.hpp"
#include "retarget/train/config.hpp"

namespace retarget::train {

struct StepMetrics {
    int64_t step = 0;
    int epoch = 0;
    double l_d = 0, l_g = 0, l_adv = 0, l_hrfpl = 0, l_discpl = 0, r1 = 0, l_final = 0;
};

std::string metrics_header();
std::string metrics_line(const StepMetrics& m);

// Alternating GAN trainer. Per step: discriminator update driven by
// kappa*L_D + gamma*R1, then a generator update (fresh forward) driven by
// kappa*L_G + alpha*L_HRFPL + beta*L_DiscPL. This split is what gives the
// composed adversarial objective its stop-gradient semantics: each optimizer
// only ever sees the gradient of its own term.
class Trainer {
public:
    explicit Trainer(const TrainConfig& cfg);

    // One optimization step on an assembled batch; sample_ids only feed error
    // diagnostics. Throws on non-finite losses.
    StepMetrics train_step(const std::vector<data::PairedSample>& batch,
                           const std::vector<std::string>& sample_ids = {});

    // Full loop over the index; returns the final checkpoint path.
    std::string train(const data::DatasetIndex& index, data::AnnotationProvider& provider,
                      std::ostream& log);

    data::PairedSample synthesize_for(const std::string& image_path,
                                      data::AnnotationProvider& provider, int epoch,
                                      int64_t sample_id) const;

    void save(const std::string& path);
    void resume_from(const std::string& path);

    net::Generator& generator() { return gen_; }
    net::Discriminator& discriminator() { return disc_; }
    loss::PerceptualBackbone& backbone() { return backbone_; }
    int64_t step() const { return step_; }
    const TrainConfig& config() const { return cfg_; }

private:
    TrainConfig cfg_;
    net::Generator gen_;
    net::Discriminator disc_;
    loss::DilatedPyramidBackbone backbone_;
    Adam adam_g_, adam_d_;
    int64_t step_ = 0;
    int epoch_ = 0;
};

}  // namespace retarget::train

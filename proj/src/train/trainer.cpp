#include "retarget/train/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include "retarget/core/error.hpp"
#include "retarget/core/image_io.hpp"
#include "retarget/core/rng.hpp"
#include "retarget/net/checkpoint.hpp"

namespace retarget::train {

namespace fs = std::filesystem;

std::string metrics_header() {
    return "step\tepoch\tL_D\tL_G\tL_Adv\tL_HRFPL\tL_DiscPL\tR1\tL_final";
}

std::string metrics_line(const StepMetrics& m) {
    std::ostringstream ss;
    ss.precision(10);
    ss << m.step << '\t' << m.epoch << '\t' << m.l_d << '\t' << m.l_g << '\t' << m.l_adv << '\t'
       << m.l_hrfpl << '\t' << m.l_discpl << '\t' << m.r1 << '\t' << m.l_final;
    return ss.str();
}

namespace {

void zero_grads(const std::vector<retarget::nn::Param*>& params) {
    for (auto* p : params) p->zero_grad();
}

Tensor stack_inputs(const std::vector<data::PairedSample>& batch) {
    std::vector<Tensor> t;
    t.reserve(batch.size());
    for (const auto& s : batch) t.push_back(s.model_input);
    return stack_samples(t);
}

Tensor stack_gts(const std::vector<data::PairedSample>& batch) {
    std::vector<Tensor> t;
    t.reserve(batch.size());
    for (const auto& s : batch) t.push_back(s.ground_truth);
    return stack_samples(t);
}

}  // namespace

Trainer::Trainer(const TrainConfig& cfg)
    : cfg_(cfg),
      gen_(cfg.gen),
      disc_(cfg.disc),
      backbone_(derive_seed(cfg.seed, 0x70657263ULL), cfg.perceptual_width),
      adam_g_(cfg.lr_generator),
      adam_d_(cfg.lr_discriminator) {
    cfg_.validate();
    gen_.init(derive_seed(cfg_.seed, 0x67656eULL));
    disc_.init(derive_seed(cfg_.seed, 0x64697363ULL));
    adam_g_.attach(gen_.params());
    adam_d_.attach(disc_.params());
}

StepMetrics Trainer::train_step(const std::vector<data::PairedSample>& batch,
                                const std::vector<std::string>& sample_ids) {
    if (batch.empty()) throw ModuleError("trainer", "empty batch");
    const Tensor input = stack_inputs(batch);
    const Tensor real = stack_gts(batch);

    const double kappa = cfg_.weights.kappa;
    const double alpha = cfg_.weights.alpha;
    const double beta = cfg_.weights.beta;
    const double gamma = cfg_.weights.gamma;

    StepMetrics m;
    m.step = step_ + 1;
    m.epoch = epoch_;

    // --- discriminator phase: kappa * L_D + gamma * R1 ---
    auto d_params = disc_.params();
    zero_grads(d_params);

    Tensor fake = gen_.forward(input, true);
    Tensor real_logits = disc_.forward_logits(real, true);
    Tensor fake_logits = disc_.forward_logits(fake, true);  // overwrites real caches
    auto adv_d = loss::adversarial_losses(real_logits, fake_logits, true);
    m.l_d = adv_d.l_d;

    {
        std::vector<Tensor> fg(disc_.config().n_layers + 1);
        fg.back() = adv_d.d_ld_fake;
        fg.back().scale_(static_cast<float>(kappa));
        disc_.backward_from(fg, true);
    }

    disc_.forward_logits(real, true);  // repopulate caches for the real-side backward
    {
        std::vector<Tensor> fg(disc_.config().n_layers + 1);
        fg.back() = adv_d.d_ld_real;
        fg.back().scale_(static_cast<float>(kappa));
        disc_.backward_from(fg, true);
    }
    m.r1 = disc_.r1_penalty(real, static_cast<float>(gamma), true);
    adam_d_.step(d_params);

    // --- generator phase: kappa * L_G + alpha * L_HRFPL + beta * L_DiscPL ---
    auto g_params = gen_.params();
    zero_grads(g_params);

    Tensor fake2 = gen_.forward(input, true);
    net::Discriminator::Output real_out = disc_.forward(real, true);
    net::Discriminator::Output fake_out = disc_.forward(fake2, true);
    auto adv_g = loss::adversarial_losses(real_out.logits, fake_out.logits, true);
    auto fm = loss::feature_matching_loss(real_out.features, fake_out.features, true);
    m.l_g = adv_g.l_g;
    m.l_discpl = fm.value;

    std::vector<Tensor> fg(fake_out.features.size());
    for (size_t i = 0; i < fg.size(); ++i) {
        fg[i] = fm.grads_fake[i];
        fg[i].scale_(static_cast<float>(beta));
    }
    fg.back().axpy_(static_cast<float>(kappa), adv_g.d_lg_fake);
    Tensor grad_fake = disc_.backward_from(fg, false);

    auto hrf = loss::hrf_perceptual_loss(real, fake2, backbone_, true);
    m.l_hrfpl = hrf.value;
    grad_fake.axpy_(static_cast<float>(alpha), hrf.grad_prediction);

    gen_.backward(grad_fake, true);
    adam_g_.step(g_params);

    m.l_adv = loss::compose_adversarial(m.l_d, m.l_g);
    m.l_final = loss::final_loss(m.l_adv, m.l_hrfpl, m.l_discpl, m.r1, cfg_.weights);
    const double vals[] = {m.l_d, m.l_g, m.l_hrfpl, m.l_discpl, m.r1, m.l_final};
    for (double v : vals)
        if (!std::isfinite(v)) {
            std::string ids;
            for (const auto& s : sample_ids) ids += (ids.empty() ? "" : ",") + s;
            throw ModuleError("trainer", "non-finite loss at step " + std::to_string(m.step) +
                                             (ids.empty() ? "" : " (batch: " + ids + ")"));
        }
    ++step_;
    return m;
}

data::PairedSample Trainer::synthesize_for(const std::string& image_path,
                                           data::AnnotationProvider& provider, int epoch,
                                           int64_t sample_id) const {
    Tensor img = load_image_rgb(image_path, "dataset_pipeline");
    auto ann = provider.annotate(image_path, img);
    if (!ann)
        throw ModuleError("dataset_pipeline", "annotation no longer resolvable for " + image_path);
    data::prescale_to_canvas(img, *ann, cfg_.canvas);
    const data::AugParams aug = data::sample_aug_params(
        derive_seed(cfg_.seed, static_cast<uint64_t>(epoch), static_cast<uint64_t>(sample_id)),
        img.dim(1), img.dim(2), ann->bbox);
    data::SynthConfig sc;
    sc.shift_jitter = cfg_.shift_jitter;
    return data::synthesize_pair(img, *ann, aug, cfg_.canvas, sc);
}

std::string Trainer::train(const data::DatasetIndex& index, data::AnnotationProvider& provider,
                           std::ostream& log) {
    if (index.samples.empty()) throw ModuleError("trainer", "empty dataset index");

    fs::create_directories(cfg_.checkpoint_dir);
    const fs::path probe = fs::path(cfg_.checkpoint_dir) / ".write_probe";
    {
        std::ofstream p(probe, std::ios::binary);
        p << "ok";
        if (!p) throw ModuleError("trainer", "checkpoint directory not writable: " + cfg_.checkpoint_dir);
    }
    fs::remove(probe);

    const int64_t n = static_cast<int64_t>(index.samples.size());
    const int64_t steps_per_epoch = (n + cfg_.batch_size - 1) / cfg_.batch_size;
    const int epoch0 = static_cast<int>(step_ / steps_per_epoch);
    const int64_t batch0 = step_ % steps_per_epoch;

    if (step_ == 0) log << metrics_header() << '\n';

    for (int epoch = epoch0; epoch < cfg_.epochs; ++epoch) {
        epoch_ = epoch;
        std::vector<int64_t> order(n);
        std::iota(order.begin(), order.end(), 0);
        Rng shuffle_rng(derive_seed(cfg_.seed, 0x7368756645ULL, static_cast<uint64_t>(epoch)));
        std::shuffle(order.begin(), order.end(), shuffle_rng);

        for (int64_t b = (epoch == epoch0 ? batch0 : 0); b < steps_per_epoch; ++b) {
            std::vector<data::PairedSample> batch;
            std::vector<std::string> ids;
            const int64_t lo = b * cfg_.batch_size, hi = std::min(n, lo + cfg_.batch_size);
            for (int64_t i = lo; i < hi; ++i) {
                const auto& entry = index.samples[static_cast<size_t>(order[i])];
                batch.push_back(synthesize_for(entry.image_path, provider, epoch, order[i]));
                ids.push_back(entry.image_path);
            }
            const StepMetrics m = train_step(batch, ids);
            log << metrics_line(m) << '\n';
            log.flush();
            if (step_ % cfg_.checkpoint_every == 0)
                save((fs::path(cfg_.checkpoint_dir) / ("ckpt_" + std::to_string(step_) + ".ckpt"))
                         .string());
            if (cfg_.max_steps > 0 && step_ >= cfg_.max_steps) {
                const std::string out =
                    (fs::path(cfg_.checkpoint_dir) / "model_final.ckpt").string();
                save(out);
                return out;
            }
        }
    }
    const std::string out = (fs::path(cfg_.checkpoint_dir) / "model_final.ckpt").string();
    save(out);
    return out;
}

void Trainer::save(const std::string& path) {
    net::CheckpointMeta meta;
    meta.gen_config = cfg_.gen;
    meta.disc_config = cfg_.disc;
    meta.has_discriminator = true;
    meta.epoch = epoch_;
    meta.step = step_;
    meta.seed = cfg_.seed;
    meta.generator_param_count = gen_.param_count();

    std::vector<net::TensorEntry> entries;
    const auto gp = gen_.params();
    const auto gb = gen_.buffers();
    const auto dp = disc_.params();
    for (const auto* p : gp) entries.push_back({"generator", p->name, &p->value});
    for (const auto& b : gb) entries.push_back({"buffer", b.first, b.second});
    for (const auto* p : dp) entries.push_back({"discriminator", p->name, &p->value});

    Tensor tg({1}), td({1});
    tg[0] = static_cast<float>(adam_g_.t());
    td[0] = static_cast<float>(adam_d_.t());
    entries.push_back({"optimizer", "adam_g.t", &tg});
    entries.push_back({"optimizer", "adam_d.t", &td});
    for (size_t i = 0; i < gp.size(); ++i) {
        entries.push_back({"optimizer", "adam_g.m." + gp[i]->name, &adam_g_.first_moments()[i]});
        entries.push_back({"optimizer", "adam_g.v." + gp[i]->name, &adam_g_.second_moments()[i]});
    }
    for (size_t i = 0; i < dp.size(); ++i) {
        entries.push_back({"optimizer", "adam_d.m." + dp[i]->name, &adam_d_.first_moments()[i]});
        entries.push_back({"optimizer", "adam_d.v." + dp[i]->name, &adam_d_.second_moments()[i]});
    }
    net::save_checkpoint(path, meta, entries);
}

void Trainer::resume_from(const std::string& path) {
    const net::LoadedCheckpoint ckpt = net::load_checkpoint(path);
    if (!ckpt.meta.has_discriminator)
        throw ModuleError("trainer", "checkpoint " + path +
                                         " is inference-only (no discriminator); cannot resume");
    auto restore = [&](const std::string& section, retarget::nn::Param* p) {
        const Tensor& t = ckpt.require(section, p->name);
        if (!t.same_shape(p->value))
            throw ModuleError("trainer", "shape mismatch restoring " + section + "/" + p->name);
        p->value = t;
    };
    for (auto* p : gen_.params()) restore("generator", p);
    for (auto* p : disc_.params()) restore("discriminator", p);
    for (auto& b : gen_.buffers()) {
        const Tensor& t = ckpt.require("buffer", b.first);
        if (!t.same_shape(*b.second))
            throw ModuleError("trainer", "shape mismatch restoring buffer " + b.first);
        *b.second = t;
    }
    const auto gp = gen_.params();
    const auto dp = disc_.params();
    for (size_t i = 0; i < gp.size(); ++i) {
        adam_g_.first_moments()[i] = ckpt.require("optimizer", "adam_g.m." + gp[i]->name);
        adam_g_.second_moments()[i] = ckpt.require("optimizer", "adam_g.v." + gp[i]->name);
    }
    for (size_t i = 0; i < dp.size(); ++i) {
        adam_d_.first_moments()[i] = ckpt.require("optimizer", "adam_d.m." + dp[i]->name);
        adam_d_.second_moments()[i] = ckpt.require("optimizer", "adam_d.v." + dp[i]->name);
    }
    adam_g_.set_t(static_cast<int64_t>(ckpt.require("optimizer", "adam_g.t")[0]));
    adam_d_.set_t(static_cast<int64_t>(ckpt.require("optimizer", "adam_d.t")[0]));
    step_ = ckpt.meta.step;
    epoch_ = ckpt.meta.epoch;
}

}  // namespace retarget::train

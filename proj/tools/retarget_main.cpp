#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "retarget/core/error.hpp"
#include "retarget/core/image_io.hpp"
#include "retarget/core/rng.hpp"
#include "retarget/data/pair_synth.hpp"
#include "retarget/eval/grid.hpp"
#include "retarget/eval/metrics.hpp"
#include "retarget/eval/scorers.hpp"
#include "retarget/infer/retarget.hpp"
#include "retarget/net/checkpoint.hpp"
#include "retarget/seam/seam_carving.hpp"
#include "retarget/train/trainer.hpp"

namespace fs = std::filesystem;
using retarget::ModuleError;
using retarget::Rect;
using retarget::Tensor;

namespace {

Rect parse_rect(const std::string& s, const std::string& flag) {
    Rect r;
    char c1, c2, c3;
    std::istringstream ss(s);
    if (!(ss >> r.left >> c1 >> r.top >> c2 >> r.width >> c3 >> r.height) || c1 != ',' ||
        c2 != ',' || c3 != ',')
        throw ModuleError("cli", flag + " expects left,top,width,height");
    return r;
}

std::string default_ckpt_dir() {
    const char* env = std::getenv("RETARGET_CKPT_DIR");
    return env ? env : "checkpoints";
}

int run(int argc, char** argv) {
    CLI::App app{"Content-aware image retargeting toolkit"};
    app.require_subcommand(1);
    uint64_t seed = 0;
    app.add_option("--seed", seed, "Global RNG seed")->capture_default_str();

    // ---- prepare-data ----
    auto* prep = app.add_subcommand("prepare-data", "Index a dataset and optionally dump pairs");
    std::string prep_root, prep_provider = "files", prep_cmd, prep_out = "pairs";
    int prep_canvas = 512, prep_dump = 0;
    prep->add_option("--root", prep_root, "Dataset root (images/, bounding_boxes.txt, segmentations/)")
        ->required();
    prep->add_option("--provider", prep_provider, "Annotation provider: files|model")
        ->capture_default_str();
    prep->add_option("--annotation-cmd", prep_cmd, "External command for the 'model' provider");
    prep->add_option("--canvas", prep_canvas, "Training canvas size")->capture_default_str();
    prep->add_option("--dump", prep_dump, "Materialize N synthesized pairs for inspection")
        ->capture_default_str();
    prep->add_option("--out", prep_out, "Output directory for --dump")->capture_default_str();

    // ---- train ----
    auto* train = app.add_subcommand("train", "Train the retargeting model");
    std::string train_config;
    std::vector<std::string> train_sets;
    train->add_option("--config", train_config, "Flat key=value config file");
    train->add_option("--set", train_sets,
                      "Override any config key, e.g. --set batch_size=2 (repeatable)");
    std::string train_root, train_ckpt_dir, train_resume, train_log;
    train->add_option("--root", train_root, "Dataset root (overrides data_root)");
    train->add_option("--ckpt-dir", train_ckpt_dir, "Checkpoint directory")
        ->default_str(default_ckpt_dir());
    train->add_option("--resume", train_resume, "Checkpoint to resume from");
    train->add_option("--log", train_log, "Loss log path (default: stdout)");

    // ---- retarget ----
    auto* ret = app.add_subcommand("retarget", "Retarget an image with a trained model");
    std::string ret_in, ret_out, ret_ckpt, ret_mask, ret_bbox, ret_dump_masks, ret_ann_root;
    int ret_w = 0, ret_h = 0;
    int obj_left = -1, obj_top = -1, obj_w = -1, obj_h = -1;
    ret->add_option("--in", ret_in, "Input image")->required();
    ret->add_option("--out", ret_out, "Output image (PNG recommended)")->required();
    ret->add_option("--width", ret_w, "Target width")->required();
    ret->add_option("--height", ret_h, "Target height")->required();
    ret->add_option("--ckpt", ret_ckpt, "Model checkpoint")->required();
    ret->add_option("--object-left", obj_left, "Object placement: left edge on the target canvas");
    ret->add_option("--object-top", obj_top, "Object placement: top edge");
    ret->add_option("--object-width", obj_w, "Object placement: width");
    ret->add_option("--object-height", obj_h, "Object placement: height");
    ret->add_option("--bbox", ret_bbox, "Manual object bbox 'left,top,width,height'");
    ret->add_option("--mask-file", ret_mask, "Explicit segmentation mask PNG");
    ret->add_option("--ann-root", ret_ann_root, "Dataset root for the 'files' annotation provider");
    ret->add_option("--dump-masks", ret_dump_masks, "Directory to write conditioning masks");

    // ---- seam-carve ----
    auto* sc = app.add_subcommand("seam-carve", "Classical seam-carving baseline");
    std::string sc_in, sc_out;
    int sc_w = 0, sc_h = 0;
    bool sc_height_first = false;
    sc->add_option("--in", sc_in, "Input image")->required();
    sc->add_option("--out", sc_out, "Output image")->required();
    sc->add_option("--width", sc_w, "Target width")->required();
    sc->add_option("--height", sc_h, "Target height")->required();
    sc->add_flag("--height-first", sc_height_first, "Resize height before width");

    // ---- evaluate ----
    auto* ev = app.add_subcommand("evaluate", "Score an output image");
    std::string ev_img, ev_ref, ev_method = "ours", ev_scorer = "sharpness", ev_out;
    ev->add_option("--image", ev_img, "Image to score")->required();
    ev->add_option("--ref", ev_ref, "Ground-truth reference (enables PSNR/SSIM)");
    ev->add_option("--method", ev_method, "Method label for the results table")
        ->capture_default_str();
    ev->add_option("--scorer", ev_scorer, "No-reference scorer id")->capture_default_str();
    ev->add_option("--out", ev_out, "Write the TSV table here instead of stdout");

    // ---- grid ----
    auto* gr = app.add_subcommand("grid", "Write a labelled comparison grid");
    std::vector<std::string> gr_entries;
    std::string gr_out;
    gr->add_option("--entry", gr_entries, "label=image_path (repeatable)")->required();
    gr->add_option("--out", gr_out, "Output grid image")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n\n" << app.help() << std::endl;
        return 1;
    }

    if (*prep) {
        auto provider = retarget::data::make_provider(prep_provider, prep_root, prep_cmd);
        auto index = retarget::data::load_dataset(prep_root, *provider, prep_canvas);
        std::cout << "samples\t" << index.samples.size() << "\nskipped\t" << index.skipped
                  << "\ncanvas\t" << index.canvas_size << std::endl;
        if (prep_dump > 0) {
            fs::create_directories(prep_out);
            retarget::train::TrainConfig cfg;
            cfg.seed = seed;
            cfg.canvas = prep_canvas;
            const int n = std::min<int>(prep_dump, static_cast<int>(index.samples.size()));
            for (int i = 0; i < n; ++i) {
                const auto& entry = index.samples[static_cast<size_t>(i)];
                Tensor img = retarget::load_image_rgb(entry.image_path, "dataset_pipeline");
                auto ann = provider->annotate(entry.image_path, img);
                if (!ann) continue;
                retarget::data::prescale_to_canvas(img, *ann, prep_canvas);
                const auto aug = retarget::data::sample_aug_params(
                    retarget::derive_seed(seed, 0, static_cast<uint64_t>(i)), img.dim(1),
                    img.dim(2), ann->bbox);
                auto pair = retarget::data::synthesize_pair(img, *ann, aug, prep_canvas);
                const std::string stem = (fs::path(prep_out) / std::to_string(i)).string();
                retarget::save_image_rgb(retarget::channel_slice(pair.model_input, 0, 3),
                                         stem + "_input.png", "dataset_pipeline");
                retarget::save_image_rgb(retarget::channel_slice(pair.model_input, 3, 6),
                                         stem + "_mask.png", "dataset_pipeline");
                retarget::save_image_rgb(pair.ground_truth, stem + "_gt.png", "dataset_pipeline");
            }
        }
        return 0;
    }

    if (*train) {
        retarget::train::TrainConfig cfg;
        cfg.checkpoint_dir = default_ckpt_dir();
        if (!train_config.empty()) cfg = retarget::train::load_train_config(train_config);
        for (const auto& kv : train_sets) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos)
                throw ModuleError("cli", "--set expects key=value, got '" + kv + "'");
            retarget::train::apply_config_key(cfg, kv.substr(0, eq), kv.substr(eq + 1));
        }
        if (seed != 0) cfg.seed = seed;
        if (!train_root.empty()) cfg.data_root = train_root;
        if (!train_ckpt_dir.empty()) cfg.checkpoint_dir = train_ckpt_dir;
        if (!train_resume.empty()) cfg.resume = train_resume;
        if (!train_log.empty()) cfg.log_path = train_log;
        if (cfg.data_root.empty())
            throw ModuleError("trainer", "no dataset root given (data_root key or --root)");

        auto provider =
            retarget::data::make_provider(cfg.annotation_provider, cfg.data_root, "");
        auto index = retarget::data::load_dataset(cfg.data_root, *provider, cfg.canvas);
        retarget::train::Trainer trainer(cfg);
        if (!cfg.resume.empty()) trainer.resume_from(cfg.resume);
        std::ofstream log_file;
        if (!cfg.log_path.empty()) {
            log_file.open(cfg.log_path, std::ios::app);
            if (!log_file) throw ModuleError("trainer", "cannot open log file " + cfg.log_path);
        }
        std::ostream& log = cfg.log_path.empty() ? std::cout : log_file;
        const std::string final_ckpt = trainer.train(index, *provider, log);
        std::cout << "checkpoint\t" << final_ckpt << std::endl;
        return 0;
    }

    if (*ret) {
        const auto ckpt = retarget::net::load_checkpoint(ret_ckpt);
        retarget::net::Generator gen = retarget::net::restore_generator(ckpt);
        Tensor img = retarget::load_image_rgb(ret_in, "retarget_inference");

        retarget::infer::RetargetOptions opt;
        if (!ret_bbox.empty()) opt.manual_bbox = parse_rect(ret_bbox, "--bbox");
        opt.mask_file = ret_mask;
        opt.dump_masks_dir = ret_dump_masks;
        if (obj_left >= 0 || obj_top >= 0 || obj_w > 0 || obj_h > 0) {
            if (obj_left < 0 || obj_top < 0 || obj_w < 1 || obj_h < 1)
                throw ModuleError("cli",
                                  "--object-left/top/width/height must all be given together");
            opt.object_rect = Rect{obj_left, obj_top, obj_w, obj_h};
        }
        std::shared_ptr<retarget::data::AnnotationProvider> provider;
        if (!ret_ann_root.empty())
            provider = retarget::data::make_provider("files", ret_ann_root, "");

        Tensor out = retarget::infer::retarget_image(img, ret_in, ret_w, ret_h, gen,
                                                     provider.get(), opt);
        retarget::save_image_rgb(out, ret_out, "retarget_inference");
        return 0;
    }

    if (*sc) {
        Tensor img = retarget::load_image_rgb(sc_in, "seam_carving_baseline");
        Tensor out = retarget::seam::seam_retarget(img, sc_w, sc_h, sc_height_first);
        retarget::save_image_rgb(out, sc_out, "seam_carving_baseline");
        return 0;
    }

    if (*ev) {
        Tensor img = retarget::load_image_rgb(ev_img, "evaluation");
        retarget::eval::ScorerRegistry registry;
        const auto nr = registry.score(img, ev_scorer);
        std::string psnr_s = "-", ssim_s = "-";
        if (!ev_ref.empty()) {
            Tensor ref = retarget::load_image_rgb(ev_ref, "evaluation");
            const auto fr = retarget::eval::full_reference(ref, img);
            std::ostringstream p, s;
            p.precision(6);
            s.precision(6);
            p << fr.psnr;
            s << fr.ssim;
            psnr_s = p.str();
            ssim_s = s.str();
        }
        std::ostringstream table;
        table << "image\tmethod\ttarget\tpsnr\tssim\tnr_score\tscorer_id\n";
        table.precision(6);
        table << ev_img << '\t' << ev_method << '\t' << img.dim(2) << 'x' << img.dim(1) << '\t'
              << psnr_s << '\t' << ssim_s << '\t' << nr.score << '\t' << nr.scorer_id << '-'
              << nr.scorer_version << '\n';
        if (ev_out.empty()) {
            std::cout << table.str();
        } else {
            std::ofstream f(ev_out);
            if (!f) throw ModuleError("evaluation", "cannot write " + ev_out);
            f << table.str();
        }
        return 0;
    }

    if (*gr) {
        std::vector<retarget::eval::GridEntry> entries;
        for (const auto& e : gr_entries) {
            const auto eq = e.find('=');
            if (eq == std::string::npos)
                throw ModuleError("cli", "--entry expects label=path, got '" + e + "'");
            retarget::eval::GridEntry ge;
            ge.label = e.substr(0, eq);
            ge.image = retarget::load_image_rgb(e.substr(eq + 1), "evaluation");
            entries.push_back(std::move(ge));
        }
        retarget::eval::comparison_grid(entries, gr_out);
        return 0;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const ModuleError& e) {
        std::cerr << "ERROR:" << e.module() << ":" << e.what() << std::endl;
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "ERROR:cli:" << e.what() << std::endl;
        return 2;
    }
}

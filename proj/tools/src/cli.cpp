#include "cli.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "sradapt/checkpoint.hpp"
#include "sradapt/config.hpp"
#include "sradapt/dataset.hpp"
#include "sradapt/error.hpp"
#include "sradapt/pipeline.hpp"
#include "sradapt/resample.hpp"
#include "sradapt/synthetic.hpp"
#include "sradapt/trainer.hpp"

namespace sradapt {

namespace {

struct GeometryArgs {
    int width = 0;
    int height = 0;
    int depth = 8;
    std::string format = "420";

    void attach(CLI::App* app) {
        app->add_option("--w,--width", width, "Frame width")->required();
        app->add_option("--h,--height", height, "Frame height")->required();
        app->add_option("--depth", depth, "Bit depth (8 or 10)");
        app->add_option("--format", format, "Chroma format")->check(CLI::IsMember({"420", "444"}));
    }
    Geometry geometry() const {
        return {width, height, depth, format == "444" ? ChromaFormat::k444 : ChromaFormat::k420};
    }
};

CodecKind parse_codec(const std::string& s) { return s == "external" ? CodecKind::kExternal : CodecKind::kToy; }

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open " + path.string() + " for writing");
    f << text;
    if (!f) throw Error("write failed: " + path.string());
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Spatial resolution adaptation: resampling, toy coding, CNN restoration and evaluation"};
    app.set_help_flag("--help", "Print this help message and exit");  // -h is the height flag
    app.require_subcommand(1);

    // prepare
    auto* prepare = app.add_subcommand("prepare", "Build a training dataset of decoded, up-sampled pairs");
    std::vector<std::string> prep_sources;
    GeometryArgs prep_geo;
    std::vector<int> prep_qps{22, 27, 32, 37};
    std::string prep_codec = "toy", prep_pattern, prep_out;
    double prep_fps = 30.0;
    std::uint64_t prep_seed = 0;
    int qp_offset = -6;
    prepare->add_option("--source", prep_sources, "Original YUV file (repeatable)")->required();
    prep_geo.attach(prepare);
    prepare->add_option("--qps", prep_qps, "Base QPs")->delimiter(',');
    prepare->add_option("--codec", prep_codec)->check(CLI::IsMember({"toy", "external"}));
    prepare->add_option("--external-pattern", prep_pattern, "Decoded low-resolution files, {stem} and {qp} expand");
    prepare->add_option("--out-dir", prep_out)->required();
    prepare->add_option("--fps", prep_fps);
    prepare->add_option("--qp-offset", qp_offset);
    prepare->add_option("--seed", prep_seed)->required();

    // train
    auto* train = app.add_subcommand("train", "Train one QP band (stage 1 or 2)");
    std::string train_manifest, train_config_path, train_init, train_out, train_log;
    int train_band = 0;
    TrainConfig tc;
    std::optional<int> o_stage, o_epochs, o_batch, o_block, o_blocks, o_channels, o_per_band;
    std::optional<double> o_lr;
    std::optional<std::uint64_t> o_seed;
    train->add_option("--manifest", train_manifest, "Dataset manifest from prepare");
    train->add_option("--band", train_band, "QP band 1..4")->required()->check(CLI::Range(1, 4));
    train->add_option("--config", train_config_path, "key = value config file");
    train->add_option("--stage", o_stage)->check(CLI::IsMember({1, 2}));
    train->add_option("--seed", o_seed)->required();
    train->add_option("--epochs", o_epochs);
    train->add_option("--batch-size", o_batch);
    train->add_option("--block-size", o_block);
    train->add_option("--residual-blocks", o_blocks);
    train->add_option("--channels", o_channels);
    train->add_option("--blocks-per-band", o_per_band);
    train->add_option("--lr", o_lr);
    train->add_option("--init", train_init, "Stage-1 checkpoint (stage 2)");
    train->add_option("--out", train_out, "Output checkpoint")->required();
    train->add_option("--log", train_log, "Per-epoch key=value log file (default stdout)");

    // enhance
    auto* enhance = app.add_subcommand("enhance", "Up-sample and restore a decoded low-resolution sequence");
    std::string enh_in, enh_out, enh_ckpt;
    GeometryArgs enh_geo;
    TileOptions enh_tile;
    enhance->add_option("--in", enh_in)->required();
    enh_geo.attach(enhance);
    enhance->add_option("--checkpoint", enh_ckpt)->required();
    enhance->add_option("--out", enh_out)->required();
    enhance->add_option("--tile", enh_tile.tile);
    enhance->add_option("--overlap", enh_tile.overlap);

    // eval
    auto* eval = app.add_subcommand("eval", "Anchor vs adapted rate-quality evaluation");
    std::string ev_in, ev_csv, ev_report, ev_codec = "toy", ev_scores;
    GeometryArgs ev_geo;
    std::vector<std::string> ev_ckpts;
    EvalOptions ev;
    eval->add_option("--in", ev_in, "Original full-resolution YUV")->required();
    ev_geo.attach(eval);
    eval->add_option("--checkpoint", ev_ckpts, "Band checkpoint (repeatable)")->required();
    eval->add_option("--qps", ev.base_qps)->delimiter(',');
    eval->add_option("--qp-offset", ev.selector.qp_offset);
    eval->add_option("--label", ev.label);
    eval->add_option("--fps", ev.fps);
    eval->add_option("--tile", ev.tile.tile);
    eval->add_option("--overlap", ev.tile.overlap);
    eval->add_option("--codec", ev_codec)->check(CLI::IsMember({"toy", "external"}));
    eval->add_option("--anchor-decoded", ev.anchor_decoded_pattern);
    eval->add_option("--anchor-bits", ev.anchor_bits_pattern);
    eval->add_option("--adapted-decoded", ev.adapted_decoded_pattern);
    eval->add_option("--adapted-bits", ev.adapted_bits_pattern);
    eval->add_option("--scores", ev_scores, "External scores, RD CSV with anchor/adapted curves");
    eval->add_option("--csv", ev_csv, "RD CSV output");
    eval->add_option("--report", ev_report, "Report output (default stdout)");

    // bdrate
    auto* bdrate = app.add_subcommand("bdrate", "BD-rate between two RD CSV files");
    std::string bd_anchor, bd_test, bd_metric = "psnr_y", bd_anchor_label, bd_test_label;
    bdrate->add_option("--anchor", bd_anchor)->required();
    bdrate->add_option("--test", bd_test)->required();
    bdrate->add_option("--metric", bd_metric);
    bdrate->add_option("--anchor-label", bd_anchor_label, "Curve label in the anchor file (default: first)");
    bdrate->add_option("--test-label", bd_test_label, "Curve label in the test file (default: first)");

    // downsample / upsample
    auto* down = app.add_subcommand("downsample", "Lanczos3 x2 down-sampling");
    auto* up = app.add_subcommand("upsample", "Nearest-neighbour x2 up-sampling");
    std::string rs_in, rs_out;
    GeometryArgs rs_geo;
    for (auto* sc : {down, up}) {
        sc->add_option("--in", rs_in)->required();
        sc->add_option("--out", rs_out)->required();
    }
    rs_geo.attach(down);
    rs_geo.attach(up);

    // synth
    auto* synth = app.add_subcommand("synth", "Write a deterministic synthetic test clip");
    GeometryArgs syn_geo;
    int syn_frames = 3;
    std::uint64_t syn_seed = 0;
    std::string syn_out;
    syn_geo.attach(synth);
    synth->add_option("--frames", syn_frames)->check(CLI::PositiveNumber);
    synth->add_option("--seed", syn_seed)->required();
    synth->add_option("--out", syn_out)->required();

    try {
        try {
            app.parse(argc, argv);
        } catch (const CLI::ParseError& e) {
            return app.exit(e, out, err);
        }

        if (prepare->parsed()) {
            std::vector<SourceSpec> sources;
            for (const auto& s : prep_sources) sources.push_back({s, prep_geo.geometry()});
            PrepareOptions o;
            o.base_qps = prep_qps;
            o.selector.qp_offset = qp_offset;
            o.fps = prep_fps;
            o.codec = parse_codec(prep_codec);
            o.external_pattern = prep_pattern;
            o.out_dir = prep_out;
            o.seed = prep_seed;
            const auto m = prepare_dataset(sources, o);
            out << "wrote " << m.entries.size() << " entries to " << (o.out_dir / "manifest.txt").string() << "\n";
        } else if (train->parsed()) {
            if (train_manifest.empty()) throw Error("train: --manifest is required (no dataset manifest given)");
            if (!train_config_path.empty()) apply_train_config(read_key_value_file(train_config_path), tc);
            if (o_stage) tc.stage = *o_stage;
            if (o_seed) tc.seed = *o_seed;
            if (o_epochs) tc.epochs = *o_epochs;
            if (o_batch) tc.batch_size = *o_batch;
            if (o_block) tc.block_size = *o_block;
            if (o_blocks) tc.num_residual_blocks = *o_blocks;
            if (o_channels) tc.channels = *o_channels;
            if (o_per_band) tc.blocks_per_band = *o_per_band;
            if (o_lr) tc.lr = *o_lr;
            tc.validate();
            const auto manifest = read_manifest(train_manifest);
            TrainResult r = [&] {
                if (tc.stage == 1) return train_stage1(manifest, train_band, tc);
                if (train_init.empty()) throw Error("train: stage 2 needs --init with a stage-1 checkpoint");
                ModelBundle init = load_checkpoint(train_init, tc.generator_config());
                if (init.qp_band != train_band)
                    throw Error("train: --init checkpoint serves band " + std::to_string(init.qp_band) +
                                ", not " + std::to_string(train_band));
                return train_stage2(manifest, init, tc);
            }();
            std::string log;
            for (const auto& rec : r.epoch_log) log += rec.str() + "\n";
            if (train_log.empty())
                out << log;
            else
                write_text(train_log, log);
            save_checkpoint(r.bundle, train_out);
            out << "initial_loss=" << r.initial_loss << " final_loss=" << r.final_loss << " checkpoint=" << train_out
                << "\n";
        } else if (enhance->parsed()) {
            const ModelBundle bundle = load_checkpoint(enh_ckpt);
            std::vector<Frame> frames;
            for (const auto& f : read_yuv(enh_in, enh_geo.geometry())) frames.push_back(enhance_frame(f, bundle, enh_tile));
            write_yuv(frames, enh_out);
        } else if (eval->parsed()) {
            std::vector<ModelBundle> bundles;
            for (const auto& c : ev_ckpts) bundles.push_back(load_checkpoint(c));
            ev.codec = parse_codec(ev_codec);
            if (!ev_scores.empty()) ev.external_scores = ev_scores;
            const EvalResult r = run_eval(ev_in, ev_geo.geometry(), bundles, ev);
            if (!ev_csv.empty()) export_rd_csv(r.curves, ev_csv);
            if (ev_report.empty())
                out << r.report();
            else
                write_text(ev_report, r.report());
        } else if (bdrate->parsed()) {
            auto pick = [&](const std::string& path, const std::string& label) {
                for (const auto& c : import_rd_csv(path))
                    if (c.curve.metric() == bd_metric && (label.empty() || c.label == label)) return c.curve;
                throw Error("bdrate: " + path + " has no " + bd_metric + " curve" +
                            (label.empty() ? "" : " labelled " + label));
            };
            const double v = bd_rate(pick(bd_anchor, bd_anchor_label), pick(bd_test, bd_test_label));
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.2f%%", v == 0.0 ? 0.0 : v);  // no "-0.00%"
            out << buf << "\n";
        } else if (down->parsed() || up->parsed()) {
            std::vector<Frame> frames;
            for (const auto& f : read_yuv(rs_in, rs_geo.geometry()))
                frames.push_back(down->parsed() ? downsample_2x(f) : upsample_nn_2x(f));
            write_yuv(frames, rs_out);
        } else if (synth->parsed()) {
            write_yuv(synthetic_clip(syn_geo.geometry(), syn_frames, syn_seed), syn_out);
        }
        return 0;
    } catch (const std::exception& e) {
        err << "sradapt: error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace sradapt

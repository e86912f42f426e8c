// flowgen CLI: turn depth/disparity datasets into supervised optical-flow
// training tuples, augment them, classify and evaluate flows.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <map>
#include <string>

#include "flowgen/flowgen.hpp"
#include "flowgen/selftest.hpp"

namespace fs = std::filesystem;

namespace {

flowgen::FlowField read_flow_auto(const std::string& path, const std::string& format_hint = "") {
    std::string fmt = format_hint;
    if (fmt.empty()) fmt = fs::path(path).extension() == ".flo" ? "flo" : "kitti";
    return fmt == "flo" ? flowgen::read_flo(path) : flowgen::read_kitti_png(path);
}

int cmd_generate(const std::string& manifest_path, const std::string& config_path,
                 const std::string& out_dir, std::optional<std::uint64_t> seed,
                 std::optional<int> workers) {
    flowgen::GenConfig cfg =
        config_path.empty() ? flowgen::GenConfig{} : flowgen::load_gen_config(config_path);
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    if (seed) cfg.global_seed = *seed;
    if (workers) cfg.workers = *workers;

    const flowgen::DatasetManifest manifest = flowgen::load_manifest(manifest_path);
    const flowgen::GenReport report = flowgen::run_generation(manifest, cfg);

    std::printf("entries: %zu ok, %zu skipped\n", report.n_ok, report.n_skipped);
    for (const auto& [kind, count] : report.tuples_per_kind)
        std::printf("  %-20s %6zu tuples, mean mask coverage %.3f\n", kind.c_str(), count,
                    report.coverage_per_kind.at(kind));
    for (const auto& e : report.events) std::printf("note: %s\n", e.c_str());
    if (report.all_failed()) {
        std::fprintf(stderr, "error: all samples failed\n");
        return 1;
    }
    return 0;
}

int cmd_augment(const std::string& in_dir, const std::string& out_dir,
                const std::string& config_path, std::optional<std::uint64_t> seed) {
    flowgen::GenConfig cfg =
        config_path.empty() ? flowgen::GenConfig{} : flowgen::load_gen_config(config_path);
    if (seed) cfg.global_seed = *seed;
    const flowgen::GenReport report = flowgen::run_augment(in_dir, out_dir, cfg);
    std::printf("tuples: %zu written, %zu skipped\n", report.n_ok, report.n_skipped);
    for (const auto& [kind, count] : report.tuples_per_kind)
        std::printf("  %-20s %6zu\n", kind.c_str(), count);
    for (const auto& e : report.events) std::printf("note: %s\n", e.c_str());
    if (report.all_failed()) {
        std::fprintf(stderr, "error: all tuples failed\n");
        return 1;
    }
    return 0;
}

int cmd_classify(const std::string& flow_path) {
    const flowgen::FlowField flow = read_flow_auto(flow_path);
    const flowgen::ClassPosterior p = flowgen::classify(flow);
    const char* names[4] = {"flip", "rotate", "shear", "none"};
    for (int k = 0; k < 4; ++k) std::printf("%s %.6f\n", names[k], p.posterior[k]);
    std::printf("predicted %s\n", flowgen::to_string(p.predicted));
    return 0;
}

int cmd_eval(const std::string& pred_dir, const std::string& gt_dir, const std::string& format) {
    const std::string ext = format == "flo" ? ".flo" : ".png";
    std::vector<fs::path> gt_files;
    for (const auto& e : fs::directory_iterator(gt_dir))
        if (e.path().extension() == ext) gt_files.push_back(e.path());
    std::sort(gt_files.begin(), gt_files.end());
    if (gt_files.empty()) {
        std::fprintf(stderr, "error: no %s files in %s\n", ext.c_str(), gt_dir.c_str());
        return 1;
    }

    double err_sum = 0.0, outlier_sum = 0.0;
    std::size_t n_pixels = 0, n_files = 0;
    for (const auto& gt_path : gt_files) {
        const fs::path pred_path = fs::path(pred_dir) / gt_path.filename();
        if (!fs::exists(pred_path)) {
            std::printf("%s: missing prediction\n", gt_path.filename().c_str());
            continue;
        }
        const flowgen::FlowField gt = read_flow_auto(gt_path.string(), format);
        const flowgen::FlowField pred = read_flow_auto(pred_path.string(), format);
        const flowgen::EvalReport r = flowgen::evaluate_flow(pred, gt);
        std::printf("%s: EPE %.4f F1-all %.2f (%zu px)\n", gt_path.filename().c_str(), r.epe,
                    r.f1_all, r.n_valid);
        err_sum += r.epe * r.n_valid;
        outlier_sum += r.f1_all / 100.0 * r.n_valid;
        n_pixels += r.n_valid;
        ++n_files;
    }
    if (n_files == 0) {
        std::fprintf(stderr, "error: no prediction/ground-truth pairs found\n");
        return 1;
    }
    std::printf("EPE %.4f F1-all %.2f\n", err_sum / n_pixels, 100.0 * outlier_sum / n_pixels);
    return 0;
}

int cmd_inspect(const std::string& flow_path, const std::string& out_path) {
    const flowgen::FlowField flow = read_flow_auto(flow_path);
    flowgen::write_image(out_path, flowgen::visualize_flow(flow));
    std::printf("wrote %s (%dx%d)\n", out_path.c_str(), flow.width, flow.height);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"supervised optical-flow data synthesis from depth datasets"};
    app.require_subcommand(1);

    std::string manifest_path, config_path, out_dir, in_dir, flow_path, pred_dir, gt_dir;
    std::string format = "flo";
    std::optional<std::uint64_t> seed;
    std::optional<int> workers;

    auto* gen = app.add_subcommand("generate", "generate training tuples from a manifest");
    gen->add_option("--manifest", manifest_path, "dataset manifest")->required();
    gen->add_option("--config", config_path, "generation config (JSON)");
    gen->add_option("--out", out_dir, "output directory");
    gen->add_option("--seed", seed, "global seed (overrides config)");
    gen->add_option("--workers", workers, "worker threads (overrides config)");

    auto* aug = app.add_subcommand("augment", "laterally augment an existing tuple tree");
    aug->add_option("--in", in_dir, "input tuple directory")->required();
    aug->add_option("--out", out_dir, "output directory")->required();
    aug->add_option("--config", config_path, "generation config (JSON)");
    aug->add_option("--seed", seed, "global seed (overrides config)");

    auto* cls = app.add_subcommand("classify", "print the 4-class augmentation posterior");
    cls->add_option("--flow", flow_path, "flow file (.flo or KITTI .png)")->required();

    auto* ev = app.add_subcommand("eval", "EPE / F1-all of predictions against ground truth");
    ev->add_option("--pred", pred_dir, "prediction directory")->required();
    ev->add_option("--gt", gt_dir, "ground-truth directory")->required();
    ev->add_option("--format", format, "flo|kitti")->check(CLI::IsMember({"flo", "kitti"}));

    auto* ins = app.add_subcommand("inspect", "render a flow file as a color-wheel PNG");
    ins->add_option("--flow", flow_path, "flow file")->required();
    ins->add_option("--out", out_dir, "output PNG")->required();

    auto* self = app.add_subcommand("selftest", "run the analytic invariant suite");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) return cmd_generate(manifest_path, config_path, out_dir, seed, workers);
        if (aug->parsed()) return cmd_augment(in_dir, out_dir, config_path, seed);
        if (cls->parsed()) return cmd_classify(flow_path);
        if (ev->parsed()) return cmd_eval(pred_dir, gt_dir, format);
        if (ins->parsed()) return cmd_inspect(flow_path, out_dir);
        if (self->parsed()) return flowgen::run_selftest() == 0 ? 0 : 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}

#include "cli.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <map>
#include <mutex>
#include <ostream>
#include <thread>

#include <CLI11.hpp>

namespace bimef::cli {
namespace fs = std::filesystem;

namespace {

bool has_image_extension(const fs::path& p) {
    std::string ext = p.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return ext == ".png" || ext == ".jpg" || ext == ".jpeg";
}

std::vector<fs::path> list_images(const fs::path& dir) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && has_image_extension(entry.path())) {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());
    return files;
}

fs::path sibling(const fs::path& output, const std::string& suffix) {
    return output.parent_path() / (output.stem().string() + suffix);
}

void add_enhance_options(CLI::App& cmd, EnhanceFlags& f, std::optional<double>& fixed_k) {
    auto& c = f.config;
    cmd.add_option("--mu", c.mu, "Enhancement exponent for the weight map T^mu")
        ->capture_default_str();
    cmd.add_option("--lambda", c.solver.lambda, "Smoothness coefficient")->capture_default_str();
    cmd.add_option("--epsilon", c.solver.epsilon, "Weight denominator offset")
        ->capture_default_str();
    cmd.add_option("--window", c.solver.window, "Texture window length (odd)")
        ->capture_default_str();
    cmd.add_option("--pcg-tol", c.solver.pcg_tol, "PCG relative residual target")
        ->capture_default_str();
    cmd.add_option("--pcg-max-iter", c.solver.pcg_max_iter, "PCG iteration cap")
        ->capture_default_str();
    const std::map<std::string, Preconditioner> preconditioners{
        {"jacobi", Preconditioner::jacobi},
        {"ic", Preconditioner::incomplete_cholesky},
        {"mic", Preconditioner::modified_incomplete_cholesky},
    };
    cmd.add_option("--preconditioner", c.solver.preconditioner, "PCG preconditioner")
        ->transform(CLI::CheckedTransformer(preconditioners, CLI::ignore_case))
        ->default_str("mic");
    cmd.add_option("--camera-a", c.camera.a, "Camera model parameter a")->capture_default_str();
    cmd.add_option("--camera-b", c.camera.b, "Camera model parameter b")->capture_default_str();
    cmd.add_option("--k", fixed_k, "Fixed exposure ratio (skips the entropy search)");
    cmd.add_option("--k-min", c.ksearch.k_min, "Lower bound of the k search")
        ->capture_default_str();
    cmd.add_option("--k-max", c.ksearch.k_max, "Upper bound of the k search")
        ->capture_default_str();
    cmd.add_option("--k-steps", c.ksearch.coarse_steps, "Coarse log-grid size of the k search")
        ->capture_default_str();
    cmd.add_option("--k-tol", c.ksearch.refine_tol, "Refinement tolerance in ln(k)")
        ->capture_default_str();
    cmd.add_option("--k-thumb", c.ksearch.thumb_size, "Thumbnail edge used by the k search")
        ->capture_default_str();
    cmd.add_option("--dark-threshold", c.ksearch.under_exposed_threshold,
                   "Illumination below which a pixel counts as under-exposed")
        ->capture_default_str();
    cmd.add_flag("--report-k", f.report_k, "Print the chosen exposure ratio");
    cmd.add_flag("--dump-intermediates", f.dump_intermediates,
                 "Also write <stem>.T.png, <stem>.W.png and <stem>.synthetic.png");
    cmd.add_flag("--timings", f.timings, "Print per-stage timings");
}

}  // namespace

int run_enhance(const fs::path& input, const fs::path& output, const EnhanceFlags& flags,
                std::ostream& out, std::ostream& err) {
    try {
        if (flags.config.mu > 1.0) {
            err << "warning: mu > 1 may saturate well-exposed regions\n";
        }
        const Image P = load_image(input);
        const auto result = enhance(P, flags.config);
        save_image(result.result, output);
        if (flags.dump_intermediates) {
            save_map(result.illumination, sibling(output, ".T.png"));
            save_map(result.weight, sibling(output, ".W.png"));
            save_image(result.synthetic, sibling(output, ".synthetic.png"));
        }
        if (flags.report_k) out << "k_hat=" << result.k_hat << '\n';
        if (flags.timings) {
            const auto& t = result.timings;
            out << "illumination=" << t.illumination << "s"
                << " (pcg " << result.solver.iterations << " it)\n"
                << "weight=" << t.weight << "s\n"
                << "k_search=" << t.k_search << "s\n"
                << "synthesis=" << t.synthesis << "s\n"
                << "fusion=" << t.fusion << "s\n"
                << "total=" << t.total() << "s\n";
        }
        return 0;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

int run_batch(const fs::path& input_dir, const fs::path& output_dir, const BatchFlags& flags,
              std::ostream& out, std::ostream& err) {
    std::vector<fs::path> files;
    try {
        if (!fs::is_directory(input_dir)) {
            err << "error: '" << input_dir.string() << "' is not a directory\n";
            return 1;
        }
        files = list_images(input_dir);
        fs::create_directories(output_dir);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    if (files.empty()) {
        err << "warning: no images in '" << input_dir.string() << "'\n";
        return 0;
    }
    if (flags.enhance.config.mu > 1.0) {
        err << "warning: mu > 1 may saturate well-exposed regions\n";
    }

    unsigned jobs = flags.jobs > 0 ? static_cast<unsigned>(flags.jobs)
                                   : std::max(1u, std::thread::hardware_concurrency());
    jobs = std::min<unsigned>(jobs, static_cast<unsigned>(files.size()));

    std::atomic<std::size_t> next{0};
    std::atomic<int> failures{0};
    std::mutex sink;
    auto worker = [&] {
        for (std::size_t i = next++; i < files.size(); i = next++) {
            const auto& in = files[i];
            const auto dst = output_dir / (in.stem().string() + ".png");
            const auto start = std::chrono::steady_clock::now();
            try {
                const auto result = enhance(load_image(in), flags.enhance.config);
                save_image(result.result, dst);
                if (flags.enhance.dump_intermediates) {
                    save_map(result.illumination, sibling(dst, ".T.png"));
                    save_map(result.weight, sibling(dst, ".W.png"));
                    save_image(result.synthetic, sibling(dst, ".synthetic.png"));
                }
                const double secs = std::chrono::duration<double>(
                                        std::chrono::steady_clock::now() - start).count();
                std::lock_guard lock(sink);
                out << in.filename().string() << ", " << result.k_hat << ", " << secs << '\n';
            } catch (const std::exception& e) {
                ++failures;
                std::lock_guard lock(sink);
                err << "error: " << in.filename().string() << ": " << e.what() << '\n';
            }
        }
    };

    std::vector<std::jthread> pool;
    for (unsigned j = 1; j < jobs; ++j) pool.emplace_back(worker);
    worker();
    pool.clear();
    return failures == 0 ? 0 : 1;
}

int run_metrics(const fs::path& original, const fs::path& enhanced, const MetricsFlags& flags,
                std::ostream& out, std::ostream& err) {
    try {
        if (fs::is_directory(original) && fs::is_directory(enhanced)) {
            std::map<std::string, fs::path> by_stem;
            for (const auto& p : list_images(enhanced)) by_stem.emplace(p.stem().string(), p);
            out << "path,loe\n";
            int failures = 0;
            for (const auto& p : list_images(original)) {
                auto it = by_stem.find(p.stem().string());
                if (it == by_stem.end()) {
                    err << "warning: no enhanced counterpart for " << p.filename().string() << '\n';
                    continue;
                }
                try {
                    out << p.string() << ',' << loe(load_image(p), load_image(it->second), flags.loe)
                        << '\n';
                } catch (const std::exception& e) {
                    ++failures;
                    err << "error: " << p.filename().string() << ": " << e.what() << '\n';
                }
            }
            return failures == 0 ? 0 : 1;
        }
        const double value = loe(load_image(original), load_image(enhanced), flags.loe);
        if (flags.csv) {
            out << "path,loe\n" << enhanced.string() << ',' << value << '\n';
        } else {
            out << "LOE=" << value << '\n';
        }
        return 0;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

int main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Dual-exposure fusion for low-light image enhancement", "bimef"};
    app.require_subcommand(1);

    std::string in;
    std::string dst;
    EnhanceFlags enhance_flags;
    std::optional<double> enhance_k;
    auto* enhance_cmd = app.add_subcommand("enhance", "Enhance a single image");
    enhance_cmd->add_option("input", in, "Input PNG or JPEG")->required();
    enhance_cmd->add_option("output", dst, "Output PNG")->required();
    add_enhance_options(*enhance_cmd, enhance_flags, enhance_k);

    BatchFlags batch_flags;
    std::optional<double> batch_k;
    auto* batch_cmd = app.add_subcommand("batch", "Enhance every image in a directory");
    batch_cmd->add_option("input_dir", in, "Directory of inputs")->required();
    batch_cmd->add_option("output_dir", dst, "Directory for enhanced PNGs")->required();
    batch_cmd->add_option("--jobs", batch_flags.jobs, "Concurrent images (0: all cores)")
        ->capture_default_str();
    add_enhance_options(*batch_cmd, batch_flags.enhance, batch_k);

    MetricsFlags metrics_flags;
    auto* metrics_cmd = app.add_subcommand("metrics", "Lightness order error between two images");
    metrics_cmd->add_option("original", in, "Original image or directory")->required();
    metrics_cmd->add_option("enhanced", dst, "Enhanced image or directory")->required();
    metrics_cmd->add_option("--loe-size", metrics_flags.loe.sample_size,
                            "Edge length of the LOE sampling grid")
        ->capture_default_str();
    metrics_cmd->add_flag("--csv", metrics_flags.csv, "Emit path,loe rows");

    std::vector<const char*> argv;
    argv.reserve(args.size());
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }

    if (*enhance_cmd) {
        enhance_flags.config.fixed_k = enhance_k;
        return run_enhance(in, dst, enhance_flags, out, err);
    }
    if (*batch_cmd) {
        batch_flags.enhance.config.fixed_k = batch_k;
        return run_batch(in, dst, batch_flags, out, err);
    }
    return run_metrics(in, dst, metrics_flags, out, err);
}

}  // namespace bimef::cli

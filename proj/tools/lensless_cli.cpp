#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "lensless/autocorr.hpp"
#include "lensless/benchmark.hpp"
#include "lensless/dataset.hpp"
#include "lensless/image_io.hpp"
#include "lensless/metrics.hpp"
#include "lensless/report_json.hpp"
#include "lensless/sensor.hpp"
#include "lensless/simulate.hpp"
#include "lensless/solvers.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace lensless;

namespace {

// Bad inputs (paths, flags, shapes) exit 1; failures after inputs are
// accepted exit 2.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

template <class F>
auto checked_input(F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const UsageError&) {
        throw;
    } catch (const std::exception& e) {
        throw UsageError(e.what());
    }
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void emit(const json& j) { std::cout << j.dump() << '\n'; }

json shape_json(const Shape& s) { return json::array({s.height, s.width, s.channels}); }

std::pair<std::size_t, std::size_t> parse_size(const std::string& text) {
    const auto x = text.find('x');
    std::size_t h = 0, w = 0;
    try {
        if (x == std::string::npos) throw std::invalid_argument("");
        std::size_t used = 0;
        h = std::stoul(text.substr(0, x), &used);
        if (used != x) throw std::invalid_argument("");
        w = std::stoul(text.substr(x + 1), &used);
        if (used != text.size() - x - 1) throw std::invalid_argument("");
    } catch (const std::exception&) {
        throw UsageError("size must look like HxW, got '" + text + "'");
    }
    if (h == 0 || w == 0) throw UsageError("size must be positive, got '" + text + "'");
    return {h, w};
}

std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stoi(item, &used));
            if (used != item.size()) throw std::invalid_argument("");
        } catch (const std::exception&) {
            throw UsageError("expected a comma-separated list of integers, got '" + text + "'");
        }
    }
    if (out.empty()) throw UsageError("empty iteration list");
    return out;
}

/// Relative output paths land under $LENSLESS_OUTPUT_DIR when it is set.
fs::path output_path(const std::string& path) {
    fs::path p(path);
    if (const char* dir = std::getenv("LENSLESS_OUTPUT_DIR"); dir && *dir && p.is_relative()) p = fs::path(dir) / p;
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    return p;
}

/// Listed in help; the file itself is expanded by expand_config before parsing.
void add_config_option(CLI::App* sub) {
    sub->add_option("--config", "Plain-text key = value file setting any flag; flags on the command line win");
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

/// Replaces "--config FILE" with "--key=value" for every line of FILE,
/// placed right after the subcommand so later command-line flags override.
std::vector<std::string> expand_config(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    for (std::size_t i = 1; i < args.size(); ++i) {
        std::string file;
        std::size_t consumed = 0;
        if (args[i] == "--config" && i + 1 < args.size()) {
            file = args[i + 1];
            consumed = 2;
        } else if (args[i].rfind("--config=", 0) == 0) {
            file = args[i].substr(9);
            consumed = 1;
        } else {
            continue;
        }
        std::ifstream in(file);
        if (!in) throw UsageError("cannot read config file '" + file + "'");
        std::vector<std::string> flags;
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            line = trim(line.substr(0, line.find('#')));
            if (line.empty()) continue;
            const auto eq = line.find('=');
            if (eq == std::string::npos) {
                throw UsageError(file + ":" + std::to_string(lineno) + ": expected key = value");
            }
            std::string key = trim(line.substr(0, eq));
            if (key.rfind("--", 0) == 0) key = key.substr(2);
            flags.push_back("--" + key + "=" + trim(line.substr(eq + 1)));
        }
        const auto at = args.begin() + static_cast<std::ptrdiff_t>(i);
        args.erase(at, at + static_cast<std::ptrdiff_t>(consumed));
        args.insert(args.begin() + 2, flags.begin(), flags.end());
        break;
    }
    return args;
}

// ---------------------------------------------------------------------------

struct SolverFlags {
    std::string algo = "admm";
    int n_iter = 100;
    std::optional<double> step_size;
    std::optional<double> tv_weight;
    double mu1 = AdmmPenalties{}.mu1;
    double mu2 = AdmmPenalties{}.mu2;
    double mu3 = AdmmPenalties{}.mu3;
    double l1_weight = 0.0;
    std::optional<double> momentum;
    bool no_nonneg = false;
    std::string fft = "real";
    double psf_floor = 0.0;

    void add(CLI::App* app) {
        app->add_option("--algo", algo, "Algorithm: " + valid_algorithm_names())->capture_default_str();
        app->add_option("--n-iter", n_iter, "Number of iterations")->capture_default_str();
        app->add_option("--step-size", step_size, "Gradient step (default 1/Lipschitz)");
        app->add_option("--tv-weight", tv_weight, "TV weight tau (ADMM default 1e-4)");
        app->add_option("--mu1", mu1, "ADMM penalty for u = Mx")->capture_default_str();
        app->add_option("--mu2", mu2, "ADMM penalty for z = Psi x")->capture_default_str();
        app->add_option("--mu3", mu3, "ADMM penalty for w = x")->capture_default_str();
        app->add_option("--l1-weight", l1_weight, "l1 prior weight (apgd)")->capture_default_str();
        app->add_option("--momentum", momentum, "Constant Nesterov momentum (default t-sequence)");
        app->add_flag("--no-nonneg", no_nonneg, "Drop the non-negativity constraint");
        app->add_option("--fft", fft, "FFT path: real or complex")->capture_default_str();
        app->add_option("--psf-floor", psf_floor, "PSF background percentile in [0, 1]")->capture_default_str();
    }

    SolverConfig config() const {
        return checked_input([&] {
            SolverConfig c;
            c.algorithm = parse_algorithm(algo);
            c.n_iter = n_iter;
            c.step_size = step_size;
            c.tv_weight = tv_weight;
            c.admm = {mu1, mu2, mu3};
            c.l1_weight = l1_weight;
            c.momentum = momentum;
            c.nonneg = !no_nonneg;
            if (fft == "real") {
                c.fft_path = FftPath::real;
            } else if (fft == "complex") {
                c.fft_path = FftPath::complex;
            } else {
                throw std::invalid_argument("--fft must be real or complex, got '" + fft + "'");
            }
            validate(c);
            return c;
        });
    }
};

struct InputFlags {
    std::size_t downsample = 1;
    bool gray = false;
    std::string bayer;
    std::string psf_bayer;

    void add(CLI::App* app, bool data) {
        app->add_option("--downsample", downsample, "Integer box-downsampling factor")->capture_default_str();
        app->add_flag("--gray", gray, "Convert RGB inputs to grayscale");
        app->add_option("--psf-bayer", psf_bayer, "Sidecar describing a raw Bayer PSF file")
            ->check(CLI::ExistingFile);
        if (data) {
            app->add_option("--bayer", bayer, "Sidecar describing a raw Bayer data file")->check(CLI::ExistingFile);
        }
    }

    ImageTensor load(const std::string& path, const std::string& sidecar) const {
        return checked_input([&] {
            ImageTensor img = sidecar.empty() ? load_image(path) : [&] {
                const BayerFrame frame = load_bayer_frame(path, sidecar);
                return gray ? bayer_to_gray(frame) : demosaic(frame);
            }();
            img = lensless::downsample(img, downsample);
            if (gray && img.channels() == 3) img = rgb_to_gray(img);
            return img;
        });
    }

    Psf psf(const std::string& path, double floor) const {
        const ImageTensor raw = load(path, psf_bayer);
        return checked_input([&] { return calibrate_psf(raw, floor); });
    }
};

// ---------------------------------------------------------------------------

struct ReconCommand {
    std::string psf, data, out;
    int save_every = 0;
    bool no_timing = false;
    SolverFlags solver;
    InputFlags input;

    CLI::App* add(CLI::App& app) {
        auto* sub = app.add_subcommand("recon", "Reconstruct one measurement");
        add_config_option(sub);
        sub->add_option("--psf", psf, "PSF image")->required()->check(CLI::ExistingFile);
        sub->add_option("--data", data, "Lensless measurement")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", out, "Output image (.png, .tif or .lpc)");
        sub->add_option("--save-every", save_every, "Also save every k-th iterate next to --out")
            ->check(CLI::NonNegativeNumber);
        sub->add_flag("--no-timing", no_timing, "Leave wall-clock times out of the JSON");
        solver.add(sub);
        input.add(sub, true);
        return sub;
    }

    int run() const {
        SolverConfig config = solver.config();
        if (save_every > 0 && out.empty()) throw UsageError("--save-every needs --out");
        const Psf p = input.psf(psf, solver.psf_floor);
        const ImageTensor y = input.load(data, input.bayer);
        if (y.shape() != p.image.shape()) {
            throw UsageError("measurement shape " + to_string(y.shape()) + " does not match PSF shape " +
                             to_string(p.image.shape()));
        }
        const fs::path out_path = out.empty() ? fs::path() : output_path(out);

        const auto t0 = std::chrono::steady_clock::now();
        config.callback_every = save_every;
        auto rec = make_reconstruction(p, config);
        rec->set_data(y);

        json snapshots = json::array();
        const auto callback = [&](int iteration, const ImageTensor& image, double objective) {
            std::cerr << "recon: iteration " << iteration << "/" << config.n_iter << " objective " << objective
                      << '\n';
            char suffix[32];
            std::snprintf(suffix, sizeof suffix, "_%05d", iteration);
            const fs::path snap =
                out_path.parent_path() / (out_path.stem().string() + suffix + out_path.extension().string());
            save_image(image, snap, 16);
            snapshots.push_back({{"iteration", iteration}, {"objective", objective}, {"path", snap.string()}});
        };
        const ImageTensor image = rec->apply(config.n_iter, callback);
        if (!out.empty()) save_image(image, out_path, 16);
        const double elapsed = seconds_since(t0);
        std::cerr << "recon: " << to_string(config.algorithm) << " finished " << rec->iteration() << " iterations\n";

        json j = {{"algorithm", to_string(config.algorithm)},
                  {"iterations", rec->iteration()},
                  {"final_objective", rec->objective_history().back()},
                  {"shape", shape_json(image.shape())},
                  {"output", out.empty() ? json(nullptr) : json(out_path.string())},
                  {"snapshots", snapshots}};
        if (!no_timing) j["seconds"] = elapsed;
        emit(j);
        return 0;
    }
};

struct SimulateCommand {
    std::string scene, psf, out, scene_out, psf_out, dataset;
    std::string size = "64x64";
    std::size_t channels = 1;
    std::size_t pairs = 10;
    double snr_db = 40.0;
    std::uint64_t seed = 0;
    std::uint64_t scene_seed = 0;
    std::uint64_t psf_seed = 0;
    bool no_clip = false;
    double psf_floor = 0.0;
    InputFlags input;

    CLI::App* add(CLI::App& app) {
        auto* sub = app.add_subcommand("simulate", "Simulate a lensless measurement or a synthetic dataset");
        add_config_option(sub);
        sub->add_option("--scene", scene, "Scene image (default: synthetic scene)")->check(CLI::ExistingFile);
        sub->add_option("--psf", psf, "PSF image (default: synthetic PSF)")->check(CLI::ExistingFile);
        sub->add_option("--out", out, "Output measurement (.png, .tif or .lpc)");
        sub->add_option("--scene-out", scene_out, "Also write the scene used");
        sub->add_option("--psf-out", psf_out, "Also write the calibrated PSF used");
        sub->add_option("--dataset", dataset, "Write a synthetic paired dataset into this directory instead");
        sub->add_option("--pairs", pairs, "Pairs in the synthetic dataset")->capture_default_str();
        sub->add_option("--size", size, "Synthetic size HxW")->capture_default_str();
        sub->add_option("--channels", channels, "Synthetic channels (1 or 3)")->capture_default_str();
        sub->add_option("--snr-db", snr_db, "Signal-to-noise ratio in dB; inf disables noise")->capture_default_str();
        sub->add_option("--seed", seed, "Noise seed (dataset: base seed)")->capture_default_str();
        sub->add_option("--scene-seed", scene_seed, "Synthetic scene seed")->capture_default_str();
        sub->add_option("--psf-seed", psf_seed, "Synthetic PSF seed")->capture_default_str();
        sub->add_flag("--no-clip", no_clip, "Keep negative noisy values");
        sub->add_option("--psf-floor", psf_floor, "PSF background percentile in [0, 1]")->capture_default_str();
        input.add(sub, false);
        return sub;
    }

    int run() const {
        if (std::isnan(snr_db) || snr_db == -std::numeric_limits<double>::infinity()) {
            throw UsageError("--snr-db must be a number or inf");
        }
        const auto [h, w] = parse_size(size);
        if (channels != 1 && channels != 3) throw UsageError("--channels must be 1 or 3");
        const json snr = std::isinf(snr_db) ? json(nullptr) : json(snr_db);

        if (!dataset.empty()) {
            SyntheticDatasetSpec spec{pairs, h, w, channels, snr_db, seed};
            const fs::path root = output_path(dataset);
            checked_input([&] {
                if (pairs == 0) throw std::invalid_argument("--pairs must be >= 1");
                return 0;
            });
            write_synthetic_dataset(root, spec);
            std::cerr << "simulate: wrote " << pairs << " pairs to " << root.string() << '\n';
            emit({{"dataset", root.string()},
                  {"pairs", pairs},
                  {"shape", json::array({h, w, channels})},
                  {"snr_db", snr},
                  {"seed", seed}});
            return 0;
        }
        if (out.empty()) throw UsageError("simulate needs --out or --dataset");

        std::optional<ImageTensor> scene_img;
        if (!scene.empty()) scene_img = input.load(scene, "");
        std::optional<Psf> p;
        if (!psf.empty()) p = input.psf(psf, psf_floor);
        const Shape shape = scene_img ? scene_img->shape() : p ? p->image.shape() : Shape{h, w, channels};
        if (!scene_img) scene_img = synthetic_scene(shape.height, shape.width, shape.channels, scene_seed);
        if (!p) {
            p = checked_input(
                [&] { return calibrate_psf(synthetic_psf(shape.height, shape.width, shape.channels, psf_seed)); });
        }
        if (scene_img->shape() != p->image.shape()) {
            throw UsageError("scene shape " + to_string(scene_img->shape()) + " does not match PSF shape " +
                             to_string(p->image.shape()));
        }

        const ConvolutionOperator op(*p);
        const ImageTensor y = simulate_measurement(*scene_img, op, {snr_db, seed, !no_clip});
        const ImageTensor clean = op.apply(*scene_img);
        double signal = 0.0, noise = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i) {
            signal += clean.data()[i] * clean.data()[i];
            noise += (y.data()[i] - clean.data()[i]) * (y.data()[i] - clean.data()[i]);
        }
        const fs::path out_path = output_path(out);
        save_image(y, out_path, 16);
        json j = {{"output", out_path.string()},
                  {"shape", shape_json(y.shape())},
                  {"snr_db", snr},
                  {"measured_snr_db", noise > 0.0 && signal > 0.0 ? json(10.0 * std::log10(signal / noise))
                                                                   : json(nullptr)},
                  {"seed", seed}};
        if (!scene_out.empty()) {
            const fs::path sp = output_path(scene_out);
            save_image(*scene_img, sp, 16);
            j["scene"] = sp.string();
        }
        if (!psf_out.empty()) {
            const fs::path pp = output_path(psf_out);
            save_image(p->image, pp, 16);
            j["psf"] = pp.string();
        }
        emit(j);
        return 0;
    }
};

struct BenchmarkCommand {
    std::string size = "512x512";
    int n_iter_gd = 300;
    int n_iter_admm = 5;
    int repeats = 5;
    std::uint64_t seed = 0;

    CLI::App* add(CLI::App& app) {
        auto* sub = app.add_subcommand("benchmark", "Time GD and ADMM through the real and complex FFT paths");
        add_config_option(sub);
        sub->add_option("--size", size, "Image size HxW")->capture_default_str();
        sub->add_option("--n-iter-gd", n_iter_gd, "GD iterations (0 skips GD)")->capture_default_str()
            ->check(CLI::NonNegativeNumber);
        sub->add_option("--n-iter-admm", n_iter_admm, "ADMM iterations (0 skips ADMM)")->capture_default_str()
            ->check(CLI::NonNegativeNumber);
        sub->add_option("--repeats", repeats, "Repeats; the median is reported")->capture_default_str()
            ->check(CLI::PositiveNumber);
        sub->add_option("--seed", seed, "Synthetic data seed")->capture_default_str();
        return sub;
    }

    int run() const {
        const auto [h, w] = parse_size(size);
        BenchmarkOptions o;
        o.height = h;
        o.width = w;
        o.n_iter_gd = n_iter_gd;
        o.n_iter_admm = n_iter_admm;
        o.repeats = repeats;
        o.seed = seed;
        std::cerr << "benchmark: " << h << "x" << w << ", " << repeats << " repeats\n";
        const BenchmarkResult r = run_benchmark(o);

        json timings = json::object(), speedup = json::object(), agreement = json::object();
        bool agree = true;
        const auto add = [&](const char* name, const std::optional<PathTiming>& t, int n_iter) {
            if (!t) return;
            timings[std::string(name) + "_real"] = {{"seconds", t->real_seconds}, {"iterations", n_iter}};
            timings[std::string(name) + "_complex"] = {{"seconds", t->complex_seconds}, {"iterations", n_iter}};
            speedup[name] = t->speedup();
            agreement[name] = t->relative_difference;
            agree = agree && t->relative_difference <= 1e-8;
        };
        add("gd", r.gd, n_iter_gd);
        add("admm", r.admm, n_iter_admm);
        emit({{"size", json::array({h, w})},
              {"repeats", repeats},
              {"timings", timings},
              {"speedup", speedup},
              {"relative_difference", agreement},
              {"paths_agree", agree}});
        return agree ? 0 : 2;
    }
};

struct EvaluateCommand {
    std::string dataset, manifest, region, out_dir, snapshots;
    std::optional<std::size_t> index;
    std::optional<std::size_t> downsample;
    unsigned jobs = 1;
    bool gray = false;
    bool no_timing = false;
    SolverFlags solver;

    CLI::App* add(CLI::App& app) {
        auto* sub = app.add_subcommand("evaluate", "Reconstruct a paired dataset and score it against lensed images");
        add_config_option(sub);
        sub->add_option("--dataset", dataset, "Dataset root (diffuser/, lensed/, psf.*)")->required()
            ->check(CLI::ExistingDirectory);
        sub->add_option("--manifest", manifest, "JSON manifest of pairs")->check(CLI::ExistingFile);
        sub->add_option("--region", region, "Region top,left,height,width of the reconstruction");
        sub->add_option("--downsample", downsample, "Downsampling factor (overrides the manifest)");
        sub->add_flag("--gray", gray, "Convert RGB inputs to grayscale");
        sub->add_option("--jobs", jobs, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);
        sub->add_option("--out-dir", out_dir, "Write reconstructions here");
        sub->add_option("--index", index, "Evaluate only this pair, with snapshots");
        sub->add_option("--snapshots", snapshots, "Snapshot iterations for --index, e.g. 5,100 (default --n-iter)");
        sub->add_flag("--no-timing", no_timing, "Leave wall-clock times out of the JSON");
        solver.add(sub);
        return sub;
    }

    int run() const {
        EvaluationOptions o;
        o.solver = solver.config();
        o.downsample = downsample;
        o.gray = gray;
        o.psf_floor = solver.psf_floor;
        o.jobs = jobs;
        if (!region.empty()) o.region = checked_input([&] { return parse_region(region); });
        if (!out_dir.empty()) {
            o.output_dir = output_path(out_dir);
            fs::create_directories(*o.output_dir);
        }
        if (!snapshots.empty() && !index) throw UsageError("--snapshots needs --index");
        const PairedDataset ds = checked_input([&] {
            return load_dataset(dataset, manifest.empty() ? std::nullopt : std::optional<fs::path>(manifest));
        });

        if (index) {
            if (*index >= ds.entries.size()) {
                throw UsageError("--index " + std::to_string(*index) + " out of range for " +
                                 std::to_string(ds.entries.size()) + " pairs");
            }
            const std::vector<int> iters = snapshots.empty() ? std::vector<int>{o.solver.n_iter}
                                                             : parse_int_list(snapshots);
            for (int it : iters) {
                if (it < 0) throw UsageError("snapshot iterations must be >= 0");
            }
            const auto snaps = evaluate_single(ds, *index, o, iters);
            const std::string& name = ds.entries[*index].name;
            for (const auto& s : snaps) {
                json j = to_json(s.report);
                j["name"] = name;
                j["iteration"] = s.iteration;
                if (o.output_dir) {
                    const fs::path p = *o.output_dir / (name + "_" + std::to_string(s.iteration) + ".png");
                    save_image(s.image, p, 16);
                    j["path"] = p.string();
                }
                emit(j);
            }
            return 0;
        }

        std::cerr << "evaluate: " << ds.entries.size() << " pairs with " << to_string(o.solver.algorithm) << ", "
                  << o.solver.n_iter << " iterations\n";
        const DatasetEvaluation ev = evaluate_dataset(ds, o);
        for (const auto& f : ev.files) {
            if (!f.report) std::cerr << "evaluate: " << f.name << " failed: " << f.error << '\n';
            emit(to_json(f, !no_timing));
        }
        emit({{"aggregate", to_json(ev.aggregate)},
              {"algorithm", to_string(o.solver.algorithm)},
              {"n_iter", o.solver.n_iter},
              {"files", ev.files.size()},
              {"succeeded", ev.succeeded},
              {"failed", ev.failed}});
        return ev.failed == 0 ? 0 : 2;
    }
};

struct MetricsCommand {
    std::string recon, ref, region;

    CLI::App* add(CLI::App& app) {
        auto* sub = app.add_subcommand("metrics", "Compare a reconstruction against a reference image");
        add_config_option(sub);
        sub->add_option("--recon", recon, "Reconstruction")->required()->check(CLI::ExistingFile);
        sub->add_option("--ref", ref, "Reference image")->required()->check(CLI::ExistingFile);
        sub->add_option("--region", region, "Region top,left,height,width of the reconstruction");
        return sub;
    }

    int run() const {
        const ImageTensor a = checked_input([&] { return load_image(recon); });
        const ImageTensor b = checked_input([&] { return load_image(ref); });
        std::optional<Region> r;
        if (!region.empty()) r = checked_input([&] { return parse_region(region); });
        emit(to_json(checked_input([&] { return compare(a, b, r); })));
        return 0;
    }
};

struct PsfReportCommand {
    std::string psf;
    double psf_floor = 0.0;
    InputFlags input;

    CLI::App* add(CLI::App& app) {
        auto* sub = app.add_subcommand("psf-report", "Autocorrelation and conditioning figures of a PSF");
        add_config_option(sub);
        sub->add_option("--psf", psf, "PSF image")->required()->check(CLI::ExistingFile);
        sub->add_option("--psf-floor", psf_floor, "PSF background percentile in [0, 1]")->capture_default_str();
        input.add(sub, false);
        return sub;
    }

    int run() const {
        const Psf p = input.psf(psf, psf_floor);
        json j = to_json(psf_report(p));
        j["psf"] = psf;
        emit(j);
        return 0;
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Lensless camera reconstruction toolkit"};
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

    ReconCommand recon;
    SimulateCommand simulate;
    BenchmarkCommand benchmark;
    EvaluateCommand evaluate;
    MetricsCommand metrics;
    PsfReportCommand psf_report_cmd;
    auto* recon_app = recon.add(app);
    auto* simulate_app = simulate.add(app);
    auto* benchmark_app = benchmark.add(app);
    auto* evaluate_app = evaluate.add(app);
    auto* metrics_app = metrics.add(app);
    auto* psf_app = psf_report_cmd.add(app);

    try {
        std::vector<std::string> args = expand_config(argc, argv);
        std::vector<char*> ptrs;
        for (auto& a : args) ptrs.push_back(a.data());
        app.parse(static_cast<int>(ptrs.size()), ptrs.data());
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (recon_app->parsed()) return recon.run();
        if (simulate_app->parsed()) return simulate.run();
        if (benchmark_app->parsed()) return benchmark.run();
        if (evaluate_app->parsed()) return evaluate.run();
        if (metrics_app->parsed()) return metrics.run();
        if (psf_app->parsed()) return psf_report_cmd.run();
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 1;
}

#include "lensless/dataset.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <fstream>
#include <map>
#include <stdexcept>
#include <thread>

#include "json.hpp"

#include "lensless/convolution.hpp"
#include "lensless/image_io.hpp"

namespace fs = std::filesystem;

namespace lensless {

namespace {

bool is_image_file(const fs::path& p) {
    if (!fs::is_regular_file(p)) return false;
    try {
        format_from_extension(p);
        return true;
    } catch (const std::invalid_argument&) {
        return false;
    }
}

std::map<std::string, fs::path> files_by_stem(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw std::runtime_error("dataset directory '" + dir.string() + "' does not exist");
    std::map<std::string, fs::path> out;
    for (const auto& e : fs::directory_iterator(dir)) {
        if (!is_image_file(e.path())) continue;
        const std::string stem = e.path().stem().string();
        if (!out.emplace(stem, e.path()).second) {
            throw std::runtime_error("duplicate name '" + stem + "' in '" + dir.string() + "'");
        }
    }
    return out;
}

fs::path find_psf(const fs::path& root) {
    for (const char* ext : {".png", ".tif", ".tiff", ".lpc", ".raw"}) {
        const fs::path p = root / (std::string("psf") + ext);
        if (fs::is_regular_file(p)) return p;
    }
    throw std::runtime_error("missing PSF: no psf.png, psf.tif(f) or psf.lpc in '" + root.string() + "'");
}

PairedDataset from_manifest(const fs::path& root, const fs::path& manifest) {
    std::ifstream in(manifest);
    if (!in) throw std::runtime_error("cannot open manifest '" + manifest.string() + "'");
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("manifest '" + manifest.string() + "' is not valid JSON: " + e.what());
    }
    if (!j.is_object() || !j.contains("psf") || !j.contains("pairs") || !j["pairs"].is_array()) {
        throw std::runtime_error("manifest needs a \"psf\" path and a \"pairs\" array");
    }
    PairedDataset ds;
    ds.root = root;
    ds.psf_path = root / j["psf"].get<std::string>();
    if (j.contains("downsample")) ds.downsample = j["downsample"].get<std::size_t>();
    for (const auto& p : j["pairs"]) {
        DatasetEntry e;
        e.lensless = root / p.at("lensless").get<std::string>();
        e.lensed = root / p.at("lensed").get<std::string>();
        e.name = p.contains("name") ? p["name"].get<std::string>() : e.lensless.stem().string();
        ds.entries.push_back(std::move(e));
    }
    return ds;
}

void validate_dataset(PairedDataset& ds) {
    if (ds.entries.empty()) throw std::runtime_error("empty dataset");
    if (ds.downsample == 0) throw std::runtime_error("dataset downsample factor must be >= 1");
    if (!fs::is_regular_file(ds.psf_path)) throw std::runtime_error("missing PSF '" + ds.psf_path.string() + "'");
    for (const auto& e : ds.entries) {
        for (const auto& p : {e.lensless, e.lensed}) {
            if (!fs::is_regular_file(p)) throw std::runtime_error("missing dataset file '" + p.string() + "'");
        }
    }
    std::sort(ds.entries.begin(), ds.entries.end(),
              [](const DatasetEntry& a, const DatasetEntry& b) { return a.name < b.name; });
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

PairedDataset load_dataset(const fs::path& root, const std::optional<fs::path>& manifest) {
    PairedDataset ds;
    if (manifest) {
        ds = from_manifest(root, *manifest);
    } else {
        ds.root = root;
        const auto lensless = files_by_stem(root / "diffuser");
        const auto lensed = files_by_stem(root / "lensed");
        for (const auto& [stem, path] : lensless) {
            if (!lensed.count(stem)) {
                throw std::runtime_error("orphan file '" + path.string() + "' has no counterpart in lensed/");
            }
        }
        for (const auto& [stem, path] : lensed) {
            if (!lensless.count(stem)) {
                throw std::runtime_error("orphan file '" + path.string() + "' has no counterpart in diffuser/");
            }
        }
        if (lensless.empty()) throw std::runtime_error("empty dataset");
        ds.psf_path = find_psf(root);
        for (const auto& [stem, path] : lensless) ds.entries.push_back({stem, path, lensed.at(stem)});
    }
    validate_dataset(ds);
    return ds;
}

Psf prepare_psf(const PairedDataset& ds, const EvaluationOptions& options) {
    ImageTensor raw = load_image(ds.psf_path);
    raw = downsample(raw, options.downsample.value_or(ds.downsample));
    if (options.gray && raw.channels() == 3) raw = rgb_to_gray(raw);
    return calibrate_psf(raw, options.psf_floor);
}

ImageTensor prepare_measurement(const fs::path& path, const EvaluationOptions& options,
                                std::size_t dataset_downsample) {
    ImageTensor img = load_image(path);
    img = downsample(img, options.downsample.value_or(dataset_downsample));
    if (options.gray && img.channels() == 3) img = rgb_to_gray(img);
    return img;
}

DatasetEvaluation evaluate_dataset(const PairedDataset& ds, const EvaluationOptions& options) {
    validate(options.solver);
    const auto op = plan_convolution(prepare_psf(ds, options), options.solver.fft_path);
    if (options.output_dir) fs::create_directories(*options.output_dir);

    DatasetEvaluation result;
    result.files.resize(ds.entries.size());
    std::atomic<std::size_t> next{0};

    const auto worker = [&] {
        std::unique_ptr<Reconstruction> rec;
        for (std::size_t i = next++; i < ds.entries.size(); i = next++) {
            const DatasetEntry& entry = ds.entries[i];
            FileResult& out = result.files[i];
            out.name = entry.name;
            const auto t0 = std::chrono::steady_clock::now();
            try {
                if (!rec) rec = make_reconstruction(op, options.solver);
                rec->set_data(prepare_measurement(entry.lensless, options, ds.downsample));
                const ImageTensor image = rec->apply(options.solver.n_iter);
                out.report = compare(image, load_image(entry.lensed), options.region);
                if (options.output_dir) save_image(image, *options.output_dir / (entry.name + ".png"), 16);
            } catch (const std::exception& e) {
                out.report.reset();
                out.error = e.what();
            }
            out.seconds = seconds_since(t0);
        }
    };

    const unsigned jobs = std::max(1u, std::min<unsigned>(options.jobs, static_cast<unsigned>(ds.entries.size())));
    std::vector<std::thread> pool;
    for (unsigned j = 1; j < jobs; ++j) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    // reduce in dataset order so the aggregate does not depend on scheduling
    std::vector<MetricReport> ok;
    for (const auto& f : result.files) {
        if (f.report) {
            ok.push_back(*f.report);
        } else {
            ++result.failed;
        }
    }
    result.succeeded = ok.size();
    result.aggregate = average(ok);
    return result;
}

std::vector<Snapshot> evaluate_single(const PairedDataset& ds, std::size_t index, const EvaluationOptions& options,
                                      const std::vector<int>& snapshot_iters) {
    if (index >= ds.entries.size()) {
        throw std::out_of_range("index " + std::to_string(index) + " out of range for a dataset of " +
                                std::to_string(ds.entries.size()) + " pairs");
    }
    for (int it : snapshot_iters) {
        if (it < 0) throw std::invalid_argument("snapshot iterations must be >= 0");
    }
    const DatasetEntry& entry = ds.entries[index];
    auto rec = make_reconstruction(prepare_psf(ds, options), options.solver);
    rec->set_data(prepare_measurement(entry.lensless, options, ds.downsample));
    const ImageTensor reference = load_image(entry.lensed);

    std::vector<int> wanted = snapshot_iters;
    std::sort(wanted.begin(), wanted.end());
    wanted.erase(std::unique(wanted.begin(), wanted.end()), wanted.end());

    std::map<int, Snapshot> captured;
    const auto capture = [&] {
        ImageTensor image = rec->iterate();
        for (double& v : image.data()) v = std::max(v, 0.0);
        Snapshot s{rec->iteration(), compare(image, reference, options.region), std::move(image)};
        captured.emplace(s.iteration, std::move(s));
    };
    for (int target : wanted) {
        while (rec->iteration() < target) rec->step();
        capture();
    }

    std::vector<Snapshot> out;
    out.reserve(snapshot_iters.size());
    for (int it : snapshot_iters) out.push_back(captured.at(it));
    return out;
}

}  // namespace lensless

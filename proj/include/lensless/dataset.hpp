#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "lensless/image.hpp"
#include "lensless/metrics.hpp"
#include "lensless/psf.hpp"
#include "lensless/solvers.hpp"

namespace lensless {

struct DatasetEntry {
    std::string name;
    std::filesystem::path lensless;
    std::filesystem::path lensed;
};

struct PairedDataset {
    std::filesystem::path root;
    std::vector<DatasetEntry> entries;  // sorted by name
    std::filesystem::path psf_path;
    std::size_t downsample = 1;
};

/// Without a manifest: pairs root/diffuser/<stem>.* with root/lensed/<stem>.*
/// by file stem, and takes the PSF from root/psf.{png,tif,tiff,lpc,raw}.
///
/// A manifest is a JSON object
///   {"psf": "psf.png", "downsample": 2,
///    "pairs": [{"name": "a", "lensless": "diffuser/a.png", "lensed": "lensed/a.png"}, ...]}
/// with paths relative to `root` ("name" and "downsample" optional).
PairedDataset load_dataset(const std::filesystem::path& root,
                           const std::optional<std::filesystem::path>& manifest = std::nullopt);

struct EvaluationOptions {
    SolverConfig solver;
    /// Overrides the dataset's factor when set.
    std::optional<std::size_t> downsample;
    bool gray = false;
    double psf_floor = 0.0;
    std::optional<Region> region;
    unsigned jobs = 1;
    /// Reconstructions are written here as 16-bit PNG when set.
    std::optional<std::filesystem::path> output_dir;
};

struct FileResult {
    std::string name;
    std::optional<MetricReport> report;  // empty on failure
    std::string error;
    double seconds = 0.0;
};

struct DatasetEvaluation {
    std::vector<FileResult> files;  // dataset order
    MetricReport aggregate;         // mean over successful files
    std::size_t succeeded = 0;
    std::size_t failed = 0;
};

/// The PSF exactly as the solvers see it for this dataset and options.
Psf prepare_psf(const PairedDataset& ds, const EvaluationOptions& options);
ImageTensor prepare_measurement(const std::filesystem::path& path, const EvaluationOptions& options,
                                std::size_t dataset_downsample);

/// Reconstructs every pair with one shared operator, `options.jobs` workers
/// each owning a solver. Per-file failures are recorded and skipped.
DatasetEvaluation evaluate_dataset(const PairedDataset& ds, const EvaluationOptions& options);

struct Snapshot {
    int iteration = 0;
    MetricReport report;
    ImageTensor image;
};

/// Runs the solver once on entry `index` and records metrics and images at
/// each requested iteration (0 is the initial zero image).
std::vector<Snapshot> evaluate_single(const PairedDataset& ds, std::size_t index, const EvaluationOptions& options,
                                      const std::vector<int>& snapshot_iters);

}  // namespace lensless

#include "doctest.h"

#include <cmath>
#include <fstream>
#include <limits>

#include "lensless/dataset.hpp"
#include "lensless/image_io.hpp"
#include "lensless/simulate.hpp"
#include "support.hpp"

using namespace lensless;
using testing::Rng;
namespace fs = std::filesystem;

namespace {

double snr_db(const ImageTensor& signal, const ImageTensor& measured) {
    double s = 0.0, n = 0.0;
    for (std::size_t i = 0; i < signal.size(); ++i) {
        s += signal.data()[i] * signal.data()[i];
        const double d = measured.data()[i] - signal.data()[i];
        n += d * d;
    }
    return 10.0 * std::log10(s / n);
}

// lensless == lensed, PSF = delta: reconstruction is the identity problem.
fs::path identity_fixture(std::size_t pairs) {
    const fs::path root = testing::temp_dir("identity");
    fs::create_directories(root / "diffuser");
    fs::create_directories(root / "lensed");
    save_image(testing::delta_psf(16, 16), root / "psf.png", 16);
    for (std::size_t i = 0; i < pairs; ++i) {
        const ImageTensor img = synthetic_scene(16, 16, 1, 50 + i);
        const std::string name = "img" + std::to_string(i) + ".png";
        save_image(img, root / "diffuser" / name, 16);
        save_image(img, root / "lensed" / name, 16);
    }
    return root;
}

fs::path synthetic_fixture(const std::string& tag, std::size_t pairs = 10) {
    const fs::path root = testing::temp_dir(tag);
    SyntheticDatasetSpec spec;
    spec.pairs = pairs;
    write_synthetic_dataset(root, spec);
    return root;
}

EvaluationOptions options_for(Algorithm algo, int n_iter) {
    EvaluationOptions o;
    o.solver.algorithm = algo;
    o.solver.n_iter = n_iter;
    return o;
}

}  // namespace

TEST_CASE("simulate_measurement") {
    const ImageTensor scene = synthetic_scene(32, 32, 1, 7);
    const Psf psf = calibrate_psf(synthetic_psf(32, 32, 1, 3));
    const ConvolutionOperator op(psf);
    const ImageTensor clean = op.apply(scene);

    SUBCASE("exact snr without clipping") {
        for (double target : {10.0, 25.0, 40.0}) {
            const ImageTensor y = simulate_measurement(scene, op, {target, 5, false});
            CHECK(snr_db(clean, y) == doctest::Approx(target).epsilon(1e-9));
        }
    }
    SUBCASE("40 dB with clipping stays within half a decibel") {
        const ImageTensor y = simulate_measurement(scene, psf, {40.0, 5, true});
        CHECK(std::abs(snr_db(clean, y) - 40.0) <= 0.5);
        CHECK(y.min_value() >= 0.0);
    }
    SUBCASE("infinite snr and a delta psf return the scene") {
        const ImageTensor y = simulate_measurement(scene, testing::unit_sum_psf(testing::delta_psf(32, 32)), {});
        CHECK(testing::max_abs_diff(y.data(), scene.data()) <= 1e-12);
    }
    SUBCASE("zero scene") {
        const ImageTensor y = simulate_measurement(ImageTensor(32, 32, 1), op, {20.0, 1, false});
        CHECK(y.max_value() == 0.0);
        CHECK(y.min_value() == 0.0);
    }
    SUBCASE("seeded") {
        const ImageTensor a = simulate_measurement(scene, op, {30.0, 11, true});
        const ImageTensor b = simulate_measurement(scene, op, {30.0, 11, true});
        const ImageTensor c = simulate_measurement(scene, op, {30.0, 12, true});
        CHECK(a == b);
        CHECK(!(a == c));
    }
    SUBCASE("errors") {
        CHECK_THROWS(simulate_measurement(ImageTensor(16, 32, 1), op, {}));
        CHECK_THROWS(simulate_measurement(scene, op, {std::nan(""), 0, true}));
        CHECK_THROWS(simulate_measurement(scene, op, {-std::numeric_limits<double>::infinity(), 0, true}));
    }
}

TEST_CASE("synthetic generators") {
    const ImageTensor s = synthetic_scene(40, 30, 3, 9);
    CHECK(s.shape() == Shape{40, 30, 3});
    CHECK(s.min_value() >= 0.0);
    CHECK(s.max_value() <= 1.0);
    CHECK(s.max_value() > 0.0);
    CHECK(synthetic_scene(40, 30, 3, 9) == s);
    const ImageTensor p = synthetic_psf(40, 30, 1, 9);
    CHECK(p.min_value() >= 0.0);
    CHECK(p.max_value() > 0.0);
}

TEST_CASE("load_dataset layouts and errors") {
    SUBCASE("empty") {
        const fs::path root = testing::temp_dir("empty");
        fs::create_directories(root / "diffuser");
        fs::create_directories(root / "lensed");
        save_image(testing::delta_psf(4, 4), root / "psf.png");
        CHECK_THROWS_WITH(load_dataset(root), doctest::Contains("empty dataset"));
    }
    SUBCASE("three pairs sorted") {
        const fs::path root = testing::temp_dir("three");
        fs::create_directories(root / "diffuser");
        fs::create_directories(root / "lensed");
        save_image(testing::delta_psf(4, 4), root / "psf.tif");
        for (const char* n : {"c", "a", "b"}) {
            save_image(ImageTensor(4, 4, 1), root / "diffuser" / (std::string(n) + ".png"));
            save_image(ImageTensor(4, 4, 1), root / "lensed" / (std::string(n) + ".tif"));
        }
        std::ofstream(root / "diffuser" / "notes.txt") << "ignored";
        const PairedDataset ds = load_dataset(root);
        REQUIRE(ds.entries.size() == 3);
        CHECK(ds.entries[0].name == "a");
        CHECK(ds.entries[1].name == "b");
        CHECK(ds.entries[2].name == "c");
        CHECK(ds.psf_path.filename() == "psf.tif");
        CHECK(ds.entries[2].lensed.filename() == "c.tif");
    }
    SUBCASE("orphan is named") {
        const fs::path root = testing::temp_dir("orphan");
        fs::create_directories(root / "diffuser");
        fs::create_directories(root / "lensed");
        save_image(testing::delta_psf(4, 4), root / "psf.png");
        save_image(ImageTensor(4, 4, 1), root / "diffuser" / "a.png");
        save_image(ImageTensor(4, 4, 1), root / "lensed" / "a.png");
        save_image(ImageTensor(4, 4, 1), root / "lensed" / "stray.png");
        CHECK_THROWS_WITH(load_dataset(root), doctest::Contains("stray.png"));
    }
    SUBCASE("missing psf") {
        const fs::path root = testing::temp_dir("nopsf");
        fs::create_directories(root / "diffuser");
        fs::create_directories(root / "lensed");
        save_image(ImageTensor(4, 4, 1), root / "diffuser" / "a.png");
        save_image(ImageTensor(4, 4, 1), root / "lensed" / "a.png");
        CHECK_THROWS_WITH(load_dataset(root), doctest::Contains("PSF"));
    }
    SUBCASE("manifest") {
        const fs::path root = testing::temp_dir("manifest");
        fs::create_directories(root / "x");
        save_image(testing::delta_psf(8, 8), root / "kernel.png");
        save_image(ImageTensor(8, 8, 1), root / "x" / "m2.png");
        save_image(ImageTensor(8, 8, 1), root / "x" / "t2.png");
        save_image(ImageTensor(8, 8, 1), root / "x" / "m1.png");
        save_image(ImageTensor(8, 8, 1), root / "x" / "t1.png");
        std::ofstream(root / "list.json") << R"({"psf": "kernel.png", "downsample": 2, "pairs": [
            {"name": "second", "lensless": "x/m2.png", "lensed": "x/t2.png"},
            {"lensless": "x/m1.png", "lensed": "x/t1.png"}]})";
        const PairedDataset ds = load_dataset(root, root / "list.json");
        REQUIRE(ds.entries.size() == 2);
        CHECK(ds.entries[0].name == "m1");
        CHECK(ds.entries[1].name == "second");
        CHECK(ds.downsample == 2);

        std::ofstream(root / "bad.json") << R"({"psf": "kernel.png", "pairs": [{"lensless": "x/none.png", "lensed": "x/t1.png"}]})";
        CHECK_THROWS_WITH(load_dataset(root, root / "bad.json"), doctest::Contains("none.png"));
        std::ofstream(root / "junk.json") << "{";
        CHECK_THROWS(load_dataset(root, root / "junk.json"));
    }
}

TEST_CASE("identity fixture with gradient solvers") {
    const PairedDataset ds = load_dataset(identity_fixture(3));
    for (Algorithm algo : {Algorithm::gd, Algorithm::nesterov, Algorithm::fista, Algorithm::apgd}) {
        for (int n : {1, 10}) {
            const DatasetEvaluation ev = evaluate_dataset(ds, options_for(algo, n));
            CAPTURE(to_string(algo));
            CHECK(ev.failed == 0);
            CHECK(ev.aggregate.mse <= 1e-6);
            CHECK(ev.aggregate.ssim >= 0.999);
        }
    }
}

TEST_CASE("identity fixture with ADMM") {
    // With unit-sum PSFs the default penalties leave the data term weak
    // (mu1 |H|^2 <= 1e-6 against mu3 = 4e-5), so the fixture uses penalties
    // dominated by the data splitting.
    const PairedDataset ds = load_dataset(identity_fixture(3));
    EvaluationOptions o = options_for(Algorithm::admm, 1);
    o.solver.admm = {1.0, 1e-4, 1e-4};
    for (int n : {1, 10, 100}) {
        o.solver.n_iter = n;
        const DatasetEvaluation ev = evaluate_dataset(ds, o);
        CAPTURE(n);
        CHECK(ev.failed == 0);
        CHECK(ev.aggregate.mse <= 1e-6);
        CHECK(ev.aggregate.ssim >= 0.999);
    }
}

TEST_CASE("synthetic dataset: ADMM beats the raw measurement") {
    const fs::path root = synthetic_fixture("synth");
    const PairedDataset ds = load_dataset(root);
    REQUIRE(ds.entries.size() == 10);

    double raw_psnr = 0.0;
    for (const auto& e : ds.entries) raw_psnr += *compare(load_image(e.lensless), load_image(e.lensed)).psnr_db;
    raw_psnr /= 10.0;

    const DatasetEvaluation ev100 = evaluate_dataset(ds, options_for(Algorithm::admm, 100));
    const DatasetEvaluation ev10 = evaluate_dataset(ds, options_for(Algorithm::admm, 10));
    REQUIRE(ev100.failed == 0);
    MESSAGE("raw " << raw_psnr << " dB, admm10 " << *ev10.aggregate.psnr_db << " dB, admm100 "
                   << *ev100.aggregate.psnr_db << " dB");
    CHECK(*ev100.aggregate.psnr_db >= raw_psnr + 3.0);
    CHECK(*ev100.aggregate.psnr_db >= *ev10.aggregate.psnr_db);

    double mse_sum = 0.0, ssim_sum = 0.0, psnr_sum = 0.0;
    for (const auto& f : ev100.files) {
        mse_sum += f.report->mse;
        ssim_sum += f.report->ssim;
        psnr_sum += *f.report->psnr_db;
    }
    CHECK(std::abs(ev100.aggregate.mse - mse_sum / 10.0) <= 1e-12);
    CHECK(std::abs(ev100.aggregate.ssim - ssim_sum / 10.0) <= 1e-12);
    CHECK(std::abs(*ev100.aggregate.psnr_db - psnr_sum / 10.0) <= 1e-12);
}

TEST_CASE("evaluation is deterministic across worker counts") {
    const PairedDataset ds = load_dataset(synthetic_fixture("jobs", 5));
    EvaluationOptions o = options_for(Algorithm::fista, 20);
    const DatasetEvaluation one = evaluate_dataset(ds, o);
    o.jobs = 4;
    const DatasetEvaluation four = evaluate_dataset(ds, o);
    REQUIRE(one.files.size() == four.files.size());
    for (std::size_t i = 0; i < one.files.size(); ++i) {
        CHECK(one.files[i].name == four.files[i].name);
        CHECK(one.files[i].report->mse == four.files[i].report->mse);
        CHECK(one.files[i].report->ssim == four.files[i].report->ssim);
    }
    CHECK(one.aggregate.mse == four.aggregate.mse);
}

TEST_CASE("per-file failures are recorded and skipped") {
    const fs::path root = synthetic_fixture("fail", 3);
    write_raw_array(ImageTensor(32, 32, 1), root / "diffuser" / "scene_001.lpc");
    const DatasetEvaluation ev = evaluate_dataset(load_dataset(root), options_for(Algorithm::gd, 5));
    CHECK(ev.failed == 1);
    CHECK(ev.succeeded == 2);
    CHECK(!ev.files[1].report);
    CHECK(ev.files[1].error.find("shape") != std::string::npos);
    CHECK(ev.aggregate.mse == doctest::Approx((ev.files[0].report->mse + ev.files[2].report->mse) / 2.0));
}

TEST_CASE("output images are written") {
    const PairedDataset ds = load_dataset(identity_fixture(2));
    EvaluationOptions o = options_for(Algorithm::gd, 1);
    o.output_dir = testing::temp_dir("outimg") / "recon";
    evaluate_dataset(ds, o);
    const ImageTensor back = load_image(*o.output_dir / "img0.png");
    const ImageTensor want = load_image(ds.entries[0].lensed);
    CHECK(testing::max_abs_diff(back.data(), want.data()) <= 1.0 / 65535.0);
}

TEST_CASE("evaluate_single snapshots") {
    const PairedDataset ds = load_dataset(synthetic_fixture("single", 2));
    const EvaluationOptions o = options_for(Algorithm::admm, 100);

    const auto zero = evaluate_single(ds, 0, o, {0});
    REQUIRE(zero.size() == 1);
    CHECK(zero[0].iteration == 0);
    CHECK(zero[0].image.max_value() == 0.0);
    const ImageTensor ref = load_image(ds.entries[0].lensed);
    CHECK(zero[0].report.mse == doctest::Approx(mse(ImageTensor(ref.shape()), compare(ref, ref).mse == 0.0 ? [&] {
        ImageTensor r = ref;
        for (double& v : r.data()) v /= ref.max_value();
        return r;
    }() : ref)));

    const auto snaps = evaluate_single(ds, 1, o, {100, 5});
    REQUIRE(snaps.size() == 2);
    CHECK(snaps[0].iteration == 100);
    CHECK(snaps[1].iteration == 5);

    // snapshot at k equals a fresh k-iteration evaluation
    EvaluationOptions five = o;
    five.solver.n_iter = 5;
    PairedDataset only = ds;
    only.entries = {ds.entries[1]};
    CHECK(evaluate_dataset(only, five).files[0].report->mse == doctest::Approx(snaps[1].report.mse).epsilon(1e-12));

    CHECK_THROWS_AS(evaluate_single(ds, 2, o, {1}), std::out_of_range);
    CHECK_THROWS(evaluate_single(ds, 0, o, {-1}));
}

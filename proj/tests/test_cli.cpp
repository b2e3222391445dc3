#include "doctest.h"

#include "json.hpp"

#include "lensless/image_io.hpp"
#include "lensless/simulate.hpp"
#include "run_cli.hpp"
#include "support.hpp"

using namespace lensless;
using nlohmann::json;
using testing::run_cli;
namespace fs = std::filesystem;

namespace {

std::vector<json> json_lines(const std::string& text) {
    std::vector<json> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty()) out.push_back(json::parse(line));
    }
    return out;
}

// delta PSF, one measurement and its lensed twin
fs::path delta_fixture() {
    const fs::path dir = testing::temp_dir("cli_delta");
    write_raw_array(testing::delta_psf(16, 16), dir / "psf.lpc");
    write_raw_array(synthetic_scene(16, 16, 1, 4), dir / "y.lpc");
    return dir;
}

fs::path identity_dataset() {
    const fs::path root = testing::temp_dir("cli_identity");
    fs::create_directories(root / "diffuser");
    fs::create_directories(root / "lensed");
    save_image(testing::delta_psf(16, 16), root / "psf.png", 16);
    for (int i = 0; i < 3; ++i) {
        const ImageTensor img = synthetic_scene(16, 16, 1, 70 + i);
        save_image(img, root / "diffuser" / ("p" + std::to_string(i) + ".png"), 16);
        save_image(img, root / "lensed" / ("p" + std::to_string(i) + ".png"), 16);
    }
    return root;
}

}  // namespace

TEST_CASE("help exits 0 for every subcommand without side effects") {
    const fs::path dir = testing::temp_dir("cli_help");
    for (const char* sub : {"", "recon", "simulate", "benchmark", "evaluate", "metrics", "psf-report"}) {
        const auto r = run_cli(std::string(sub) + " --help", dir);
        CAPTURE(sub);
        CHECK(r.exit_code == 0);
        CHECK(r.out.find("Usage") != std::string::npos);
    }
    CHECK(fs::is_empty(dir));
    const auto recon = run_cli("recon --help", dir);
    for (const char* flag : {"--psf", "--data", "--algo", "--n-iter", "--downsample", "--gray", "--out", "--save-every",
                             "--step-size", "--tv-weight", "--mu1", "--mu2", "--mu3", "--bayer", "--config",
                             "--no-timing", "--psf-floor"}) {
        CHECK(recon.out.find(flag) != std::string::npos);
    }
}

TEST_CASE("usage errors exit 1") {
    const fs::path dir = delta_fixture();
    const auto unknown = run_cli("recon --psf psf.lpc --data y.lpc --algo unknown", dir);
    CHECK(unknown.exit_code == 1);
    CHECK(unknown.err.find("gd, nesterov, fista, admm, apgd") != std::string::npos);
    CHECK(unknown.out.empty());
    CHECK(run_cli("recon --psf psf.lpc --data y.lpc --frobnicate", dir).exit_code == 1);
    CHECK(run_cli("recon --psf missing.lpc --data y.lpc", dir).exit_code == 1);
    CHECK(run_cli("recon --data y.lpc", dir).exit_code == 1);
    CHECK(run_cli("", dir).exit_code == 1);
    CHECK(run_cli("nosuch", dir).exit_code == 1);
    CHECK(run_cli("metrics --recon y.lpc --ref y.lpc --region 1,2,3", dir).exit_code == 1);
    CHECK(run_cli("benchmark --size 12by12", dir).exit_code == 1);
    CHECK(run_cli("recon --psf psf.lpc --data y.lpc --config absent.txt", dir).exit_code == 1);
    write_raw_array(ImageTensor(8, 8, 1, 0.5), dir / "small.lpc");
    CHECK(run_cli("recon --psf psf.lpc --data small.lpc", dir).exit_code == 1);
}

TEST_CASE("recon on a delta psf returns the measurement") {
    const fs::path dir = delta_fixture();
    const auto r = run_cli("recon --psf psf.lpc --data y.lpc --algo fista --n-iter 10 --out x.lpc", dir);
    REQUIRE(r.exit_code == 0);
    const json j = json::parse(r.out);
    CHECK(j["iterations"] == 10);
    CHECK(j["algorithm"] == "fista");
    CHECK(j.contains("seconds"));
    const ImageTensor x = read_raw_array(dir / "x.lpc");
    const ImageTensor y = read_raw_array(dir / "y.lpc");
    CHECK(testing::max_abs_diff(x.data(), y.data()) <= 1e-6);
}

TEST_CASE("recon admm writes output and snapshots") {
    const fs::path dir = delta_fixture();
    const auto r = run_cli("recon --psf psf.lpc --data y.lpc --algo admm --n-iter 5 --save-every 2 --out out/r.png", dir);
    REQUIRE(r.exit_code == 0);
    CHECK(fs::exists(dir / "out" / "r.png"));
    CHECK(fs::exists(dir / "out" / "r_00002.png"));
    CHECK(fs::exists(dir / "out" / "r_00004.png"));
    const json j = json::parse(r.out);
    CHECK(j["snapshots"].size() == 2);
    CHECK(j["snapshots"][1]["iteration"] == 4);
}

TEST_CASE("config file sets flags and the command line wins") {
    const fs::path dir = delta_fixture();
    std::ofstream(dir / "run.cfg") << "# defaults\nalgo = gd\nn-iter = 3\nno-timing = true\n";
    const json a = json::parse(run_cli("recon --config run.cfg --psf psf.lpc --data y.lpc", dir).out);
    CHECK(a["algorithm"] == "gd");
    CHECK(a["iterations"] == 3);
    CHECK(!a.contains("seconds"));
    const json b = json::parse(run_cli("recon --config run.cfg --psf psf.lpc --data y.lpc --n-iter 6", dir).out);
    CHECK(b["iterations"] == 6);
}

TEST_CASE("output directory override") {
    const fs::path dir = delta_fixture();
    const auto r = run_cli("recon --psf psf.lpc --data y.lpc --n-iter 2 --out r.lpc", dir, "LENSLESS_OUTPUT_DIR=elsewhere");
    REQUIRE(r.exit_code == 0);
    CHECK(fs::exists(dir / "elsewhere" / "r.lpc"));
    CHECK(!fs::exists(dir / "r.lpc"));
}

TEST_CASE("metrics on identical files") {
    const fs::path dir = delta_fixture();
    const auto r = run_cli("metrics --recon y.lpc --ref y.lpc", dir);
    REQUIRE(r.exit_code == 0);
    const json j = json::parse(r.out);
    CHECK(j["mse"] == 0.0);
    CHECK(j["ssim"] == 1.0);
    CHECK(j["psnr_db"].is_null());
}

TEST_CASE("simulate is deterministic") {
    const fs::path dir = testing::temp_dir("cli_sim");
    const std::string args = "simulate --size 32x32 --snr-db 40 --seed 9 --scene-seed 2 --psf-seed 3 --out ";
    const auto a = run_cli(args + "a.lpc", dir);
    const auto b = run_cli(args + "b.lpc", dir);
    REQUIRE(a.exit_code == 0);
    CHECK(testing::read_file(dir / "a.lpc") == testing::read_file(dir / "b.lpc"));
    json ja = json::parse(a.out), jb = json::parse(b.out);
    ja.erase("output");
    jb.erase("output");
    CHECK(ja == jb);
    CHECK(std::abs(ja["measured_snr_db"].get<double>() - 40.0) <= 0.5);
    const auto c = run_cli("simulate --size 32x32 --snr-db 40 --seed 10 --scene-seed 2 --psf-seed 3 --out c.lpc", dir);
    CHECK(testing::read_file(dir / "a.lpc") != testing::read_file(dir / "c.lpc"));

    const auto ds = run_cli("simulate --dataset synth --pairs 2 --size 16x16", dir);
    REQUIRE(ds.exit_code == 0);
    CHECK(fs::exists(dir / "synth" / "diffuser" / "scene_001.lpc"));
    CHECK(json::parse(ds.out)["pairs"] == 2);
}

TEST_CASE("evaluate on the identity fixture") {
    const fs::path root = identity_dataset();
    const auto r = run_cli("evaluate --dataset . --algo fista --n-iter 10 --jobs 2", root);
    REQUIRE(r.exit_code == 0);
    const auto lines = json_lines(r.out);
    REQUIRE(lines.size() == 4);
    CHECK(lines[0]["name"] == "p0");
    CHECK(lines[0].contains("seconds"));
    CHECK(lines[3]["aggregate"]["ssim"].get<double>() >= 0.999);
    CHECK(lines[3]["succeeded"] == 3);

    const auto admm = run_cli("evaluate --dataset . --algo admm --n-iter 5 --mu1 1 --mu2 1e-4 --mu3 1e-4", root);
    REQUIRE(admm.exit_code == 0);
    CHECK(json_lines(admm.out).back()["aggregate"]["ssim"].get<double>() >= 0.999);

    const auto single = run_cli("evaluate --dataset . --index 2 --snapshots 0,4 --algo gd --out-dir snaps", root);
    REQUIRE(single.exit_code == 0);
    const auto snaps = json_lines(single.out);
    REQUIRE(snaps.size() == 2);
    CHECK(snaps[0]["iteration"] == 0);
    CHECK(snaps[1]["iteration"] == 4);
    CHECK(snaps[1]["name"] == "p2");
    CHECK(fs::exists(root / "snaps" / "p2_4.png"));
    CHECK(run_cli("evaluate --dataset . --index 3", root).exit_code == 1);
}

TEST_CASE("evaluate reports per-file failures with exit 2") {
    const fs::path root = identity_dataset();
    save_image(ImageTensor(8, 8, 1, 0.5), root / "diffuser" / "p1.png");
    const auto r = run_cli("evaluate --dataset . --algo gd --n-iter 2 --no-timing", root);
    CHECK(r.exit_code == 2);
    const auto lines = json_lines(r.out);
    REQUIRE(lines.size() == 4);
    CHECK(lines[1].contains("error"));
    CHECK(lines[3]["failed"] == 1);
    CHECK(lines[3]["succeeded"] == 2);
}

TEST_CASE("psf-report and benchmark emit JSON") {
    const fs::path dir = delta_fixture();
    const auto p = run_cli("psf-report --psf psf.lpc", dir);
    REQUIRE(p.exit_code == 0);
    const json jp = json::parse(p.out);
    CHECK(jp["channels"][0]["conditioning"].get<double>() == doctest::Approx(1.0));

    const auto b = run_cli("benchmark --size 32x32 --n-iter-gd 10 --n-iter-admm 3 --repeats 2", dir);
    REQUIRE(b.exit_code == 0);
    const json jb = json::parse(b.out);
    CHECK(jb["timings"].size() == 4);
    CHECK(jb["speedup"].contains("gd"));
    CHECK(jb["speedup"].contains("admm"));
    CHECK(jb["paths_agree"] == true);
}

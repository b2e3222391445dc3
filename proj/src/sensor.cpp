#include "lensless/sensor.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "lensless/image_io.hpp"

namespace lensless {

namespace {

enum Color { kRed = 0, kGreen = 1, kBlue = 2 };

std::array<Color, 4> tile(BayerPattern p) {
    switch (p) {
        case BayerPattern::rggb: return {kRed, kGreen, kGreen, kBlue};
        case BayerPattern::bggr: return {kBlue, kGreen, kGreen, kRed};
        case BayerPattern::grbg: return {kGreen, kRed, kBlue, kGreen};
        case BayerPattern::gbrg: return {kGreen, kBlue, kRed, kGreen};
    }
    throw std::invalid_argument("unknown Bayer pattern");
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_number(const std::string& key, const std::string& text) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (trim(text.substr(used)).empty()) return v;
    } catch (const std::logic_error&) {
    }
    throw std::invalid_argument("Bayer sidecar: '" + key + "' is not a number: '" + text + "'");
}

// Bilinear kernels written as normalized convolutions: green uses the
// 4-neighbourhood, red/blue the full 3x3 with weights 1-2-1.
constexpr double kGreenKernel[3][3] = {{0, 1, 0}, {1, 4, 1}, {0, 1, 0}};
constexpr double kRedBlueKernel[3][3] = {{1, 2, 1}, {2, 4, 2}, {1, 2, 1}};

}  // namespace

BayerPattern parse_bayer_pattern(const std::string& text) {
    std::string lower = trim(text);
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    if (lower == "rggb") return BayerPattern::rggb;
    if (lower == "bggr") return BayerPattern::bggr;
    if (lower == "grbg") return BayerPattern::grbg;
    if (lower == "gbrg") return BayerPattern::gbrg;
    throw std::invalid_argument("unknown Bayer pattern '" + text + "' (expected RGGB, BGGR, GRBG or GBRG)");
}

const char* to_string(BayerPattern pattern) {
    switch (pattern) {
        case BayerPattern::rggb: return "RGGB";
        case BayerPattern::bggr: return "BGGR";
        case BayerPattern::grbg: return "GRBG";
        case BayerPattern::gbrg: return "GBRG";
    }
    return "?";
}

void validate(const BayerFrame& frame) {
    if (frame.height == 0 || frame.width == 0 || frame.height % 2 != 0 || frame.width % 2 != 0) {
        throw std::invalid_argument("Bayer frame dimensions must be even and non-zero, got " +
                                    std::to_string(frame.height) + "x" + std::to_string(frame.width));
    }
    if (frame.bit_depth != 10 && frame.bit_depth != 12 && frame.bit_depth != 16) {
        throw std::invalid_argument("Bayer bit depth must be 10, 12 or 16, got " + std::to_string(frame.bit_depth));
    }
    const double max_code = std::ldexp(1.0, frame.bit_depth);
    if (!(frame.black_level >= 0.0 && frame.black_level < max_code - 1.0)) {
        throw std::invalid_argument("black level must lie in [0, 2^bit_depth - 1)");
    }
    if (!(frame.wb.red_gain > 0.0 && frame.wb.blue_gain > 0.0)) {
        throw std::invalid_argument("white-balance gains must be > 0");
    }
    if (frame.data.size() != frame.height * frame.width) {
        throw std::invalid_argument("Bayer frame data length does not match its dimensions");
    }
    tile(frame.pattern);
}

ImageTensor demosaic(const BayerFrame& frame) {
    validate(frame);
    const std::size_t h = frame.height;
    const std::size_t w = frame.width;
    const auto colors = tile(frame.pattern);
    const double scale = 1.0 / (std::ldexp(1.0, frame.bit_depth) - 1.0 - frame.black_level);

    std::vector<double> norm(h * w);
    for (std::size_t i = 0; i < norm.size(); ++i) {
        norm[i] = std::max(frame.data[i] - frame.black_level, 0.0) * scale;
    }
    const auto color_at = [&](std::size_t r, std::size_t c) { return colors[(r % 2) * 2 + (c % 2)]; };

    ImageTensor out(h, w, 3);
    for (int ch = 0; ch < 3; ++ch) {
        const auto& kernel = ch == kGreen ? kGreenKernel : kRedBlueKernel;
        for (std::size_t r = 0; r < h; ++r) {
            for (std::size_t c = 0; c < w; ++c) {
                double acc = 0.0, weight = 0.0;
                for (int dr = -1; dr <= 1; ++dr) {
                    // edge replication: out-of-range neighbours clamp to the border sample
                    const auto rr = static_cast<std::size_t>(
                        std::clamp(static_cast<long>(r) + dr, 0L, static_cast<long>(h) - 1));
                    for (int dc = -1; dc <= 1; ++dc) {
                        const double k = kernel[dr + 1][dc + 1];
                        if (k == 0.0) continue;
                        const auto cc = static_cast<std::size_t>(
                            std::clamp(static_cast<long>(c) + dc, 0L, static_cast<long>(w) - 1));
                        if (color_at(rr, cc) != ch) continue;
                        acc += k * norm[rr * w + cc];
                        weight += k;
                    }
                }
                out.at(r, c, static_cast<std::size_t>(ch)) = acc / weight;
            }
        }
    }
    for (double& v : out.plane(kRed)) v *= frame.wb.red_gain;
    for (double& v : out.plane(kBlue)) v *= frame.wb.blue_gain;
    out.clip(0.0, 1.0);
    return out;
}

ImageTensor bayer_to_gray(const BayerFrame& frame) { return rgb_to_gray(demosaic(frame)); }

BayerSidecar parse_bayer_sidecar(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find_first_of("=:");
        if (eq == std::string::npos) {
            throw std::invalid_argument("Bayer sidecar line " + std::to_string(lineno) + ": expected 'key = value'");
        }
        std::string key = trim(line.substr(0, eq));
        std::transform(key.begin(), key.end(), key.begin(), [](unsigned char c) { return std::tolower(c); });
        kv[key] = trim(line.substr(eq + 1));
    }
    for (const char* key : {"pattern", "bit_depth", "black_level", "wb_gains"}) {
        if (!kv.count(key)) throw std::invalid_argument(std::string("Bayer sidecar: missing required key '") + key + "'");
    }

    BayerSidecar s;
    s.pattern = parse_bayer_pattern(kv["pattern"]);
    const double depth = parse_number("bit_depth", kv["bit_depth"]);
    s.bit_depth = static_cast<int>(depth);
    if (static_cast<double>(s.bit_depth) != depth) throw std::invalid_argument("Bayer sidecar: bit_depth must be an integer");
    s.black_level = parse_number("black_level", kv["black_level"]);
    std::string gains = kv["wb_gains"];
    std::replace(gains.begin(), gains.end(), ',', ' ');
    std::istringstream gs(gains);
    std::string red, blue, extra;
    if (!(gs >> red >> blue) || (gs >> extra)) {
        throw std::invalid_argument("Bayer sidecar: wb_gains must be 'red_gain, blue_gain'");
    }
    s.wb.red_gain = parse_number("wb_gains", red);
    s.wb.blue_gain = parse_number("wb_gains", blue);
    return s;
}

BayerSidecar read_bayer_sidecar(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open Bayer sidecar '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_bayer_sidecar(ss.str());
}

BayerFrame load_bayer_frame(const std::filesystem::path& raw, const std::filesystem::path& sidecar) {
    const BayerSidecar meta = read_bayer_sidecar(sidecar);
    const ImageTensor counts = load_image(raw, /*as_float=*/false);
    if (counts.channels() != 1) {
        throw std::invalid_argument("'" + raw.string() + "': raw Bayer data must be single-channel");
    }
    BayerFrame frame;
    frame.height = counts.height();
    frame.width = counts.width();
    frame.pattern = meta.pattern;
    frame.bit_depth = meta.bit_depth;
    frame.black_level = meta.black_level;
    frame.wb = meta.wb;
    frame.data.assign(counts.data().begin(), counts.data().end());
    validate(frame);
    return frame;
}

}  // namespace lensless

#include "lensless/image.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace lensless {

namespace {

void validate_shape(const Shape& shape) {
    if (shape.height == 0 || shape.width == 0) {
        throw std::invalid_argument("image dimensions must be at least 1x1, got " + to_string(shape));
    }
    if (shape.channels != 1 && shape.channels != 3) {
        throw std::invalid_argument("image must have 1 or 3 channels, got " +
                                    std::to_string(shape.channels));
    }
}

}  // namespace

std::string to_string(const Shape& shape) {
    std::ostringstream os;
    os << shape.height << "x" << shape.width << "x" << shape.channels;
    return os.str();
}

ImageTensor::ImageTensor(std::size_t height, std::size_t width, std::size_t channels, double fill)
    : ImageTensor(Shape{height, width, channels}, fill) {}

ImageTensor::ImageTensor(Shape shape, double fill) : shape_(shape) {
    validate_shape(shape_);
    data_.assign(shape_.size(), fill);
}

ImageTensor::ImageTensor(Shape shape, std::vector<double> planar_data)
    : shape_(shape), data_(std::move(planar_data)) {
    validate_shape(shape_);
    if (data_.size() != shape_.size()) {
        throw std::invalid_argument("image data length " + std::to_string(data_.size()) +
                                    " does not match shape " + to_string(shape_));
    }
}

double ImageTensor::max_value() const { return *std::max_element(data_.begin(), data_.end()); }

double ImageTensor::min_value() const { return *std::min_element(data_.begin(), data_.end()); }

bool ImageTensor::all_finite() const {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

void ImageTensor::fill(double value) { std::fill(data_.begin(), data_.end(), value); }

void ImageTensor::clip(double lo, double hi) {
    for (double& v : data_) v = std::clamp(v, lo, hi);
}

Region parse_region(const std::string& text) {
    std::vector<long long> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            long long value = std::stoll(item, &used);
            if (used != item.size() && item.find_first_not_of(" \t", used) != std::string::npos) {
                throw std::invalid_argument(item);
            }
            parts.push_back(value);
        } catch (const std::logic_error&) {
            throw std::invalid_argument("region must be 'top,left,height,width', got '" + text + "'");
        }
    }
    if (parts.size() != 4 || parts[0] < 0 || parts[1] < 0 || parts[2] < 1 || parts[3] < 1) {
        throw std::invalid_argument("region must be 'top,left,height,width' with height,width >= 1, got '" +
                                    text + "'");
    }
    return Region{static_cast<std::size_t>(parts[0]), static_cast<std::size_t>(parts[1]),
                  static_cast<std::size_t>(parts[2]), static_cast<std::size_t>(parts[3])};
}

void require_same_shape(const ImageTensor& a, const ImageTensor& b, const char* what) {
    if (a.shape() != b.shape()) {
        throw std::invalid_argument(std::string(what) + ": shape mismatch " + to_string(a.shape()) +
                                    " vs " + to_string(b.shape()));
    }
}

ImageTensor downsample(const ImageTensor& img, std::size_t factor) {
    if (factor == 0) throw std::invalid_argument("downsample factor must be >= 1");
    if (factor > img.height() || factor > img.width()) {
        throw std::invalid_argument("downsample factor " + std::to_string(factor) +
                                    " exceeds image dimensions " + to_string(img.shape()));
    }
    if (factor == 1) return img;
    const std::size_t h = img.height() / factor;
    const std::size_t w = img.width() / factor;
    const double inv_area = 1.0 / static_cast<double>(factor * factor);
    ImageTensor out(h, w, img.channels());
    for (std::size_t c = 0; c < img.channels(); ++c) {
        for (std::size_t r = 0; r < h; ++r) {
            for (std::size_t col = 0; col < w; ++col) {
                double acc = 0.0;
                for (std::size_t dr = 0; dr < factor; ++dr) {
                    for (std::size_t dc = 0; dc < factor; ++dc) {
                        acc += img.at(r * factor + dr, col * factor + dc, c);
                    }
                }
                out.at(r, col, c) = acc * inv_area;
            }
        }
    }
    return out;
}

ImageTensor rgb_to_gray(const ImageTensor& img) {
    if (img.channels() != 3) {
        throw std::invalid_argument("rgb_to_gray expects 3 channels, got " + std::to_string(img.channels()));
    }
    ImageTensor out(img.height(), img.width(), 1);
    auto r = img.plane(0);
    auto g = img.plane(1);
    auto b = img.plane(2);
    auto dst = out.plane(0);
    for (std::size_t i = 0; i < dst.size(); ++i) {
        dst[i] = 0.299 * r[i] + 0.587 * g[i] + 0.114 * b[i];
    }
    return out;
}

ImageTensor extract_region(const ImageTensor& img, const Region& region) {
    if (region.height == 0 || region.width == 0 || region.top + region.height > img.height() ||
        region.left + region.width > img.width()) {
        std::ostringstream os;
        os << "region (top=" << region.top << ", left=" << region.left << ", height=" << region.height
           << ", width=" << region.width << ") is outside image " << to_string(img.shape());
        throw std::out_of_range(os.str());
    }
    ImageTensor out(region.height, region.width, img.channels());
    for (std::size_t c = 0; c < img.channels(); ++c) {
        for (std::size_t r = 0; r < region.height; ++r) {
            for (std::size_t col = 0; col < region.width; ++col) {
                out.at(r, col, c) = img.at(region.top + r, region.left + col, c);
            }
        }
    }
    return out;
}

ImageTensor resize_to(const ImageTensor& img, std::size_t height, std::size_t width) {
    if (height == 0 || width == 0) throw std::invalid_argument("resize target must be at least 1x1");
    if (height == img.height() && width == img.width()) return img;

    struct Tap {
        std::size_t lo, hi;
        double frac;
    };
    auto taps = [](std::size_t src, std::size_t dst) {
        std::vector<Tap> out(dst);
        const double scale = static_cast<double>(src) / static_cast<double>(dst);
        for (std::size_t i = 0; i < dst; ++i) {
            double pos = (static_cast<double>(i) + 0.5) * scale - 0.5;
            pos = std::clamp(pos, 0.0, static_cast<double>(src - 1));
            const auto lo = static_cast<std::size_t>(std::floor(pos));
            const std::size_t hi = std::min(lo + 1, src - 1);
            out[i] = Tap{lo, hi, pos - static_cast<double>(lo)};
        }
        return out;
    };
    const auto rows = taps(img.height(), height);
    const auto cols = taps(img.width(), width);

    ImageTensor out(height, width, img.channels());
    for (std::size_t c = 0; c < img.channels(); ++c) {
        for (std::size_t r = 0; r < height; ++r) {
            const Tap& ty = rows[r];
            for (std::size_t col = 0; col < width; ++col) {
                const Tap& tx = cols[col];
                // a + t (b - a) keeps constant inputs exact
                const double a = img.at(ty.lo, tx.lo, c);
                const double b = img.at(ty.lo, tx.hi, c);
                const double d = img.at(ty.hi, tx.lo, c);
                const double e = img.at(ty.hi, tx.hi, c);
                const double top = a + tx.frac * (b - a);
                const double bot = d + tx.frac * (e - d);
                out.at(r, col, c) = top + ty.frac * (bot - top);
            }
        }
    }
    return out;
}

}  // namespace lensless

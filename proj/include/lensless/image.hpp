#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace lensless {

struct Shape {
    std::size_t height = 0;
    std::size_t width = 0;
    std::size_t channels = 0;

    std::size_t plane_size() const { return height * width; }
    std::size_t size() const { return height * width * channels; }
    bool operator==(const Shape&) const = default;
};

std::string to_string(const Shape& shape);

/// H x W x C intensity image stored as C contiguous row-major planes.
///
/// Channel counts are restricted to 1 (grayscale) or 3 (RGB). Values are
/// nominally in [0, 1] once normalized, but intermediate solver images may
/// hold any finite value.
class ImageTensor {
public:
    ImageTensor(std::size_t height, std::size_t width, std::size_t channels, double fill = 0.0);
    explicit ImageTensor(Shape shape, double fill = 0.0);
    ImageTensor(Shape shape, std::vector<double> planar_data);

    const Shape& shape() const { return shape_; }
    std::size_t height() const { return shape_.height; }
    std::size_t width() const { return shape_.width; }
    std::size_t channels() const { return shape_.channels; }
    std::size_t size() const { return data_.size(); }

    std::span<double> data() { return data_; }
    std::span<const double> data() const { return data_; }

    std::span<double> plane(std::size_t c) {
        return std::span<double>(data_).subspan(c * shape_.plane_size(), shape_.plane_size());
    }
    std::span<const double> plane(std::size_t c) const {
        return std::span<const double>(data_).subspan(c * shape_.plane_size(), shape_.plane_size());
    }

    double& at(std::size_t row, std::size_t col, std::size_t c = 0) {
        return data_[(c * shape_.height + row) * shape_.width + col];
    }
    double at(std::size_t row, std::size_t col, std::size_t c = 0) const {
        return data_[(c * shape_.height + row) * shape_.width + col];
    }

    double max_value() const;
    double min_value() const;
    bool all_finite() const;

    void fill(double value);
    void clip(double lo, double hi);

    bool operator==(const ImageTensor&) const = default;

private:
    Shape shape_;
    std::vector<double> data_;
};

struct Region {
    std::size_t top = 0;
    std::size_t left = 0;
    std::size_t height = 1;
    std::size_t width = 1;
};

/// Parses "top,left,height,width".
Region parse_region(const std::string& text);

void require_same_shape(const ImageTensor& a, const ImageTensor& b, const char* what);

/// Box-filter binning: each output pixel is the mean of a factor x factor
/// block; trailing rows and columns that do not fill a block are dropped.
ImageTensor downsample(const ImageTensor& img, std::size_t factor);

/// BT.601 luma: 0.299 R + 0.587 G + 0.114 B.
ImageTensor rgb_to_gray(const ImageTensor& img);

ImageTensor extract_region(const ImageTensor& img, const Region& region);

/// Bilinear resampling with pixel-center alignment and clamped edges.
ImageTensor resize_to(const ImageTensor& img, std::size_t height, std::size_t width);

}  // namespace lensless

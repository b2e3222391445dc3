#include "lensless/image_io.hpp"

#include <png.h>
#include <tiffio.h>

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace lensless {

namespace fs = std::filesystem;

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const fs::path& path, const char* mode) {
    FilePtr f(std::fopen(path.c_str(), mode));
    if (!f) {
        throw std::runtime_error(std::string("cannot open '") + path.string() + "' for " +
                                 (mode[0] == 'r' ? "reading" : "writing") + ": " + std::strerror(errno));
    }
    return f;
}

// Interleaved integer samples as decoded from PNG/TIFF.
struct DecodedPixels {
    std::size_t height = 0;
    std::size_t width = 0;
    std::size_t channels = 0;
    int bit_depth = 0;
    std::vector<std::uint16_t> samples;
};

ImageTensor to_tensor(const DecodedPixels& px, bool as_float) {
    ImageTensor img(px.height, px.width, px.channels);
    const double scale = as_float ? 1.0 / static_cast<double>((1u << px.bit_depth) - 1u) : 1.0;
    for (std::size_t r = 0; r < px.height; ++r) {
        for (std::size_t col = 0; col < px.width; ++col) {
            for (std::size_t c = 0; c < px.channels; ++c) {
                img.at(r, col, c) = px.samples[(r * px.width + col) * px.channels + c] * scale;
            }
        }
    }
    return img;
}

std::string channel_error(const fs::path& path, std::size_t channels) {
    std::string kind = channels == 2 ? "gray+alpha" : channels == 4 ? "RGBA" : std::to_string(channels) + "-channel";
    return "'" + path.string() + "': unsupported channel count " + std::to_string(channels) + " (" + kind +
           "); only grayscale and RGB are accepted";
}

// ---- PNG ----------------------------------------------------------------

struct PngErrorState {
    char message[256] = {};
};

void png_error_handler(png_structp png, png_const_charp msg) {
    auto* state = static_cast<PngErrorState*>(png_get_error_ptr(png));
    std::snprintf(state->message, sizeof(state->message), "%s", msg);
    png_longjmp(png, 1);
}

void png_warning_handler(png_structp, png_const_charp) {}

DecodedPixels read_png(const fs::path& path) {
    FilePtr file = open_file(path, "rb");
    PngErrorState err;
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &err, png_error_handler, png_warning_handler);
    if (!png) throw std::runtime_error("libpng: out of memory");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw std::runtime_error("libpng: out of memory");
    }

    // Locals touched after setjmp live behind a pointer that is never reassigned.
    struct Scratch {
        DecodedPixels px;
        std::vector<png_bytep> rows;
        std::vector<png_byte> buffer;
    };
    const auto scratch = std::make_unique<Scratch>();
    auto& px = scratch->px;
    auto& rows = scratch->rows;
    auto& buffer = scratch->buffer;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw std::runtime_error("'" + path.string() + "': invalid PNG: " + err.message);
    }

    png_init_io(png, file.get());
    png_read_info(png, info);
    const int color_type = png_get_color_type(png, info);
    const int depth = png_get_bit_depth(png, info);

    if (color_type & PNG_COLOR_MASK_ALPHA) {
        const std::size_t ch = color_type == PNG_COLOR_TYPE_GRAY_ALPHA ? 2 : 4;
        png_destroy_read_struct(&png, &info, nullptr);
        throw std::runtime_error(channel_error(path, ch));
    }
    if (png_get_valid(png, info, PNG_INFO_tRNS)) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw std::runtime_error(channel_error(path, 4));
    }
    if (color_type == PNG_COLOR_TYPE_PALETTE) {
        png_set_palette_to_rgb(png);
    } else if (depth != 8 && depth != 16) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw std::runtime_error("'" + path.string() + "': unsupported bit depth " + std::to_string(depth) +
                                 "; only 8- and 16-bit images are accepted");
    }
    if (depth == 16 && std::endian::native == std::endian::little) png_set_swap(png);
    png_read_update_info(png, info);

    px.height = png_get_image_height(png, info);
    px.width = png_get_image_width(png, info);
    px.channels = png_get_channels(png, info);
    px.bit_depth = png_get_bit_depth(png, info);
    const std::size_t rowbytes = png_get_rowbytes(png, info);
    buffer.resize(rowbytes * px.height);
    rows.resize(px.height);
    for (std::size_t r = 0; r < px.height; ++r) rows[r] = buffer.data() + r * rowbytes;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    const std::size_t n = px.height * px.width * px.channels;
    px.samples.resize(n);
    if (px.bit_depth == 16) {
        std::memcpy(px.samples.data(), buffer.data(), n * sizeof(std::uint16_t));
    } else {
        std::copy(buffer.begin(), buffer.begin() + static_cast<std::ptrdiff_t>(n), px.samples.begin());
    }
    return std::move(px);
}

void write_png(const ImageTensor& img, const fs::path& path, int bit_depth) {
    const std::size_t h = img.height(), w = img.width(), ch = img.channels();
    const std::size_t bytes = bit_depth == 16 ? 2 : 1;
    std::vector<png_byte> buffer(h * w * ch * bytes);
    for (std::size_t r = 0; r < h; ++r) {
        for (std::size_t col = 0; col < w; ++col) {
            for (std::size_t c = 0; c < ch; ++c) {
                const std::uint32_t q = quantize(img.at(r, col, c), bit_depth);
                const std::size_t idx = ((r * w + col) * ch + c) * bytes;
                if (bytes == 2) {
                    buffer[idx] = static_cast<png_byte>(q >> 8);
                    buffer[idx + 1] = static_cast<png_byte>(q & 0xff);
                } else {
                    buffer[idx] = static_cast<png_byte>(q);
                }
            }
        }
    }
    std::vector<png_bytep> rows(h);
    for (std::size_t r = 0; r < h; ++r) rows[r] = buffer.data() + r * w * ch * bytes;

    FilePtr file = open_file(path, "wb");
    PngErrorState err;
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &err, png_error_handler, png_warning_handler);
    if (!png) throw std::runtime_error("libpng: out of memory");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw std::runtime_error("libpng: out of memory");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw std::runtime_error("'" + path.string() + "': failed to write PNG: " + err.message);
    }
    png_init_io(png, file.get());
    png_set_IHDR(png, info, static_cast<png_uint_32>(w), static_cast<png_uint_32>(h), bit_depth,
                 ch == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

// ---- TIFF ---------------------------------------------------------------

void silence_tiff() {
    static const bool once = [] {
        TIFFSetWarningHandler(nullptr);
        TIFFSetErrorHandler(nullptr);
        return true;
    }();
    (void)once;
}

struct TiffCloser {
    void operator()(TIFF* t) const {
        if (t) TIFFClose(t);
    }
};
using TiffPtr = std::unique_ptr<TIFF, TiffCloser>;

DecodedPixels read_tiff(const fs::path& path) {
    silence_tiff();
    TiffPtr tif(TIFFOpen(path.c_str(), "r"));
    if (!tif) throw std::runtime_error("'" + path.string() + "': cannot open as TIFF");

    std::uint32_t width = 0, height = 0;
    std::uint16_t spp = 1, bps = 8, planar = PLANARCONFIG_CONTIG, format = SAMPLEFORMAT_UINT;
    TIFFGetField(tif.get(), TIFFTAG_IMAGEWIDTH, &width);
    TIFFGetField(tif.get(), TIFFTAG_IMAGELENGTH, &height);
    TIFFGetFieldDefaulted(tif.get(), TIFFTAG_SAMPLESPERPIXEL, &spp);
    TIFFGetFieldDefaulted(tif.get(), TIFFTAG_BITSPERSAMPLE, &bps);
    TIFFGetFieldDefaulted(tif.get(), TIFFTAG_PLANARCONFIG, &planar);
    TIFFGetFieldDefaulted(tif.get(), TIFFTAG_SAMPLEFORMAT, &format);

    if (spp != 1 && spp != 3) throw std::runtime_error(channel_error(path, spp));
    if (bps != 8 && bps != 16) {
        throw std::runtime_error("'" + path.string() + "': unsupported bit depth " + std::to_string(bps) +
                                 "; only 8- and 16-bit images are accepted");
    }
    if (format != SAMPLEFORMAT_UINT) {
        throw std::runtime_error("'" + path.string() + "': unsupported TIFF sample format (only unsigned integer)");
    }
    if (planar != PLANARCONFIG_CONTIG && spp > 1) {
        throw std::runtime_error("'" + path.string() + "': planar-separate TIFF layout is not supported");
    }

    DecodedPixels px;
    px.height = height;
    px.width = width;
    px.channels = spp;
    px.bit_depth = bps;
    px.samples.resize(static_cast<std::size_t>(height) * width * spp);
    std::vector<unsigned char> line(TIFFScanlineSize(tif.get()));
    for (std::uint32_t r = 0; r < height; ++r) {
        if (TIFFReadScanline(tif.get(), line.data(), r) < 0) {
            throw std::runtime_error("'" + path.string() + "': failed to read TIFF scanline " + std::to_string(r));
        }
        auto* dst = px.samples.data() + static_cast<std::size_t>(r) * width * spp;
        const std::size_t n = static_cast<std::size_t>(width) * spp;
        if (bps == 16) {
            std::memcpy(dst, line.data(), n * sizeof(std::uint16_t));
        } else {
            std::copy(line.begin(), line.begin() + static_cast<std::ptrdiff_t>(n), dst);
        }
    }
    return px;
}

void write_tiff(const ImageTensor& img, const fs::path& path, int bit_depth) {
    silence_tiff();
    TiffPtr tif(TIFFOpen(path.c_str(), "w"));
    if (!tif) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    const auto w = static_cast<std::uint32_t>(img.width());
    const auto h = static_cast<std::uint32_t>(img.height());
    const auto ch = static_cast<std::uint16_t>(img.channels());
    TIFFSetField(tif.get(), TIFFTAG_IMAGEWIDTH, w);
    TIFFSetField(tif.get(), TIFFTAG_IMAGELENGTH, h);
    TIFFSetField(tif.get(), TIFFTAG_SAMPLESPERPIXEL, ch);
    TIFFSetField(tif.get(), TIFFTAG_BITSPERSAMPLE, static_cast<std::uint16_t>(bit_depth));
    TIFFSetField(tif.get(), TIFFTAG_SAMPLEFORMAT, SAMPLEFORMAT_UINT);
    TIFFSetField(tif.get(), TIFFTAG_PLANARCONFIG, PLANARCONFIG_CONTIG);
    TIFFSetField(tif.get(), TIFFTAG_PHOTOMETRIC, ch == 3 ? PHOTOMETRIC_RGB : PHOTOMETRIC_MINISBLACK);
    TIFFSetField(tif.get(), TIFFTAG_COMPRESSION, COMPRESSION_NONE);
    TIFFSetField(tif.get(), TIFFTAG_ROWSPERSTRIP, TIFFDefaultStripSize(tif.get(), 0));

    const std::size_t n = static_cast<std::size_t>(w) * ch;
    std::vector<std::uint8_t> line8(bit_depth == 8 ? n : 0);
    std::vector<std::uint16_t> line16(bit_depth == 16 ? n : 0);
    for (std::uint32_t r = 0; r < h; ++r) {
        for (std::uint32_t col = 0; col < w; ++col) {
            for (std::uint16_t c = 0; c < ch; ++c) {
                const std::uint32_t q = quantize(img.at(r, col, c), bit_depth);
                const std::size_t idx = static_cast<std::size_t>(col) * ch + c;
                if (bit_depth == 16) {
                    line16[idx] = static_cast<std::uint16_t>(q);
                } else {
                    line8[idx] = static_cast<std::uint8_t>(q);
                }
            }
        }
        void* data = bit_depth == 16 ? static_cast<void*>(line16.data()) : static_cast<void*>(line8.data());
        if (TIFFWriteScanline(tif.get(), data, r, 0) < 0) {
            throw std::runtime_error("'" + path.string() + "': failed to write TIFF scanline");
        }
    }
}

// ---- LPC1 ---------------------------------------------------------------

constexpr std::array<char, 4> kRawMagic{'L', 'P', 'C', '1'};

template <typename T>
void put_le(std::ostream& os, T value) {
    static_assert(std::is_trivially_copyable_v<T>);
    std::array<unsigned char, sizeof(T)> bytes;
    std::memcpy(bytes.data(), &value, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
    os.write(reinterpret_cast<const char*>(bytes.data()), sizeof(T));
}

template <typename T>
T get_le(std::istream& is) {
    std::array<unsigned char, sizeof(T)> bytes;
    if (!is.read(reinterpret_cast<char*>(bytes.data()), sizeof(T))) {
        throw std::runtime_error("truncated LPC1 file");
    }
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
    T value;
    std::memcpy(&value, bytes.data(), sizeof(T));
    return value;
}

enum class Sniffed { png, tiff, lpc, unknown };

Sniffed sniff(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path.string() + "' for reading");
    std::array<unsigned char, 8> head{};
    in.read(reinterpret_cast<char*>(head.data()), head.size());
    const auto got = in.gcount();
    if (got >= 8 && png_sig_cmp(head.data(), 0, 8) == 0) return Sniffed::png;
    if (got >= 4 && std::memcmp(head.data(), kRawMagic.data(), 4) == 0) return Sniffed::lpc;
    if (got >= 4 && ((head[0] == 'I' && head[1] == 'I' && head[2] == 42 && head[3] == 0) ||
                     (head[0] == 'M' && head[1] == 'M' && head[2] == 0 && head[3] == 42))) {
        return Sniffed::tiff;
    }
    return Sniffed::unknown;
}

void check_bit_depth(int bit_depth) {
    if (bit_depth != 8 && bit_depth != 16) {
        throw std::invalid_argument("bit depth must be 8 or 16, got " + std::to_string(bit_depth));
    }
}

}  // namespace

std::uint32_t quantize(double value, int bit_depth) {
    check_bit_depth(bit_depth);
    const double max_code = static_cast<double>((1u << bit_depth) - 1u);
    const double v = std::isfinite(value) ? std::clamp(value, 0.0, 1.0) : 0.0;
    return static_cast<std::uint32_t>(std::floor(v * max_code + 0.5));
}

ImageFormat format_from_extension(const fs::path& path) {
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char ch) { return std::tolower(ch); });
    if (ext == ".png") return ImageFormat::png;
    if (ext == ".tif" || ext == ".tiff") return ImageFormat::tiff;
    if (ext == ".lpc" || ext == ".raw") return ImageFormat::lpc_raw;
    throw std::invalid_argument("'" + path.string() + "': unrecognized image extension '" + ext +
                                "' (expected .png, .tif, .tiff, .lpc or .raw)");
}

ImageTensor load_image(const fs::path& path, bool as_float) {
    switch (sniff(path)) {
        case Sniffed::png:
            return to_tensor(read_png(path), as_float);
        case Sniffed::tiff:
            return to_tensor(read_tiff(path), as_float);
        case Sniffed::lpc:
            return read_raw_array(path);
        case Sniffed::unknown:
            break;
    }
    throw std::runtime_error("'" + path.string() + "': unrecognized image format (expected PNG, TIFF or LPC1)");
}

void save_image(const ImageTensor& img, const fs::path& path, int bit_depth) {
    switch (format_from_extension(path)) {
        case ImageFormat::png:
            check_bit_depth(bit_depth);
            write_png(img, path, bit_depth);
            return;
        case ImageFormat::tiff:
            check_bit_depth(bit_depth);
            write_tiff(img, path, bit_depth);
            return;
        case ImageFormat::lpc_raw:
            write_raw_array(img, path);
            return;
    }
}

ImageTensor read_raw_array(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path.string() + "' for reading");
    std::array<char, 4> magic{};
    if (!in.read(magic.data(), magic.size()) || magic != kRawMagic) {
        throw std::runtime_error("'" + path.string() + "': missing LPC1 magic");
    }
    const auto h = get_le<std::uint32_t>(in);
    const auto w = get_le<std::uint32_t>(in);
    const auto c = get_le<std::uint32_t>(in);
    if (c != 1 && c != 3) throw std::runtime_error(channel_error(path, c));
    if (h == 0 || w == 0) throw std::runtime_error("'" + path.string() + "': empty LPC1 array");
    std::vector<double> values(static_cast<std::size_t>(h) * w * c);
    try {
        for (double& v : values) v = get_le<double>(in);
    } catch (const std::runtime_error&) {
        throw std::runtime_error("'" + path.string() + "': truncated LPC1 data");
    }
    ImageTensor img(Shape{h, w, c}, std::move(values));
    if (!img.all_finite()) throw std::runtime_error("'" + path.string() + "': LPC1 data contains NaN or Inf");
    return img;
}

void write_raw_array(const ImageTensor& img, const fs::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    out.write(kRawMagic.data(), kRawMagic.size());
    put_le(out, static_cast<std::uint32_t>(img.height()));
    put_le(out, static_cast<std::uint32_t>(img.width()));
    put_le(out, static_cast<std::uint32_t>(img.channels()));
    for (double v : img.data()) put_le(out, v);
    if (!out) throw std::runtime_error("'" + path.string() + "': write failed");
}

}  // namespace lensless

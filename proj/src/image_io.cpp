#include "cadsynth/image_io.hpp"

#include <png.h>

#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>

#include "cadsynth/errors.hpp"

namespace cadsynth {

namespace {

struct FileCloser {
    void operator()(std::FILE *f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::filesystem::path &path, const char *mode) {
    FilePtr f(std::fopen(path.c_str(), mode));
    if (!f) throw IoError("cannot open '" + path.string() + "': " + std::strerror(errno));
    return f;
}

int color_type_for(int channels) {
    switch (channels) {
        case 1: return PNG_COLOR_TYPE_GRAY;
        case 2: return PNG_COLOR_TYPE_GRAY_ALPHA;
        case 3: return PNG_COLOR_TYPE_RGB;
        case 4: return PNG_COLOR_TYPE_RGB_ALPHA;
        default: throw std::invalid_argument("write_png: unsupported channel count");
    }
}

template <typename T>
void write_png_impl(const std::filesystem::path &path, const Raster<T> &img, int bit_depth) {
    FilePtr f = open_file(path, "wb");
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_write_struct(&png, &info);
        throw IoError("libpng initialization failed for '" + path.string() + "'");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError("failed writing PNG '" + path.string() + "'");
    }
    png_init_io(png, f.get());
    png_set_IHDR(png, info, img.width, img.height, bit_depth, color_type_for(img.channels), PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    if (bit_depth == 16) png_set_swap(png);  // our samples are host (little) endian

    std::vector<png_bytep> rows(img.height);
    for (int y = 0; y < img.height; ++y)
        rows[y] = reinterpret_cast<png_bytep>(
            const_cast<T *>(img.pixels.data() + static_cast<std::size_t>(y) * img.width * img.channels));
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    if (std::fflush(f.get()) != 0) throw IoError("failed flushing '" + path.string() + "'");
}

struct DecodedPng {
    int width = 0, height = 0, channels = 0, bit_depth = 0;
    std::vector<std::uint8_t> bytes;  // 16-bit samples stored little endian
};

DecodedPng decode_png(const std::filesystem::path &path) {
    FilePtr f = open_file(path, "rb");
    unsigned char sig[8];
    if (std::fread(sig, 1, 8, f.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0)
        throw FormatError("'" + path.string() + "' is not a PNG file");

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError("libpng initialization failed for '" + path.string() + "'");
    }
    DecodedPng out;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw FormatError("corrupt PNG '" + path.string() + "'");
    }
    png_init_io(png, f.get());
    png_set_sig_bytes(png, 8);
    png_read_info(png, info);

    const int color_type = png_get_color_type(png, info);
    const int depth = png_get_bit_depth(png, info);
    if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color_type == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    if (depth == 16) png_set_swap(png);
    png_read_update_info(png, info);

    out.width = static_cast<int>(png_get_image_width(png, info));
    out.height = static_cast<int>(png_get_image_height(png, info));
    out.channels = png_get_channels(png, info);
    out.bit_depth = png_get_bit_depth(png, info);
    const std::size_t row_bytes = png_get_rowbytes(png, info);
    out.bytes.resize(row_bytes * out.height);
    std::vector<png_bytep> rows(out.height);
    for (int y = 0; y < out.height; ++y) rows[y] = out.bytes.data() + row_bytes * y;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return out;
}

}  // namespace

void write_png(const std::filesystem::path &path, const Image8 &img) { write_png_impl(path, img, 8); }

void write_png(const std::filesystem::path &path, const Image16 &img) { write_png_impl(path, img, 16); }

Image8 read_png8(const std::filesystem::path &path) {
    DecodedPng d = decode_png(path);
    if (d.bit_depth != 8) throw FormatError("'" + path.string() + "' is not an 8-bit PNG");
    Image8 img(d.width, d.height, d.channels);
    img.pixels = std::move(d.bytes);
    return img;
}

Image16 read_png16(const std::filesystem::path &path) {
    DecodedPng d = decode_png(path);
    if (d.bit_depth != 16) throw FormatError("'" + path.string() + "' is not a 16-bit PNG");
    Image16 img(d.width, d.height, d.channels);
    std::memcpy(img.pixels.data(), d.bytes.data(), img.pixels.size() * sizeof(std::uint16_t));
    return img;
}

TextureMap read_png_texture(const std::filesystem::path &path, ColorSpace cs) {
    DecodedPng d = decode_png(path);
    // gray+alpha drops alpha, rgba keeps it
    const int out_channels = d.channels == 2 ? 1 : d.channels;
    TextureMap t(d.width, d.height, out_channels, cs);
    const double scale = d.bit_depth == 16 ? 1.0 / 65535.0 : 1.0 / 255.0;
    for (int y = 0; y < d.height; ++y)
        for (int x = 0; x < d.width; ++x)
            for (int c = 0; c < out_channels; ++c) {
                const std::size_t i = (static_cast<std::size_t>(y) * d.width + x) * d.channels + c;
                double v;
                if (d.bit_depth == 16) {
                    std::uint16_t s;
                    std::memcpy(&s, d.bytes.data() + i * 2, 2);
                    v = s * scale;
                } else {
                    v = d.bytes[i] * scale;
                }
                t.at(x, y, c) = static_cast<float>(v);
            }
    return t;
}

namespace {

void rgbe_to_float(const unsigned char rgbe[4], float out[3]) {
    if (rgbe[3] == 0) {
        out[0] = out[1] = out[2] = 0.0f;
        return;
    }
    const float f = std::ldexp(1.0f, static_cast<int>(rgbe[3]) - (128 + 8));
    out[0] = (rgbe[0] + 0.5f) * f;
    out[1] = (rgbe[1] + 0.5f) * f;
    out[2] = (rgbe[2] + 0.5f) * f;
}

void float_to_rgbe(const float c[3], unsigned char rgbe[4]) {
    const float v = std::max({c[0], c[1], c[2]});
    if (v < 1e-32f) {
        rgbe[0] = rgbe[1] = rgbe[2] = rgbe[3] = 0;
        return;
    }
    int e;
    const float m = std::frexp(v, &e) * 256.0f / v;
    rgbe[0] = static_cast<unsigned char>(std::max(0.0f, c[0]) * m);
    rgbe[1] = static_cast<unsigned char>(std::max(0.0f, c[1]) * m);
    rgbe[2] = static_cast<unsigned char>(std::max(0.0f, c[2]) * m);
    rgbe[3] = static_cast<unsigned char>(e + 128);
}

}  // namespace

TextureMap read_hdr(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "'");

    std::string line;
    std::getline(in, line);
    if (line.rfind("#?", 0) != 0) throw FormatError("'" + path.string() + "' is not a Radiance HDR file", 1);
    int line_no = 1;
    bool rgbe_format = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) break;
        if (line == "FORMAT=32-bit_rle_rgbe") rgbe_format = true;
        if (line.rfind("FORMAT=", 0) == 0 && !rgbe_format)
            throw FormatError("unsupported HDR pixel format '" + line + "'", line_no);
    }
    std::getline(in, line);
    ++line_no;
    int width = 0, height = 0;
    char ys[3] = {}, xs[3] = {};
    if (std::sscanf(line.c_str(), "%2s %d %2s %d", ys, &height, xs, &width) != 4 || std::string(ys) != "-Y" ||
        std::string(xs) != "+X" || width <= 0 || height <= 0)
        throw FormatError("unsupported HDR resolution line '" + line + "'", line_no);

    TextureMap img(width, height, 3, ColorSpace::linear);
    std::vector<unsigned char> scan(static_cast<std::size_t>(width) * 4);
    auto fail = [&](int y) { throw FormatError("truncated HDR data in '" + path.string() + "' at scanline " + std::to_string(y)); };
    for (int y = 0; y < height; ++y) {
        unsigned char head[4];
        if (!in.read(reinterpret_cast<char *>(head), 4)) fail(y);
        const bool rle = width >= 8 && width < 32768 && head[0] == 2 && head[1] == 2 && !(head[2] & 0x80) &&
                         ((head[2] << 8) | head[3]) == width;
        if (rle) {
            for (int c = 0; c < 4; ++c) {
                int x = 0;
                while (x < width) {
                    int count = in.get();
                    if (count == EOF) fail(y);
                    if (count > 128) {
                        count -= 128;
                        const int value = in.get();
                        if (value == EOF || x + count > width) fail(y);
                        for (int k = 0; k < count; ++k) scan[(x++) * 4 + c] = static_cast<unsigned char>(value);
                    } else {
                        if (count == 0 || x + count > width) fail(y);
                        for (int k = 0; k < count; ++k) {
                            const int value = in.get();
                            if (value == EOF) fail(y);
                            scan[(x++) * 4 + c] = static_cast<unsigned char>(value);
                        }
                    }
                }
            }
        } else {
            std::memcpy(scan.data(), head, 4);
            if (!in.read(reinterpret_cast<char *>(scan.data()) + 4, static_cast<std::streamsize>(scan.size()) - 4))
                fail(y);
        }
        for (int x = 0; x < width; ++x) {
            float rgb[3];
            rgbe_to_float(&scan[x * 4], rgb);
            for (int c = 0; c < 3; ++c) img.at(x, y, c) = rgb[c];
        }
    }
    return img;
}

void write_hdr(const std::filesystem::path &path, const TextureMap &img) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out << "#?RADIANCE\nFORMAT=32-bit_rle_rgbe\n\n-Y " << img.height() << " +X " << img.width() << "\n";
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x) {
            const Vec3 c = img.fetch_rgb(x, y);
            const float rgb[3] = {static_cast<float>(c.x), static_cast<float>(c.y), static_cast<float>(c.z)};
            unsigned char rgbe[4];
            float_to_rgbe(rgb, rgbe);
            out.write(reinterpret_cast<const char *>(rgbe), 4);
        }
    if (!out) throw IoError("failed writing '" + path.string() + "'");
}

TextureMap load_texture(const std::filesystem::path &path, ColorSpace cs) {
    std::string ext = path.extension().string();
    for (auto &ch : ext) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    if (ext == ".hdr") return read_hdr(path);
    return read_png_texture(path, cs);
}

}  // namespace cadsynth

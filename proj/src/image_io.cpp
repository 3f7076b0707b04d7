#include <csetjmp>
#include <cstdio>
#include <cmath>
#include <fstream>
#include <memory>
#include <string>

#include <jpeglib.h>
#include <png.h>

#include "bimef/image.hpp"

namespace bimef {
namespace {

struct FileCloser {
    void operator()(std::FILE* f) const noexcept {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::filesystem::path& path, const char* mode) {
    FilePtr f(std::fopen(path.c_str(), mode));
    if (!f) throw IoError("cannot open '" + path.string() + "'");
    return f;
}

enum class Format { png, jpeg, unknown };

Format sniff(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    unsigned char magic[8] = {};
    in.read(reinterpret_cast<char*>(magic), sizeof magic);
    if (in.gcount() >= 8 && png_sig_cmp(magic, 0, 8) == 0) return Format::png;
    if (in.gcount() >= 3 && magic[0] == 0xFF && magic[1] == 0xD8 && magic[2] == 0xFF) {
        return Format::jpeg;
    }
    return Format::unknown;
}

// Decoded 8-bit samples with `channels` per pixel (1..4).
struct Decoded {
    int width = 0;
    int height = 0;
    int channels = 0;
    std::vector<unsigned char> samples;
};

// libpng reports through these instead of stderr; the message is kept for the
// exception thrown by the caller.
void png_fail(png_structp png, png_const_charp msg) {
    *static_cast<std::string*>(png_get_error_ptr(png)) = msg;
    png_longjmp(png, 1);
}

void png_ignore(png_structp, png_const_charp) {}

// The setjmp frames below hold no objects with nontrivial destructors
// between setjmp and the libpng/libjpeg calls that may longjmp.
bool decode_png(std::FILE* fp, Decoded& out, std::string& err) {
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &err, png_fail, png_ignore);
    if (!png) {
        err = "png_create_read_struct failed";
        return false;
    }
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        err = "png_create_info_struct failed";
        return false;
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        err = "corrupt PNG stream: " + err;
        return false;
    }
    png_init_io(png, fp);
    png_read_info(png, info);

    const int color = png_get_color_type(png, info);
    const int depth = png_get_bit_depth(png, info);
    if (depth == 16) png_set_strip_16(png);
    if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    png_set_interlace_handling(png);
    png_read_update_info(png, info);

    out.width = static_cast<int>(png_get_image_width(png, info));
    out.height = static_cast<int>(png_get_image_height(png, info));
    out.channels = png_get_channels(png, info);
    const std::size_t rowbytes = png_get_rowbytes(png, info);
    out.samples.resize(rowbytes * static_cast<std::size_t>(out.height));
    std::vector<png_bytep> rows(static_cast<std::size_t>(out.height));
    for (int r = 0; r < out.height; ++r) {
        rows[static_cast<std::size_t>(r)] = out.samples.data() + rowbytes * static_cast<std::size_t>(r);
    }
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return true;
}

struct JpegErrorManager {
    jpeg_error_mgr pub;
    std::jmp_buf jump;
    char message[JMSG_LENGTH_MAX];
};

void jpeg_error_exit(j_common_ptr cinfo) {
    auto* mgr = reinterpret_cast<JpegErrorManager*>(cinfo->err);
    (*cinfo->err->format_message)(cinfo, mgr->message);
    std::longjmp(mgr->jump, 1);
}

bool decode_jpeg(std::FILE* fp, Decoded& out, std::string& err) {
    jpeg_decompress_struct cinfo{};
    JpegErrorManager jerr{};
    cinfo.err = jpeg_std_error(&jerr.pub);
    jerr.pub.error_exit = jpeg_error_exit;
    if (setjmp(jerr.jump)) {
        err = jerr.message;
        jpeg_destroy_decompress(&cinfo);
        return false;
    }
    jpeg_create_decompress(&cinfo);
    jpeg_stdio_src(&cinfo, fp);
    jpeg_read_header(&cinfo, TRUE);
    if (cinfo.jpeg_color_space == JCS_CMYK || cinfo.jpeg_color_space == JCS_YCCK) {
        jpeg_destroy_decompress(&cinfo);
        err = "CMYK JPEG is not supported";
        return false;
    }
    cinfo.out_color_space = JCS_RGB;
    jpeg_start_decompress(&cinfo);

    out.width = static_cast<int>(cinfo.output_width);
    out.height = static_cast<int>(cinfo.output_height);
    out.channels = cinfo.output_components;
    const std::size_t stride = static_cast<std::size_t>(out.width) * out.channels;
    out.samples.resize(stride * static_cast<std::size_t>(out.height));
    while (cinfo.output_scanline < cinfo.output_height) {
        JSAMPROW row = out.samples.data() + stride * cinfo.output_scanline;
        jpeg_read_scanlines(&cinfo, &row, 1);
    }
    jpeg_finish_decompress(&cinfo);
    jpeg_destroy_decompress(&cinfo);
    return true;
}

Image to_image(const Decoded& d) {
    Image img(d.width, d.height);
    auto dst = img.values();
    const std::size_t n = img.pixel_count();
    for (std::size_t i = 0; i < n; ++i) {
        const unsigned char* s = d.samples.data() + i * static_cast<std::size_t>(d.channels);
        for (int c = 0; c < 3; ++c) {
            // 1-2 channels are gray(+alpha); 3-4 are RGB(+alpha).
            const unsigned char v = d.channels <= 2 ? s[0] : s[c];
            dst[3 * i + static_cast<std::size_t>(c)] = v / 255.0;
        }
    }
    return img;
}

bool encode_png(std::FILE* fp, const unsigned char* samples, int width, int height,
                int channels, std::string& err) {
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &err, png_fail, png_ignore);
    if (!png) {
        err = "png_create_write_struct failed";
        return false;
    }
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        err = "png_create_info_struct failed";
        return false;
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        err = "PNG encode failed: " + err;
        return false;
    }
    png_init_io(png, fp);
    png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), 8,
                 channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    const std::size_t stride = static_cast<std::size_t>(width) * channels;
    for (int r = 0; r < height; ++r) {
        png_write_row(png, samples + stride * static_cast<std::size_t>(r));
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    return true;
}

void write_png(const std::filesystem::path& path, const std::vector<unsigned char>& samples,
               int width, int height, int channels) {
    auto fp = open_file(path, "wb");
    std::string err;
    if (!encode_png(fp.get(), samples.data(), width, height, channels, err)) {
        throw IoError("cannot write '" + path.string() + "': " + err);
    }
    if (std::fflush(fp.get()) != 0) throw IoError("cannot write '" + path.string() + "'");
}

}  // namespace

unsigned char to_byte(double v) noexcept {
    if (!(v > 0.0)) return 0;
    if (v >= 1.0) return 255;
    return static_cast<unsigned char>(std::lround(v * 255.0));
}

Image load_image(const std::filesystem::path& path) {
    const Format fmt = sniff(path);
    if (fmt == Format::unknown) {
        throw FormatError("'" + path.string() + "' is neither PNG nor JPEG");
    }
    auto fp = open_file(path, "rb");
    Decoded d;
    std::string err;
    const bool ok = fmt == Format::png ? decode_png(fp.get(), d, err) : decode_jpeg(fp.get(), d, err);
    if (!ok) throw FormatError("cannot decode '" + path.string() + "': " + err);
    if (d.width < 1 || d.height < 1) throw FormatError("'" + path.string() + "' has no pixels");
    return to_image(d);
}

void save_image(const Image& img, const std::filesystem::path& path) {
    std::vector<unsigned char> bytes;
    bytes.reserve(img.values().size());
    for (double v : img.values()) bytes.push_back(to_byte(v));
    write_png(path, bytes, img.width(), img.height(), 3);
}

void save_map(const ScalarMap& map, const std::filesystem::path& path) {
    std::vector<unsigned char> bytes;
    bytes.reserve(map.values().size());
    for (double v : map.values()) bytes.push_back(to_byte(v));
    write_png(path, bytes, map.width(), map.height(), 1);
}

}  // namespace bimef

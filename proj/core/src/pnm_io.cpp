#include "trackfuse/pnm_io.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <vector>

#include "trackfuse/errors.hpp"

namespace trackfuse {

namespace {

void write_header(std::ofstream& out, const char* magic, int w, int h, int maxval) {
    out << magic << "\n" << w << " " << h << "\n" << maxval << "\n";
}

struct PnmHeader {
    std::string magic;
    int width = 0;
    int height = 0;
    int maxval = 0;
};

int next_pnm_int(std::ifstream& in) {
    // skip whitespace and '#' comments
    for (;;) {
        const int c = in.peek();
        if (c == '#') {
            std::string line;
            std::getline(in, line);
        } else if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
            in.get();
        } else {
            break;
        }
    }
    int v;
    if (!(in >> v)) throw ParseError("pnm: expected integer in header", static_cast<std::size_t>(in.tellg()));
    return v;
}

PnmHeader read_header(std::ifstream& in, const std::string& expected_magic) {
    PnmHeader h;
    char m[2];
    in.read(m, 2);
    if (in.gcount() != 2) throw ParseError("pnm: truncated magic", 0);
    h.magic = std::string(m, 2);
    if (h.magic != expected_magic)
        throw ParseError("pnm: expected " + expected_magic + " got " + h.magic, 0);
    h.width = next_pnm_int(in);
    h.height = next_pnm_int(in);
    h.maxval = next_pnm_int(in);
    in.get(); // the single whitespace byte before raster data
    if (h.width <= 0 || h.height <= 0)
        throw ParseError("pnm: bad dimensions", static_cast<std::size_t>(in.tellg()));
    return h;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("pnm: cannot open " + path);
    return in;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("pnm: cannot open " + path + " for writing");
    return out;
}

} // namespace

void write_depth_pgm(const std::string& path, const DepthImage& depth) {
    std::ofstream out = open_out(path);
    write_header(out, "P5", depth.width, depth.height, 65535);
    std::vector<std::uint8_t> raster(depth.size() * 2);
    for (std::size_t i = 0; i < depth.size(); ++i) {
        double mm = static_cast<double>(depth.data[i]) * 1000.0;
        if (!(mm > 0) || !std::isfinite(mm)) mm = 0;
        if (mm > 65535.0) mm = 65535.0;
        const auto v = static_cast<std::uint16_t>(std::lround(mm));
        raster[2 * i] = static_cast<std::uint8_t>(v >> 8); // big-endian per PNM
        raster[2 * i + 1] = static_cast<std::uint8_t>(v & 0xff);
    }
    out.write(reinterpret_cast<const char*>(raster.data()), static_cast<std::streamsize>(raster.size()));
    if (!out) throw ConfigError("pnm: write failed for " + path);
}

DepthImage read_depth_pgm(const std::string& path) {
    std::ifstream in = open_in(path);
    const PnmHeader h = read_header(in, "P5");
    if (h.maxval != 65535)
        throw ParseError("pnm: depth pgm must have maxval 65535", static_cast<std::size_t>(in.tellg()));
    DepthImage depth(h.width, h.height);
    std::vector<std::uint8_t> raster(depth.size() * 2);
    const std::size_t at = static_cast<std::size_t>(in.tellg());
    in.read(reinterpret_cast<char*>(raster.data()), static_cast<std::streamsize>(raster.size()));
    if (in.gcount() != static_cast<std::streamsize>(raster.size()))
        throw ParseError("pnm: truncated raster", at);
    for (std::size_t i = 0; i < depth.size(); ++i) {
        const std::uint16_t mm = static_cast<std::uint16_t>((raster[2 * i] << 8) | raster[2 * i + 1]);
        depth.data[i] = static_cast<float>(mm) / 1000.0f;
    }
    return depth;
}

void write_mask_pgm(const std::string& path, const MaskImage& mask) {
    std::ofstream out = open_out(path);
    write_header(out, "P5", mask.width, mask.height, 255);
    std::vector<std::uint8_t> raster(mask.size());
    for (std::size_t i = 0; i < mask.size(); ++i) raster[i] = mask.data[i] ? 255 : 0;
    out.write(reinterpret_cast<const char*>(raster.data()), static_cast<std::streamsize>(raster.size()));
    if (!out) throw ConfigError("pnm: write failed for " + path);
}

MaskImage read_mask_pgm(const std::string& path) {
    std::ifstream in = open_in(path);
    const PnmHeader h = read_header(in, "P5");
    if (h.maxval != 255)
        throw ParseError("pnm: mask pgm must have maxval 255", static_cast<std::size_t>(in.tellg()));
    MaskImage mask(h.width, h.height);
    const std::size_t at = static_cast<std::size_t>(in.tellg());
    in.read(reinterpret_cast<char*>(mask.data.data()), static_cast<std::streamsize>(mask.size()));
    if (in.gcount() != static_cast<std::streamsize>(mask.size()))
        throw ParseError("pnm: truncated raster", at);
    return mask;
}

void write_color_ppm(const std::string& path, const ColorImage& color) {
    std::ofstream out = open_out(path);
    write_header(out, "P6", color.width, color.height, 255);
    std::vector<std::uint8_t> raster(color.size() * 3);
    for (std::size_t i = 0; i < color.size(); ++i) {
        for (int c = 0; c < 3; ++c) {
            float v = color.data[i][c];
            v = v < 0.f ? 0.f : (v > 1.f ? 1.f : v);
            raster[3 * i + c] = static_cast<std::uint8_t>(std::lround(v * 255.0f));
        }
    }
    out.write(reinterpret_cast<const char*>(raster.data()), static_cast<std::streamsize>(raster.size()));
    if (!out) throw ConfigError("pnm: write failed for " + path);
}

ColorImage read_color_ppm(const std::string& path) {
    std::ifstream in = open_in(path);
    const PnmHeader h = read_header(in, "P6");
    if (h.maxval != 255)
        throw ParseError("pnm: color ppm must have maxval 255", static_cast<std::size_t>(in.tellg()));
    ColorImage color(h.width, h.height);
    std::vector<std::uint8_t> raster(color.size() * 3);
    const std::size_t at = static_cast<std::size_t>(in.tellg());
    in.read(reinterpret_cast<char*>(raster.data()), static_cast<std::streamsize>(raster.size()));
    if (in.gcount() != static_cast<std::streamsize>(raster.size()))
        throw ParseError("pnm: truncated raster", at);
    for (std::size_t i = 0; i < color.size(); ++i) {
        for (int c = 0; c < 3; ++c) color.data[i][c] = static_cast<float>(raster[3 * i + c]) / 255.0f;
    }
    return color;
}

} // namespace trackfuse

#include "trackfuse/ply_io.hpp"

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "trackfuse/errors.hpp"

namespace trackfuse {

TriangleMesh PlyData::to_mesh() const {
    TriangleMesh mesh;
    mesh.vertices = positions;
    mesh.faces = faces;
    mesh.vertex_colors = colors;
    mesh.validate();
    return mesh;
}

ColoredPointCloud PlyData::to_cloud() const {
    ColoredPointCloud cloud;
    cloud.positions = positions;
    cloud.colors = colors.empty() ? std::vector<Vec3>(positions.size(), Vec3(0.5, 0.5, 0.5)) : colors;
    cloud.normals = normals;
    cloud.validate();
    return cloud;
}

namespace {

enum class PlyType { Char, UChar, Short, UShort, Int, UInt, Float, Double };

std::size_t type_size(PlyType t) {
    switch (t) {
        case PlyType::Char:
        case PlyType::UChar: return 1;
        case PlyType::Short:
        case PlyType::UShort: return 2;
        case PlyType::Int:
        case PlyType::UInt:
        case PlyType::Float: return 4;
        case PlyType::Double: return 8;
    }
    return 0;
}

PlyType parse_type(const std::string& name, std::size_t offset) {
    if (name == "char" || name == "int8") return PlyType::Char;
    if (name == "uchar" || name == "uint8") return PlyType::UChar;
    if (name == "short" || name == "int16") return PlyType::Short;
    if (name == "ushort" || name == "uint16") return PlyType::UShort;
    if (name == "int" || name == "int32") return PlyType::Int;
    if (name == "uint" || name == "uint32") return PlyType::UInt;
    if (name == "float" || name == "float32") return PlyType::Float;
    if (name == "double" || name == "float64") return PlyType::Double;
    throw ParseError("ply: unknown property type '" + name + "'", offset);
}

struct PlyProperty {
    std::string name;
    PlyType type = PlyType::Float;
    bool is_list = false;
    PlyType count_type = PlyType::UChar;
};

struct PlyElement {
    std::string name;
    std::size_t count = 0;
    std::vector<PlyProperty> properties;
};

class Reader {
public:
    explicit Reader(const std::string& path) : path_(path), in_(path, std::ios::binary) {
        if (!in_) throw ConfigError("ply: cannot open " + path);
    }

    PlyData read() {
        parse_header();
        PlyData out;
        for (const PlyElement& elem : elements_) {
            if (elem.name == "vertex") {
                read_vertices(elem, out);
            } else if (elem.name == "face") {
                read_faces(elem, out);
            } else {
                skip_element(elem);
            }
        }
        return out;
    }

private:
    std::string path_;
    std::ifstream in_;
    bool binary_ = false;
    std::vector<PlyElement> elements_;

    std::size_t offset() { return static_cast<std::size_t>(in_.tellg()); }

    std::string read_header_line() {
        std::string line;
        if (!std::getline(in_, line)) throw ParseError("ply: truncated header", offset());
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return line;
    }

    void parse_header() {
        if (read_header_line() != "ply") throw ParseError("ply: missing magic", 0);
        bool have_format = false;
        for (;;) {
            const std::size_t line_start = offset();
            std::istringstream ls(read_header_line());
            std::string keyword;
            ls >> keyword;
            if (keyword == "comment" || keyword == "obj_info" || keyword.empty()) continue;
            if (keyword == "format") {
                std::string fmt, version;
                ls >> fmt >> version;
                if (fmt == "ascii") binary_ = false;
                else if (fmt == "binary_little_endian") binary_ = true;
                else throw ParseError("ply: unsupported format '" + fmt + "'", line_start);
                have_format = true;
            } else if (keyword == "element") {
                PlyElement elem;
                ls >> elem.name >> elem.count;
                if (ls.fail()) throw ParseError("ply: bad element line", line_start);
                elements_.push_back(elem);
            } else if (keyword == "property") {
                if (elements_.empty()) throw ParseError("ply: property before element", line_start);
                std::string first;
                ls >> first;
                PlyProperty prop;
                if (first == "list") {
                    std::string count_t, value_t;
                    ls >> count_t >> value_t >> prop.name;
                    prop.is_list = true;
                    prop.count_type = parse_type(count_t, line_start);
                    prop.type = parse_type(value_t, line_start);
                } else {
                    prop.type = parse_type(first, line_start);
                    ls >> prop.name;
                }
                if (ls.fail()) throw ParseError("ply: bad property line", line_start);
                elements_.back().properties.push_back(prop);
            } else if (keyword == "end_header") {
                break;
            } else {
                throw ParseError("ply: unexpected header keyword '" + keyword + "'", line_start);
            }
        }
        if (!have_format) throw ParseError("ply: missing format line", offset());
    }

    double read_binary_scalar(PlyType t) {
        unsigned char buf[8];
        const std::size_t n = type_size(t);
        const std::size_t at = offset();
        in_.read(reinterpret_cast<char*>(buf), static_cast<std::streamsize>(n));
        if (in_.gcount() != static_cast<std::streamsize>(n))
            throw ParseError("ply: truncated binary data", at);
        switch (t) {
            case PlyType::Char: return static_cast<double>(static_cast<std::int8_t>(buf[0]));
            case PlyType::UChar: return static_cast<double>(buf[0]);
            case PlyType::Short: {
                std::int16_t v; std::memcpy(&v, buf, 2); return v;
            }
            case PlyType::UShort: {
                std::uint16_t v; std::memcpy(&v, buf, 2); return v;
            }
            case PlyType::Int: {
                std::int32_t v; std::memcpy(&v, buf, 4); return v;
            }
            case PlyType::UInt: {
                std::uint32_t v; std::memcpy(&v, buf, 4); return v;
            }
            case PlyType::Float: {
                float v; std::memcpy(&v, buf, 4); return v;
            }
            case PlyType::Double: {
                double v; std::memcpy(&v, buf, 8); return v;
            }
        }
        return 0;
    }

    double read_ascii_scalar() {
        const std::size_t at = offset();
        double v;
        if (!(in_ >> v)) throw ParseError("ply: expected a number", at);
        return v;
    }

    double read_scalar(PlyType t) { return binary_ ? read_binary_scalar(t) : read_ascii_scalar(); }

    void read_vertices(const PlyElement& elem, PlyData& out) {
        int ix = -1, iy = -1, iz = -1, ir = -1, ig = -1, ib = -1, inx = -1, iny = -1, inz = -1;
        for (std::size_t p = 0; p < elem.properties.size(); ++p) {
            const std::string& n = elem.properties[p].name;
            const int i = static_cast<int>(p);
            if (n == "x") ix = i;
            else if (n == "y") iy = i;
            else if (n == "z") iz = i;
            else if (n == "red") ir = i;
            else if (n == "green") ig = i;
            else if (n == "blue") ib = i;
            else if (n == "nx") inx = i;
            else if (n == "ny") iny = i;
            else if (n == "nz") inz = i;
        }
        if (ix < 0 || iy < 0 || iz < 0)
            throw ParseError("ply: vertex element lacks x/y/z", offset());
        const bool has_color = ir >= 0 && ig >= 0 && ib >= 0;
        const bool has_normal = inx >= 0 && iny >= 0 && inz >= 0;

        out.positions.reserve(elem.count);
        std::vector<double> row(elem.properties.size());
        for (std::size_t v = 0; v < elem.count; ++v) {
            for (std::size_t p = 0; p < elem.properties.size(); ++p) {
                const PlyProperty& prop = elem.properties[p];
                if (prop.is_list) {
                    const auto n = static_cast<std::size_t>(read_scalar(prop.count_type));
                    for (std::size_t k = 0; k < n; ++k) read_scalar(prop.type);
                    row[p] = 0;
                } else {
                    row[p] = read_scalar(prop.type);
                }
            }
            out.positions.emplace_back(row[ix], row[iy], row[iz]);
            if (has_color) {
                Vec3 c(row[ir], row[ig], row[ib]);
                const bool byte_coded = elem.properties[ir].type == PlyType::UChar;
                out.colors.push_back(byte_coded ? Vec3(c / 255.0) : c);
            }
            if (has_normal) out.normals.emplace_back(row[inx], row[iny], row[inz]);
        }
    }

    void read_faces(const PlyElement& elem, PlyData& out) {
        int list_index = -1;
        for (std::size_t p = 0; p < elem.properties.size(); ++p) {
            const PlyProperty& prop = elem.properties[p];
            if (prop.is_list && (prop.name == "vertex_indices" || prop.name == "vertex_index"))
                list_index = static_cast<int>(p);
        }
        if (list_index < 0) throw ParseError("ply: face element lacks vertex_indices", offset());

        out.faces.reserve(elem.count);
        for (std::size_t f = 0; f < elem.count; ++f) {
            for (std::size_t p = 0; p < elem.properties.size(); ++p) {
                const PlyProperty& prop = elem.properties[p];
                if (!prop.is_list) {
                    read_scalar(prop.type);
                    continue;
                }
                const std::size_t at = offset();
                const auto n = static_cast<std::size_t>(read_scalar(prop.count_type));
                std::vector<int> indices(n);
                for (std::size_t k = 0; k < n; ++k)
                    indices[k] = static_cast<int>(read_scalar(prop.type));
                if (static_cast<int>(p) == list_index) {
                    if (n < 3) throw ParseError("ply: face with fewer than 3 indices", at);
                    // fan-triangulate polygons
                    for (std::size_t k = 1; k + 1 < n; ++k)
                        out.faces.push_back({indices[0], indices[k], indices[k + 1]});
                }
            }
        }
    }

    void skip_element(const PlyElement& elem) {
        for (std::size_t i = 0; i < elem.count; ++i) {
            for (const PlyProperty& prop : elem.properties) {
                if (prop.is_list) {
                    const auto n = static_cast<std::size_t>(read_scalar(prop.count_type));
                    for (std::size_t k = 0; k < n; ++k) read_scalar(prop.type);
                } else {
                    read_scalar(prop.type);
                }
            }
        }
    }
};

class Writer {
public:
    Writer(const std::string& path, bool binary) : out_(path, std::ios::binary), binary_(binary) {
        if (!out_) throw ConfigError("ply: cannot open " + path + " for writing");
    }

    void write(const std::vector<Vec3>& positions, const std::vector<Vec3>& colors,
               const std::vector<Vec3>& normals, const std::vector<Face>& faces, bool with_normals) {
        const bool normals_out = with_normals && normals.size() == positions.size();
        out_ << "ply\n";
        out_ << (binary_ ? "format binary_little_endian 1.0\n" : "format ascii 1.0\n");
        out_ << "element vertex " << positions.size() << "\n";
        out_ << "property float x\nproperty float y\nproperty float z\n";
        out_ << "property uchar red\nproperty uchar green\nproperty uchar blue\n";
        if (normals_out) out_ << "property float nx\nproperty float ny\nproperty float nz\n";
        out_ << "element face " << faces.size() << "\n";
        out_ << "property list uchar int vertex_indices\n";
        out_ << "end_header\n";

        for (std::size_t i = 0; i < positions.size(); ++i) {
            const Vec3& p = positions[i];
            const Vec3 c = i < colors.size() ? colors[i] : Vec3(0.5, 0.5, 0.5);
            if (binary_) {
                write_f32(p.x()); write_f32(p.y()); write_f32(p.z());
                write_u8(c.x()); write_u8(c.y()); write_u8(c.z());
                if (normals_out) {
                    write_f32(normals[i].x()); write_f32(normals[i].y()); write_f32(normals[i].z());
                }
            } else {
                out_ << static_cast<float>(p.x()) << " " << static_cast<float>(p.y()) << " "
                     << static_cast<float>(p.z()) << " " << to_byte(c.x()) << " " << to_byte(c.y())
                     << " " << to_byte(c.z());
                if (normals_out) {
                    out_ << " " << static_cast<float>(normals[i].x()) << " "
                         << static_cast<float>(normals[i].y()) << " "
                         << static_cast<float>(normals[i].z());
                }
                out_ << "\n";
            }
        }
        for (const Face& f : faces) {
            if (binary_) {
                const std::uint8_t n = 3;
                out_.write(reinterpret_cast<const char*>(&n), 1);
                for (int k = 0; k < 3; ++k) {
                    const std::int32_t idx = f[k];
                    out_.write(reinterpret_cast<const char*>(&idx), 4);
                }
            } else {
                out_ << "3 " << f[0] << " " << f[1] << " " << f[2] << "\n";
            }
        }
        if (!out_) throw ConfigError("ply: write failed");
    }

private:
    std::ofstream out_;
    bool binary_;

    static int to_byte(double channel) {
        const double v = std::clamp(channel, 0.0, 1.0);
        return static_cast<int>(v * 255.0 + 0.5);
    }

    void write_f32(double v) {
        const float f = static_cast<float>(v);
        out_.write(reinterpret_cast<const char*>(&f), 4);
    }

    void write_u8(double channel) {
        const std::uint8_t b = static_cast<std::uint8_t>(to_byte(channel));
        out_.write(reinterpret_cast<const char*>(&b), 1);
    }
};

} // namespace

PlyData read_ply(const std::string& path) {
    Reader reader(path);
    return reader.read();
}

void write_ply(const std::string& path, const TriangleMesh& mesh, const PlyWriteOptions& opts) {
    Writer writer(path, opts.binary);
    writer.write(mesh.vertices, mesh.vertex_colors, {}, mesh.faces, false);
}

void write_ply(const std::string& path, const ColoredPointCloud& cloud, const PlyWriteOptions& opts) {
    Writer writer(path, opts.binary);
    writer.write(cloud.positions, cloud.colors, cloud.normals, {}, opts.with_normals);
}

} // namespace trackfuse

// Copyright 2026 The sceneforge contributors
// SPDX-License-Identifier: Apache-2.0

#include "sceneforge/ply.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

namespace sceneforge {

static_assert(std::endian::native == std::endian::little, "binary PLY IO assumes a little-endian host");

namespace {

enum class ScalarType { Int8, UInt8, Int16, UInt16, Int32, UInt32, Float32, Float64 };

bool parse_scalar_type(const std::string& name, ScalarType& out) {
    static const std::pair<const char*, ScalarType> table[] = {
        {"char", ScalarType::Int8},     {"int8", ScalarType::Int8},      {"uchar", ScalarType::UInt8},
        {"uint8", ScalarType::UInt8},   {"short", ScalarType::Int16},    {"int16", ScalarType::Int16},
        {"ushort", ScalarType::UInt16}, {"uint16", ScalarType::UInt16},  {"int", ScalarType::Int32},
        {"int32", ScalarType::Int32},   {"uint", ScalarType::UInt32},    {"uint32", ScalarType::UInt32},
        {"float", ScalarType::Float32}, {"float32", ScalarType::Float32}, {"double", ScalarType::Float64},
        {"float64", ScalarType::Float64},
    };
    for (const auto& [n, t] : table) {
        if (name == n) {
            out = t;
            return true;
        }
    }
    return false;
}

std::size_t scalar_size(ScalarType t) {
    switch (t) {
        case ScalarType::Int8:
        case ScalarType::UInt8: return 1;
        case ScalarType::Int16:
        case ScalarType::UInt16: return 2;
        case ScalarType::Int32:
        case ScalarType::UInt32:
        case ScalarType::Float32: return 4;
        case ScalarType::Float64: return 8;
    }
    return 0;
}

template <typename T>
double load_as(const char* p) {
    T v;
    std::memcpy(&v, p, sizeof(T));
    return static_cast<double>(v);
}

double load_scalar(ScalarType t, const char* p) {
    switch (t) {
        case ScalarType::Int8: return load_as<std::int8_t>(p);
        case ScalarType::UInt8: return load_as<std::uint8_t>(p);
        case ScalarType::Int16: return load_as<std::int16_t>(p);
        case ScalarType::UInt16: return load_as<std::uint16_t>(p);
        case ScalarType::Int32: return load_as<std::int32_t>(p);
        case ScalarType::UInt32: return load_as<std::uint32_t>(p);
        case ScalarType::Float32: return load_as<float>(p);
        case ScalarType::Float64: return load_as<double>(p);
    }
    return 0.0;
}

struct Property {
    std::string name;
    ScalarType type;
};

struct Header {
    bool binary = false;
    std::size_t vertex_count = 0;
    std::vector<Property> props;
    std::size_t body_offset = 0;
    int x = -1, y = -1, z = -1, r = -1, g = -1, b = -1;
};

[[noreturn]] void unsupported(const std::string& id, const std::string& why) {
    throw Error(ErrorCode::UnsupportedPly, "PLY '" + id + "': " + why);
}

Header parse_header(const std::string& bytes, const std::string& id) {
    Header h;
    std::size_t pos = 0;
    auto next_line = [&](std::string& line) {
        if (pos >= bytes.size()) return false;
        auto end = bytes.find('\n', pos);
        if (end == std::string::npos) throw Error(ErrorCode::TruncatedFile, "PLY '" + id + "': header not terminated");
        line = bytes.substr(pos, end - pos);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        pos = end + 1;
        return true;
    };

    std::string line;
    if (!next_line(line) || line != "ply") unsupported(id, "missing 'ply' magic");
    bool in_vertex = false;
    bool seen_vertex = false;
    bool seen_format = false;
    while (true) {
        if (!next_line(line)) throw Error(ErrorCode::TruncatedFile, "PLY '" + id + "': header not terminated");
        std::istringstream ls(line);
        std::string kw;
        ls >> kw;
        if (kw == "end_header") break;
        if (kw == "comment" || kw == "obj_info" || kw.empty()) continue;
        if (kw == "format") {
            std::string fmt;
            ls >> fmt;
            if (fmt == "ascii") h.binary = false;
            else if (fmt == "binary_little_endian") h.binary = true;
            else unsupported(id, "format '" + fmt + "' is not supported");
            seen_format = true;
        } else if (kw == "element") {
            std::string name;
            long long count = -1;
            ls >> name >> count;
            if (count < 0) unsupported(id, "bad element line '" + line + "'");
            if (name == "vertex") {
                if (seen_vertex) unsupported(id, "duplicate vertex element");
                seen_vertex = true;
                in_vertex = true;
                h.vertex_count = static_cast<std::size_t>(count);
            } else {
                if (!seen_vertex) unsupported(id, "element '" + name + "' precedes the vertex element");
                in_vertex = false;
            }
        } else if (kw == "property") {
            if (!in_vertex) continue;
            std::string type;
            ls >> type;
            if (type == "list") unsupported(id, "list properties on vertices are not supported");
            Property p;
            ls >> p.name;
            if (!parse_scalar_type(type, p.type)) unsupported(id, "unknown property type '" + type + "'");
            h.props.push_back(p);
        } else {
            unsupported(id, "unexpected header line '" + line + "'");
        }
    }
    if (!seen_format) unsupported(id, "missing format line");
    if (!seen_vertex) unsupported(id, "missing vertex element");
    h.body_offset = pos;

    for (int i = 0; i < static_cast<int>(h.props.size()); ++i) {
        const auto& n = h.props[i].name;
        if (n == "x") h.x = i;
        else if (n == "y") h.y = i;
        else if (n == "z") h.z = i;
        else if (n == "red" || n == "r") h.r = i;
        else if (n == "green" || n == "g") h.g = i;
        else if (n == "blue" || n == "b") h.b = i;
    }
    if (h.x < 0 || h.y < 0 || h.z < 0) unsupported(id, "vertex element lacks x/y/z");
    for (int i : {h.x, h.y, h.z}) {
        auto t = h.props[i].type;
        if (t != ScalarType::Float32 && t != ScalarType::Float64) unsupported(id, "coordinates must be float or double");
    }
    const int rgb_count = (h.r >= 0) + (h.g >= 0) + (h.b >= 0);
    if (rgb_count != 0 && rgb_count != 3) unsupported(id, "partial color channels");
    if (rgb_count == 3) {
        for (int i : {h.r, h.g, h.b}) {
            if (h.props[i].type != ScalarType::UInt8) unsupported(id, "color channels must be uchar");
        }
    }
    return h;
}

void check_finite(const Vec3& p, std::size_t i, const std::string& id) {
    if (!p.allFinite())
        throw Error(ErrorCode::NonFiniteCoordinate,
                    "PLY '" + id + "': non-finite coordinate at vertex " + std::to_string(i));
}

}  // namespace

PointCloud parse_ply(const std::string& bytes, const std::string& id) {
    const Header h = parse_header(bytes, id);
    const bool has_rgb = h.r >= 0;
    PointCloud cloud;
    cloud.id = id;
    cloud.points.reserve(h.vertex_count);
    if (has_rgb) cloud.colors.reserve(h.vertex_count);

    if (h.binary) {
        std::vector<std::size_t> offsets;
        std::size_t stride = 0;
        for (const auto& p : h.props) {
            offsets.push_back(stride);
            stride += scalar_size(p.type);
        }
        if (bytes.size() < h.body_offset + stride * h.vertex_count)
            throw Error(ErrorCode::TruncatedFile, "PLY '" + id + "': expected " + std::to_string(h.vertex_count) +
                                                      " vertices, body is too short");
        const char* base = bytes.data() + h.body_offset;
        for (std::size_t i = 0; i < h.vertex_count; ++i) {
            const char* row = base + i * stride;
            Vec3 p(load_scalar(h.props[h.x].type, row + offsets[h.x]), load_scalar(h.props[h.y].type, row + offsets[h.y]),
                   load_scalar(h.props[h.z].type, row + offsets[h.z]));
            check_finite(p, i, id);
            cloud.points.push_back(p);
            if (has_rgb) {
                cloud.colors.emplace_back(load_scalar(ScalarType::UInt8, row + offsets[h.r]) / 255.0,
                                          load_scalar(ScalarType::UInt8, row + offsets[h.g]) / 255.0,
                                          load_scalar(ScalarType::UInt8, row + offsets[h.b]) / 255.0);
            }
        }
    } else {
        std::istringstream body(bytes.substr(h.body_offset));
        std::vector<double> values(h.props.size());
        std::string line;
        for (std::size_t i = 0; i < h.vertex_count; ++i) {
            if (!std::getline(body, line))
                throw Error(ErrorCode::TruncatedFile, "PLY '" + id + "': expected " + std::to_string(h.vertex_count) +
                                                          " vertices, got " + std::to_string(i));
            std::istringstream ls(line);
            for (std::size_t k = 0; k < values.size(); ++k) {
                std::string tok;
                if (!(ls >> tok))
                    throw Error(ErrorCode::TruncatedFile, "PLY '" + id + "': short vertex line " + std::to_string(i));
                // strtod accepts nan/inf spellings, which we want to surface as non-finite rather than as parse errors
                char* end = nullptr;
                values[k] = std::strtod(tok.c_str(), &end);
                if (end == tok.c_str())
                    throw Error(ErrorCode::UnsupportedPly, "PLY '" + id + "': bad number '" + tok + "'");
            }
            Vec3 p(values[h.x], values[h.y], values[h.z]);
            check_finite(p, i, id);
            cloud.points.push_back(p);
            if (has_rgb) cloud.colors.emplace_back(values[h.r] / 255.0, values[h.g] / 255.0, values[h.b] / 255.0);
        }
    }
    if (cloud.points.empty()) throw Error(ErrorCode::InvalidArgument, "PLY '" + id + "' has no vertices");
    return cloud;
}

PointCloud read_cloud(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_ply(ss.str(), path.stem().string());
}

namespace {

std::uint8_t to_byte(double c) {
    return static_cast<std::uint8_t>(std::lround(std::clamp(c, 0.0, 1.0) * 255.0));
}

}  // namespace

std::string encode_ply(const PointCloud& cloud, PlyFormat format) {
    cloud.validate();
    const bool rgb = cloud.has_colors();
    std::ostringstream out;
    out << "ply\n"
        << (format == PlyFormat::Ascii ? "format ascii 1.0\n" : "format binary_little_endian 1.0\n")
        << "element vertex " << cloud.size() << "\n"
        << "property float x\nproperty float y\nproperty float z\n";
    if (rgb) out << "property uchar red\nproperty uchar green\nproperty uchar blue\n";
    out << "end_header\n";

    if (format == PlyFormat::Ascii) {
        out.precision(9);
        for (std::size_t i = 0; i < cloud.size(); ++i) {
            const auto& p = cloud.points[i];
            out << static_cast<float>(p.x()) << ' ' << static_cast<float>(p.y()) << ' ' << static_cast<float>(p.z());
            if (rgb) {
                const auto& c = cloud.colors[i];
                out << ' ' << int(to_byte(c.x())) << ' ' << int(to_byte(c.y())) << ' ' << int(to_byte(c.z()));
            }
            out << '\n';
        }
        return out.str();
    }

    std::string body;
    const std::size_t stride = 12 + (rgb ? 3 : 0);
    body.resize(stride * cloud.size());
    char* dst = body.data();
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        const float xyz[3] = {static_cast<float>(cloud.points[i].x()), static_cast<float>(cloud.points[i].y()),
                              static_cast<float>(cloud.points[i].z())};
        std::memcpy(dst, xyz, 12);
        if (rgb) {
            dst[12] = static_cast<char>(to_byte(cloud.colors[i].x()));
            dst[13] = static_cast<char>(to_byte(cloud.colors[i].y()));
            dst[14] = static_cast<char>(to_byte(cloud.colors[i].z()));
        }
        dst += stride;
    }
    return out.str() + body;
}

void write_cloud(const std::filesystem::path& path, const PointCloud& cloud, PlyFormat format) {
    const std::string bytes = encode_ply(cloud, format);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorCode::Io, "short write to " + path.string());
}

}  // namespace sceneforge

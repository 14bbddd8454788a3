#include <algorithm>
#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include "avrplan/errors.hpp"
#include "avrplan/mesh.hpp"

namespace avrplan {

namespace {

std::vector<std::string> split_ws(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream ss(line);
    std::string tok;
    while (ss >> tok) out.push_back(tok);
    return out;
}

double parse_double(const std::string& tok, std::size_t line) {
    double value = 0.0;
    const auto* begin = tok.data();
    const auto* end = tok.data() + tok.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end) throw FormatError("invalid number '" + tok + "'", line);
    return value;
}

long parse_long(const std::string& tok, std::size_t line) {
    long value = 0;
    const auto* begin = tok.data();
    const auto* end = tok.data() + tok.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end) throw FormatError("invalid index '" + tok + "'", line);
    return value;
}

// Fan-triangulates a polygon given as vertex indices.
void add_polygon(std::vector<Face>& faces, const std::vector<std::uint32_t>& poly) {
    for (std::size_t i = 1; i + 1 < poly.size(); ++i) faces.push_back({poly[0], poly[i], poly[i + 1]});
}

TriangleMesh finish(std::vector<Vec3> verts, std::vector<Face> faces) {
    TriangleMesh mesh(std::move(verts), std::move(faces));
    if (mesh.empty()) throw EmptySceneError("mesh has no non-degenerate faces");
    return mesh;
}

} // namespace

TriangleMesh parse_obj(std::istream& in) {
    std::vector<Vec3> verts;
    std::vector<Face> faces;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto toks = split_ws(line);
        if (toks.empty() || toks[0][0] == '#') continue;
        if (toks[0] == "v") {
            if (toks.size() < 4) throw FormatError("vertex needs three coordinates", line_no);
            verts.emplace_back(parse_double(toks[1], line_no), parse_double(toks[2], line_no),
                               parse_double(toks[3], line_no));
        } else if (toks[0] == "f") {
            if (toks.size() < 4) throw FormatError("face needs at least three vertices", line_no);
            std::vector<std::uint32_t> poly;
            for (std::size_t i = 1; i < toks.size(); ++i) {
                const std::string idx_str = toks[i].substr(0, toks[i].find('/'));
                long idx = parse_long(idx_str, line_no);
                if (idx < 0) idx = static_cast<long>(verts.size()) + idx + 1;
                if (idx < 1 || idx > static_cast<long>(verts.size())) {
                    throw FormatError("face index " + idx_str + " out of range", line_no);
                }
                poly.push_back(static_cast<std::uint32_t>(idx - 1));
            }
            add_polygon(faces, poly);
        }
        // Normals, texture coordinates, groups and materials are ignored.
    }
    return finish(std::move(verts), std::move(faces));
}

namespace {

enum class PlyEncoding { ascii, binary_le, binary_be };

struct PlyProperty {
    std::string name;
    std::string type;
    bool is_list = false;
    std::string count_type;
};

struct PlyElement {
    std::string name;
    std::size_t count = 0;
    std::vector<PlyProperty> props;
};

std::size_t ply_type_size(const std::string& t, std::size_t line) {
    if (t == "char" || t == "uchar" || t == "int8" || t == "uint8") return 1;
    if (t == "short" || t == "ushort" || t == "int16" || t == "uint16") return 2;
    if (t == "int" || t == "uint" || t == "float" || t == "int32" || t == "uint32" || t == "float32")
        return 4;
    if (t == "double" || t == "float64") return 8;
    throw FormatError("unknown PLY type '" + t + "'", line);
}

template <typename T>
T read_raw(std::istream& in, bool swap) {
    std::array<char, sizeof(T)> buf{};
    in.read(buf.data(), sizeof(T));
    if (!in) throw FormatError("unexpected end of binary PLY data", 0);
    if (swap) std::reverse(buf.begin(), buf.end());
    T value;
    std::memcpy(&value, buf.data(), sizeof(T));
    return value;
}

double read_binary_scalar(std::istream& in, const std::string& t, bool swap) {
    if (t == "char" || t == "int8") return read_raw<std::int8_t>(in, swap);
    if (t == "uchar" || t == "uint8") return read_raw<std::uint8_t>(in, swap);
    if (t == "short" || t == "int16") return read_raw<std::int16_t>(in, swap);
    if (t == "ushort" || t == "uint16") return read_raw<std::uint16_t>(in, swap);
    if (t == "int" || t == "int32") return read_raw<std::int32_t>(in, swap);
    if (t == "uint" || t == "uint32") return read_raw<std::uint32_t>(in, swap);
    if (t == "float" || t == "float32") return read_raw<float>(in, swap);
    return read_raw<double>(in, swap);
}

} // namespace

TriangleMesh parse_ply(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    auto next_line = [&]() -> bool {
        if (!std::getline(in, line)) return false;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return true;
    };
    if (!next_line() || line != "ply") throw FormatError("missing 'ply' magic", line_no);

    PlyEncoding encoding = PlyEncoding::ascii;
    std::vector<PlyElement> elements;
    bool saw_format = false;
    while (true) {
        if (!next_line()) throw FormatError("header not terminated by end_header", line_no);
        const auto toks = split_ws(line);
        if (toks.empty()) continue;
        if (toks[0] == "end_header") break;
        if (toks[0] == "comment" || toks[0] == "obj_info") continue;
        if (toks[0] == "format") {
            if (toks.size() < 2) throw FormatError("malformed format line", line_no);
            if (toks[1] == "ascii") encoding = PlyEncoding::ascii;
            else if (toks[1] == "binary_little_endian") encoding = PlyEncoding::binary_le;
            else if (toks[1] == "binary_big_endian") encoding = PlyEncoding::binary_be;
            else throw FormatError("unknown PLY format '" + toks[1] + "'", line_no);
            saw_format = true;
        } else if (toks[0] == "element") {
            if (toks.size() != 3) throw FormatError("malformed element line", line_no);
            elements.push_back({toks[1], static_cast<std::size_t>(parse_long(toks[2], line_no)), {}});
        } else if (toks[0] == "property") {
            if (elements.empty()) throw FormatError("property before element", line_no);
            PlyProperty prop;
            if (toks.size() == 5 && toks[1] == "list") {
                prop.is_list = true;
                prop.count_type = toks[2];
                prop.type = toks[3];
                prop.name = toks[4];
                ply_type_size(prop.count_type, line_no);
            } else if (toks.size() == 3) {
                prop.type = toks[1];
                prop.name = toks[2];
            } else {
                throw FormatError("malformed property line", line_no);
            }
            ply_type_size(prop.type, line_no);
            elements.back().props.push_back(prop);
        } else {
            throw FormatError("unexpected header keyword '" + toks[0] + "'", line_no);
        }
    }
    if (!saw_format) throw FormatError("missing format line", line_no);

    const bool swap = (encoding == PlyEncoding::binary_le) != (std::endian::native == std::endian::little);
    std::vector<Vec3> verts;
    std::vector<Face> faces;
    for (const auto& el : elements) {
        int xi = -1, yi = -1, zi = -1, fi = -1;
        for (std::size_t p = 0; p < el.props.size(); ++p) {
            const auto& name = el.props[p].name;
            if (name == "x") xi = static_cast<int>(p);
            if (name == "y") yi = static_cast<int>(p);
            if (name == "z") zi = static_cast<int>(p);
            if (el.props[p].is_list && (name == "vertex_indices" || name == "vertex_index")) fi = static_cast<int>(p);
        }
        const bool is_vertex = el.name == "vertex";
        const bool is_face = el.name == "face";
        if (is_vertex && (xi < 0 || yi < 0 || zi < 0)) throw FormatError("vertex element lacks x/y/z", line_no);
        if (is_face && fi < 0) throw FormatError("face element lacks vertex_indices", line_no);

        for (std::size_t row = 0; row < el.count; ++row) {
            std::vector<double> scalars(el.props.size(), 0.0);
            std::vector<std::uint32_t> poly;
            if (encoding == PlyEncoding::ascii) {
                if (!next_line()) throw FormatError("unexpected end of PLY data", line_no);
                const auto toks = split_ws(line);
                std::size_t pos = 0;
                for (std::size_t p = 0; p < el.props.size(); ++p) {
                    if (pos >= toks.size()) throw FormatError("too few values in row", line_no);
                    if (el.props[p].is_list) {
                        const long n = parse_long(toks[pos++], line_no);
                        if (n < 0 || pos + static_cast<std::size_t>(n) > toks.size())
                            throw FormatError("list length out of range", line_no);
                        for (long i = 0; i < n; ++i) {
                            const long idx = parse_long(toks[pos++], line_no);
                            if (static_cast<int>(p) == fi) {
                                if (idx < 0) throw FormatError("negative face index", line_no);
                                poly.push_back(static_cast<std::uint32_t>(idx));
                            }
                        }
                    } else {
                        scalars[p] = parse_double(toks[pos++], line_no);
                    }
                }
            } else {
                for (std::size_t p = 0; p < el.props.size(); ++p) {
                    if (el.props[p].is_list) {
                        const auto n = static_cast<long>(read_binary_scalar(in, el.props[p].count_type, swap));
                        for (long i = 0; i < n; ++i) {
                            const double idx = read_binary_scalar(in, el.props[p].type, swap);
                            if (static_cast<int>(p) == fi) {
                                if (idx < 0) throw FormatError("negative face index", 0);
                                poly.push_back(static_cast<std::uint32_t>(idx));
                            }
                        }
                    } else {
                        scalars[p] = read_binary_scalar(in, el.props[p].type, swap);
                    }
                }
            }
            if (is_vertex) {
                verts.emplace_back(scalars[xi], scalars[yi], scalars[zi]);
            } else if (is_face) {
                if (poly.size() < 3) throw FormatError("face with fewer than three vertices", line_no);
                for (auto idx : poly) {
                    if (idx >= verts.size()) throw FormatError("face index out of range", line_no);
                }
                add_polygon(faces, poly);
            }
        }
    }
    return finish(std::move(verts), std::move(faces));
}

MeshFormat format_from_path(const std::filesystem::path& path) {
    auto ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext == ".obj") return MeshFormat::obj;
    if (ext == ".ply") return MeshFormat::ply;
    throw InvalidArgument("unrecognized mesh extension '" + ext + "'");
}

TriangleMesh load_mesh(const std::filesystem::path& path, MeshFormat format) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open mesh file " + path.string());
    return format == MeshFormat::obj ? parse_obj(in) : parse_ply(in);
}

TriangleMesh load_mesh(const std::filesystem::path& path) { return load_mesh(path, format_from_path(path)); }

void write_obj(const TriangleMesh& mesh, std::ostream& out) {
    out << std::setprecision(17);
    for (const auto& v : mesh.vertices()) out << "v " << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
    for (const auto& f : mesh.faces()) out << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
}

void save_obj(const TriangleMesh& mesh, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    write_obj(mesh, out);
}

} // namespace avrplan

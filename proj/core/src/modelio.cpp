#include "hyperslice/modelio.hpp"

#include "hyperslice/error.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

namespace hyperslice {

namespace {

std::string format_double(double v, bool shortest = false)
{
    char buf[64];
    const auto res = shortest ? std::to_chars(buf, buf + sizeof buf, v)
                              : std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

std::vector<std::string_view> split(std::string_view line)
{
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
        const std::size_t start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
        if (i > start) out.push_back(line.substr(start, i - start));
    }
    return out;
}

std::string_view rest_after(std::string_view line, std::string_view word)
{
    auto pos = line.find(word);
    pos += word.size();
    while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t')) ++pos;
    auto end = line.size();
    while (end > pos && (line[end - 1] == '\r' || line[end - 1] == ' ')) --end;
    return line.substr(pos, end - pos);
}

double parse_double(std::string_view s, std::size_t line)
{
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw ParseError(ErrorCode::ParseError, line, "bad number '" + std::string(s) + "'");
    return v;
}

Index parse_index(std::string_view s, std::size_t line)
{
    Index v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw ParseError(ErrorCode::ParseError, line, "bad index '" + std::string(s) + "'");
    return v;
}

VecN parse_vec(const std::vector<std::string_view>& f, std::size_t line)
{
    if (f.size() != 1 + kComponents)
        throw ParseError(ErrorCode::ParseError, line,
                         "expected " + std::to_string(kComponents) + " components, got " + std::to_string(f.size() - 1));
    VecN v;
    for (std::size_t i = 0; i < kComponents; ++i) v[i] = parse_double(f[i + 1], line);
    return v;
}

void write_vec(std::ostream& out, std::string_view tag, const VecN& v)
{
    out << tag;
    for (double c : v.c) out << ' ' << format_double(c);
    out << '\n';
}

struct Compacted {
    std::vector<Index> order;                 // old index per new index
    std::unordered_map<Index, Index> remap;   // old -> new
};

Compacted compact(const TriMesh& mesh)
{
    Compacted c;
    for (const auto& t : mesh.triangles)
        for (Index v : t.v)
            if (c.remap.emplace(v, static_cast<Index>(c.order.size())).second) c.order.push_back(v);
    return c;
}

} // namespace

void write_model(const Complex3& cx, std::ostream& out)
{
    out << "#hyperslice v1\n";
    if (!cx.name.empty()) out << "name " << cx.name << '\n';
    out << "axes " << cx.axes.to_string() << '\n';
    out << "fclose " << format_double(cx.pool.merge_tolerance(), true) << '\n';
    out << "color " << format_double(cx.color.r, true) << ' ' << format_double(cx.color.g, true) << ' '
        << format_double(cx.color.b, true) << ' ' << format_double(cx.color.a, true) << '\n';
    if (cx.time)
        out << "time " << format_double(cx.time->t_min) << ' ' << format_double(cx.time->t_max) << ' '
            << cx.time->steps << '\n';
    for (const auto& [k, v] : cx.metadata) out << "meta " << k << ' ' << v << '\n';
    for (const auto& v : cx.pool.vertices()) write_vec(out, "v", v);
    for (const auto& v : cx.vectors.vertices()) write_vec(out, "vec", v);
    for (const auto& t : cx.tets) {
        out << "tet " << t.v[0] << ' ' << t.v[1] << ' ' << t.v[2] << ' ' << t.v[3];
        if (t.velocity) out << " vel " << *t.velocity;
        if (t.origin) out << " org " << *t.origin;
        out << '\n';
    }
    if (!out) throw Error(ErrorCode::Io, "write failed");
}

Complex3 read_model(std::istream& in)
{
    Complex3 cx;
    std::vector<VecN> verts;
    std::vector<VecN> vecs;
    std::vector<std::size_t> tet_lines;
    double fclose = kDefaultMergeTolerance;
    bool have_header = false;

    std::string raw;
    std::size_t line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const std::string_view text(raw);
        if (!have_header) {
            const auto f = split(text);
            if (f.size() != 2 || f[0] != "#hyperslice" || f[1] != "v1")
                throw ParseError(ErrorCode::ParseError, line, "missing '#hyperslice v1' header");
            have_header = true;
            continue;
        }
        const auto f = split(text);
        if (f.empty() || f[0].front() == '#') continue;
        const std::string_view tag = f[0];

        if (tag == "v") {
            verts.push_back(parse_vec(f, line));
        } else if (tag == "vec") {
            vecs.push_back(parse_vec(f, line));
        } else if (tag == "tet") {
            if (f.size() != 5 && f.size() != 7 && f.size() != 9)
                throw ParseError(ErrorCode::ParseError, line, "tet needs 4 indices plus optional 'vel k' / 'org k'");
            Tetrahedron t;
            for (std::size_t i = 0; i < 4; ++i) t.v[i] = parse_index(f[i + 1], line);
            for (std::size_t i = 5; i + 1 < f.size(); i += 2) {
                const Index k = parse_index(f[i + 1], line);
                if (f[i] == "vel" && !t.velocity)
                    t.velocity = k;
                else if (f[i] == "org" && !t.origin)
                    t.origin = k;
                else
                    throw ParseError(ErrorCode::ParseError, line, "unexpected tet field '" + std::string(f[i]) + "'");
            }
            cx.tets.push_back(t);
            tet_lines.push_back(line);
        } else if (tag == "name") {
            cx.name = std::string(rest_after(text, "name"));
        } else if (tag == "axes") {
            std::vector<int> axes;
            for (std::size_t i = 1; i < f.size(); ++i) {
                const auto a = parse_axis(f[i]);
                if (!a) throw ParseError(ErrorCode::ParseError, line, "unknown axis '" + std::string(f[i]) + "'");
                axes.push_back(*a);
            }
            try {
                cx.axes = ActiveAxes(axes);
            } catch (const Error& e) {
                throw ParseError(ErrorCode::ParseError, line, e.what());
            }
        } else if (tag == "fclose") {
            if (f.size() != 2) throw ParseError(ErrorCode::ParseError, line, "fclose takes one value");
            fclose = parse_double(f[1], line);
            if (!(fclose >= 0.0)) throw ParseError(ErrorCode::ParseError, line, "fclose must be >= 0");
        } else if (tag == "color") {
            if (f.size() != 5) throw ParseError(ErrorCode::ParseError, line, "color takes r g b a");
            cx.color = {static_cast<float>(parse_double(f[1], line)), static_cast<float>(parse_double(f[2], line)),
                        static_cast<float>(parse_double(f[3], line)), static_cast<float>(parse_double(f[4], line))};
        } else if (tag == "time") {
            if (f.size() != 4) throw ParseError(ErrorCode::ParseError, line, "time takes t_min t_max steps");
            TimeExtent te{parse_double(f[1], line), parse_double(f[2], line),
                          static_cast<int>(parse_index(f[3], line))};
            if (!(te.t_max > te.t_min)) throw ParseError(ErrorCode::ParseError, line, "time needs t_max > t_min");
            cx.time = te;
        } else if (tag == "meta") {
            if (f.size() < 3) throw ParseError(ErrorCode::ParseError, line, "meta takes a key and a value");
            cx.metadata[std::string(f[1])] = std::string(rest_after(rest_after(text, "meta"), f[1]));
        } else {
            throw ParseError(ErrorCode::ParseError, line, "unknown record '" + std::string(tag) + "'");
        }
    }
    if (!have_header) throw ParseError(ErrorCode::ParseError, line + 1, "empty model file");

    cx.pool = VertexPool(fclose);
    cx.pool.reserve(verts.size());
    for (const auto& v : verts) cx.pool.append(v);
    cx.vectors = VertexPool(fclose);
    for (const auto& v : vecs) cx.vectors.append(v);

    for (std::size_t i = 0; i < cx.tets.size(); ++i) {
        const auto& t = cx.tets[i];
        for (Index v : t.v)
            if (v >= verts.size())
                throw ParseError(ErrorCode::IndexOutOfRange, tet_lines[i],
                                 "vertex " + std::to_string(v) + " of " + std::to_string(verts.size()));
        if ((t.velocity && *t.velocity >= vecs.size()) || (t.origin && *t.origin >= vecs.size()))
            throw ParseError(ErrorCode::IndexOutOfRange, tet_lines[i], "vector index out of range");
        for (int a = 0; a < 4; ++a)
            for (int b = a + 1; b < 4; ++b)
                if (t.v[static_cast<std::size_t>(a)] == t.v[static_cast<std::size_t>(b)])
                    throw ParseError(ErrorCode::ParseError, tet_lines[i], "repeated vertex in tet");
    }
    return cx;
}

void save_model(const Complex3& cx, const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::Io, "cannot open " + path.string() + " for writing");
    write_model(cx, out);
}

Complex3 load_model(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
    return read_model(in);
}

std::optional<MeshFormat> parse_mesh_format(std::string_view name)
{
    std::string lower(name);
    for (auto& ch : lower) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    if (lower == "obj") return MeshFormat::Obj;
    if (lower == "json") return MeshFormat::Json;
    return std::nullopt;
}

std::string_view extension(MeshFormat format) { return format == MeshFormat::Obj ? ".obj" : ".json"; }

void export_mesh(const TriMesh& mesh, MeshFormat format, std::ostream& out)
{
    if (format == MeshFormat::Json) {
        out << mesh_to_json(mesh).dump() << '\n';
    } else {
        const Compacted c = compact(mesh);
        out << "# hyperslice mesh\n";
        out << "# vertices " << c.order.size() << " triangles " << mesh.triangles.size() << '\n';
        for (Index old : c.order) {
            const Point3 p = mesh.position(old);
            out << "v " << format_double(p[0]) << ' ' << format_double(p[1]) << ' ' << format_double(p[2]) << '\n';
        }
        for (const auto& t : mesh.triangles)
            out << "f " << c.remap.at(t.v[0]) + 1 << ' ' << c.remap.at(t.v[1]) + 1 << ' ' << c.remap.at(t.v[2]) + 1
                << '\n';
    }
    if (!out) throw Error(ErrorCode::Io, "write failed");
}

nlohmann::json mesh_to_json(const TriMesh& mesh)
{
    const Compacted c = compact(mesh);
    std::vector<double> positions;
    positions.reserve(c.order.size() * 3);
    for (Index old : c.order)
        for (double x : mesh.position(old)) positions.push_back(x);
    std::vector<Index> triangles;
    std::vector<double> normals;
    std::vector<float> colors;
    std::vector<int> sources;
    triangles.reserve(mesh.triangles.size() * 3);
    normals.reserve(mesh.triangles.size() * 3);
    colors.reserve(mesh.triangles.size() * 4);
    for (const auto& t : mesh.triangles) {
        for (Index v : t.v) triangles.push_back(c.remap.at(v));
        normals.insert(normals.end(), t.normal.begin(), t.normal.end());
        colors.insert(colors.end(), {t.color.r, t.color.g, t.color.b, t.color.a});
        sources.push_back(static_cast<int>(t.source));
    }
    return {{"format", "hyperslice-mesh"},
            {"version", 1},
            {"vertex_count", c.order.size()},
            {"triangle_count", mesh.triangles.size()},
            {"positions", positions},
            {"triangles", triangles},
            {"normals", normals},
            {"colors", colors},
            {"sources", sources}};
}

TriMesh mesh_from_json(const nlohmann::json& j)
{
    try {
        const auto positions = j.at("positions").get<std::vector<double>>();
        const auto triangles = j.at("triangles").get<std::vector<Index>>();
        const auto normals = j.at("normals").get<std::vector<double>>();
        const auto colors = j.at("colors").get<std::vector<float>>();
        const auto sources = j.value("sources", std::vector<int>{});
        if (positions.size() % 3 != 0 || triangles.size() % 3 != 0)
            throw Error(ErrorCode::ParseError, "positions and triangles must be multiples of 3");
        const std::size_t nt = triangles.size() / 3;
        if (normals.size() != nt * 3 || colors.size() != nt * 4)
            throw Error(ErrorCode::ParseError, "normals/colors do not match the triangle count");
        TriMesh m;
        for (std::size_t i = 0; i < positions.size(); i += 3)
            m.pool.append(VecN(0.0, positions[i], positions[i + 1], positions[i + 2]));
        for (std::size_t i = 0; i < nt; ++i) {
            MeshTriangle t;
            for (std::size_t k = 0; k < 3; ++k) {
                t.v[k] = triangles[3 * i + k];
                if (t.v[k] >= m.pool.size()) throw Error(ErrorCode::IndexOutOfRange, "triangle index out of range");
                t.normal[k] = normals[3 * i + k];
            }
            t.color = {colors[4 * i], colors[4 * i + 1], colors[4 * i + 2], colors[4 * i + 3]};
            if (i < sources.size()) t.source = static_cast<TriangleSource>(sources[i]);
            m.triangles.push_back(t);
        }
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ParseError, e.what());
    }
}

} // namespace hyperslice

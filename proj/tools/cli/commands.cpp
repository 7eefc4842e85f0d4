#include "commands.hpp"

#include "hyperslice/complex.hpp"
#include "hyperslice/error.hpp"
#include "hyperslice/generators.hpp"
#include "hyperslice/modelio.hpp"
#include "hyperslice/projector.hpp"
#include "hyperslice/service.hpp"
#include "hyperslice/slicer.hpp"

#include <CLI11.hpp>

#include <csignal>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <pthread.h>
#include <sstream>
#include <thread>

namespace hyperslice::cli {

namespace {

namespace fs = std::filesystem;

int exit_for(ErrorCode code)
{
    switch (code) {
    case ErrorCode::ParseError:
    case ErrorCode::IndexOutOfRange:
    case ErrorCode::Io:
    case ErrorCode::InvalidParams:
    case ErrorCode::InvalidRequest:
    case ErrorCode::UnknownModel:
        return kInputFailure;
    default:
        return kDomainFailure;
    }
}

int usage(std::ostream& err, const std::string& message)
{
    err << "error: " << message << "\n";
    return kInputFailure;
}

int parse_axis_or_throw(const std::string& name)
{
    const auto a = parse_axis(name);
    if (!a) throw Error(ErrorCode::InvalidParams, "unknown axis '" + name + "'");
    return *a;
}

double parse_number(const std::string& s)
{
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != s.size() || s.empty()) throw Error(ErrorCode::InvalidParams, "not a number: '" + s + "'");
    return v;
}

std::vector<AxisRotation> parse_rotations(const std::vector<std::string>& flat)
{
    if (flat.size() % 3 != 0) throw Error(ErrorCode::InvalidParams, "--rotate takes axis axis radians");
    std::vector<AxisRotation> out;
    for (std::size_t i = 0; i < flat.size(); i += 3)
        out.push_back({parse_axis_or_throw(flat[i]), parse_axis_or_throw(flat[i + 1]), parse_number(flat[i + 2])});
    return out;
}

MeshFormat format_for(const std::string& name, const fs::path& out)
{
    if (!name.empty()) {
        const auto f = parse_mesh_format(name);
        if (!f) throw Error(ErrorCode::InvalidParams, "unknown mesh format '" + name + "'");
        return *f;
    }
    const auto ext = out.extension().string();
    if (ext.size() > 1) {
        if (const auto f = parse_mesh_format(ext.substr(1))) return *f;
    }
    return MeshFormat::Obj;
}

void write_mesh(const TriMesh& mesh, MeshFormat format, const fs::path& path)
{
    std::ofstream f(path);
    if (!f) throw Error(ErrorCode::Io, "cannot write '" + path.string() + "'");
    export_mesh(mesh, format, f);
    if (!f) throw Error(ErrorCode::Io, "failed writing '" + path.string() + "'");
}

struct PlaneArgs {
    std::string plane;
    std::vector<double> anchor;
    std::string normal_axis;
    std::vector<std::string> rotate;
    std::vector<double> cofactors;
};

void add_plane_options(CLI::App* cmd, PlaneArgs& a)
{
    cmd->add_option("--plane", a.plane, "axis=offset, e.g. w=0.5");
    cmd->add_option("--anchor", a.anchor, "anchor point, one value per active axis")->expected(3, 5);
    cmd->add_option("--normal-axis", a.normal_axis, "axis the unrotated flat is normal to (default w)");
    cmd->add_option("--rotate", a.rotate, "axis axis radians (repeatable)")
        ->expected(3)
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
    cmd->add_option("--cofactors", a.cofactors, "c0 c1 c2 c3 c4")->expected(5);
}

Hyperplane3Flat plane_from(const PlaneArgs& a, const ActiveAxes& axes)
{
    const int forms = int(!a.plane.empty()) + int(!a.anchor.empty() || !a.rotate.empty() || !a.normal_axis.empty()) +
                      int(!a.cofactors.empty());
    if (forms != 1) throw Error(ErrorCode::InvalidParams, "give exactly one of --plane, --anchor/--rotate, --cofactors");

    if (!a.cofactors.empty()) {
        Row5 c{};
        std::copy(a.cofactors.begin(), a.cofactors.end(), c.begin());
        return Hyperplane3Flat(c, axes);
    }
    PlanePose pose;
    if (!a.plane.empty()) {
        const auto eq = a.plane.find('=');
        if (eq == std::string::npos) throw Error(ErrorCode::InvalidParams, "--plane expects axis=offset");
        const int ax = parse_axis_or_throw(a.plane.substr(0, eq));
        pose.anchor[static_cast<std::size_t>(ax)] = parse_number(a.plane.substr(eq + 1));
        pose.normal_axis = ax;
    } else {
        if (!a.anchor.empty()) {
            if (a.anchor.size() != axes.size())
                throw Error(ErrorCode::InvalidParams, "--anchor needs " + std::to_string(axes.size()) + " values");
            for (std::size_t i = 0; i < axes.size(); ++i) pose.anchor[static_cast<std::size_t>(axes[i])] = a.anchor[i];
        }
        if (!a.normal_axis.empty()) pose.normal_axis = parse_axis_or_throw(a.normal_axis);
        pose.angles = parse_rotations(a.rotate);
    }
    if (!axes.contains(pose.normal_axis)) throw Error(ErrorCode::InvalidPlane, "normal axis is not an active axis");
    return pose_to_hyperplane(pose, axes);
}

// Radius of the sphere every vertex of the model lies on, when it has one.
std::optional<double> inscribed_radius(const Complex3& cx)
{
    auto it = cx.metadata.find("radius");
    if (it == cx.metadata.end() || cx.pool.empty()) return std::nullopt;
    double r = 0.0;
    try {
        r = std::stod(it->second);
    } catch (const std::exception&) {
        return std::nullopt;
    }
    for (const auto& v : cx.pool.vertices()) {
        double n2 = 0.0;
        for (int a : cx.axes) n2 += v[static_cast<std::size_t>(a)] * v[static_cast<std::size_t>(a)];
        if (std::abs(std::sqrt(n2) - r) > 1e-9 * r) return std::nullopt;
    }
    return r;
}

struct RadiusCheck {
    double expected = 0.0;
    double max_relative_error = 0.0;
};

std::optional<RadiusCheck> radius_check(const TriMesh& mesh, const Hyperplane3Flat& plane, const ActiveAxes& axes,
                                        double radius)
{
    const Hyperplane3Flat unit = plane.normalized();
    const double d = unit.cofactors()[0];
    if (std::abs(d) >= radius || mesh.world.empty()) return std::nullopt;
    const Vec4 n = unit.normal();
    Vec4 centre{};
    for (std::size_t i = 0; i < 4; ++i) centre[i] = -d * n[i];
    RadiusCheck rc;
    rc.expected = std::sqrt(radius * radius - d * d);
    for (const auto& w : mesh.world) {
        const Vec4 p = gather4(w, axes);
        double r2 = 0.0;
        for (std::size_t i = 0; i < 4; ++i) r2 += (p[i] - centre[i]) * (p[i] - centre[i]);
        rc.max_relative_error = std::max(rc.max_relative_error, std::abs(std::sqrt(r2) - rc.expected) / rc.expected);
    }
    return rc;
}

void print_topology(std::ostream& out, const TopologyReport& t)
{
    out << "vertices " << t.vertices << " edges " << t.edges << " faces " << t.faces << " euler " << t.euler << "\n";
    out << "components " << t.components << " closed " << (t.closed ? "yes" : "no") << " boundary_edges "
        << t.boundary_edges << " non_manifold_edges " << t.non_manifold_edges << "\n";
    for (std::size_t i = 0; i < t.per_component.size(); ++i) {
        const auto& c = t.per_component[i];
        out << "  component " << i << ": V " << c.vertices << " E " << c.edges << " F " << c.faces << " euler "
            << c.euler << " genus ";
        if (c.genus)
            out << *c.genus;
        else
            out << "-";
        out << "\n";
    }
}

void print_diagnostics(std::ostream& out, const SliceDiagnostics& d)
{
    out << "kinds";
    for (std::size_t k = 0; k < kSliceKindCount; ++k)
        out << " " << to_string(static_cast<SliceKind>(k)) << "=" << d.kinds[k];
    out << "\n";
    out << "degenerate five_plus " << d.five_plus << " dropped_small " << d.dropped_small << " coplanar_faces "
        << d.coplanar_faces << " contained_faces " << d.contained_faces << "\n";
    if (d.outside_time_extent) out << "time outside the model's extent: empty section\n";
}

void print_closed(std::ostream& out, const ClosedReport& r)
{
    out << "faces " << r.faces << " boundary_faces " << r.boundary_faces << " overshared_faces "
        << r.overshared_faces << " closed " << (r.is_closed ? "yes" : "no") << "\n";
}

unsigned default_workers() { return std::max(1u, std::thread::hardware_concurrency()); }

// generate -------------------------------------------------------------------

struct GenerateArgs {
    std::string shape;
    std::string out;
    double radius = std::numeric_limits<double>::quiet_NaN();
    double tube = 2.0;
    double depth = 1.0;
    double delta_ang = std::numbers::pi / 8.0;
    std::vector<int> steps;
    bool extrude = false;
    double speed = 1.0;
    std::vector<double> t_range{0.0, 1.0};
    int t_steps = 8;
    double project = 0.0;
};

int cmd_generate(const GenerateArgs& a, std::ostream& out)
{
    Complex3 cx;
    if (a.shape == "3torus") {
        TorusParams p;
        if (!std::isnan(a.radius)) p.radius = a.radius;
        p.tube = a.tube;
        p.depth = a.depth;
        p.delta_ang = a.delta_ang;
        cx = make_3torus(p);
    } else {
        SphereParams p;
        if (!std::isnan(a.radius)) p.radius = a.radius;
        if (!a.steps.empty()) {
            p.chi_steps = a.steps[0];
            p.phi_steps = a.steps[1];
            p.theta_steps = a.steps[2];
        }
        cx = make_3sphere(p);
    }
    if (a.project > 0.0) cx = project_to_3sphere(cx, a.project);
    if (a.extrude) {
        ExtrudeParams e;
        e.velocity = VecN(a.speed, 0.0, 0.0, 0.0);
        e.t_min = a.t_range[0];
        e.t_max = a.t_range[1];
        e.t_steps = a.t_steps;
        cx = extrude_along_t(cx, e);
    }
    save_model(cx, a.out);
    out << "model " << cx.name << " tets " << cx.tets.size() << " vertices " << cx.pool.size() << "\n";
    const auto closed = validate_closed(cx);
    print_closed(out, closed);
    out << "wrote " << a.out << "\n";
    return kOk;
}

// slice ----------------------------------------------------------------------

struct SliceArgs {
    std::string model;
    PlaneArgs plane;
    std::optional<double> time;
    std::string out;
    std::string format;
    unsigned workers = 0;
    bool diagnostic_colors = false;
};

int cmd_slice(const SliceArgs& a, std::ostream& out)
{
    const Complex3 cx = load_model(a.model);
    const Hyperplane3Flat plane = plane_from(a.plane, cx.axes);
    SliceConfig cfg;
    cfg.workers = a.workers ? a.workers : default_workers();
    const SliceResult res = slice_complex({plane, a.time, a.diagnostic_colors}, cx, cfg);
    const TopologyReport topo = mesh_topology(res.mesh);

    out << "plane";
    for (double c : plane.cofactors()) out << " " << std::setprecision(17) << c;
    out << std::setprecision(6) << "\n";
    print_topology(out, topo);
    print_diagnostics(out, res.diagnostics);
    if (topo.faces == 0) out << "empty section\n";
    if (const auto r = inscribed_radius(cx)) {
        if (const auto rc = radius_check(res.mesh, plane, cx.axes, *r))
            out << "max radius error " << rc->max_relative_error << " (expected radius " << rc->expected << ")\n";
    }
    if (!a.out.empty()) {
        write_mesh(res.mesh, format_for(a.format, a.out), a.out);
        out << "wrote " << a.out << "\n";
    }
    return kOk;
}

// sweep ----------------------------------------------------------------------

struct SweepArgs {
    std::string model;
    std::string axis = "w";
    std::vector<double> range;
    int frames = 8;
    std::string out_dir;
    std::string format = "obj";
    std::optional<double> time;
    unsigned workers = 0;
};

int cmd_sweep(const SweepArgs& a, std::ostream& out, std::ostream& err)
{
    if (a.frames < 1) return usage(err, "--frames must be at least 1");
    const Complex3 cx = load_model(a.model);
    const int ax = parse_axis_or_throw(a.axis);
    if (!cx.axes.contains(ax)) throw Error(ErrorCode::InvalidPlane, "sweep axis is not an active axis");
    const auto fmt = parse_mesh_format(a.format);
    if (!fmt) throw Error(ErrorCode::InvalidParams, "unknown mesh format '" + a.format + "'");
    if (!a.out_dir.empty()) fs::create_directories(a.out_dir);

    const auto radius = inscribed_radius(cx);
    SliceConfig cfg;
    cfg.workers = a.workers ? a.workers : default_workers();

    out << "frame offset V F euler components closed";
    if (radius) out << " radius_err";
    out << "\n";
    for (int f = 0; f < a.frames; ++f) {
        const double offset =
            a.frames == 1 ? a.range[0] : a.range[0] + (a.range[1] - a.range[0]) * f / static_cast<double>(a.frames - 1);
        PlanePose pose;
        pose.anchor[static_cast<std::size_t>(ax)] = offset;
        pose.normal_axis = ax;
        const Hyperplane3Flat plane = pose_to_hyperplane(pose, cx.axes);
        const SliceResult res = slice_complex({plane, a.time, false}, cx, cfg);
        const TopologyReport t = mesh_topology(res.mesh);
        out << f << " " << offset << " " << t.vertices << " " << t.faces << " " << t.euler << " " << t.components
            << " " << (t.closed ? "yes" : "no");
        if (radius) {
            const auto rc = radius_check(res.mesh, plane, cx.axes, *radius);
            out << " ";
            if (rc)
                out << rc->max_relative_error;
            else
                out << "-";
        }
        out << "\n";
        if (!a.out_dir.empty()) {
            std::ostringstream name;
            name << "frame_" << std::setw(3) << std::setfill('0') << f << extension(*fmt);
            write_mesh(res.mesh, *fmt, fs::path(a.out_dir) / name.str());
        }
    }
    return kOk;
}

// validate -------------------------------------------------------------------

int cmd_validate(const std::string& model, std::ostream& out)
{
    const Complex3 cx = load_model(model);
    out << "model " << cx.name << " axes " << cx.axes.to_string() << " tets " << cx.tets.size() << " vertices "
        << cx.pool.size() << "\n";
    const auto r = validate_closed(cx);
    print_closed(out, r);
    return r.is_closed ? kOk : kDomainFailure;
}

// project --------------------------------------------------------------------

struct ProjectArgs {
    std::string model;
    std::vector<std::string> drop;
    std::vector<std::string> rotate;
    bool standard = false;
    std::string out;
    std::string out_dir;
    std::string format = "obj";
};

int cmd_project(const ProjectArgs& a, std::ostream& out)
{
    const Complex3 cx = load_model(a.model);
    const auto fmt = parse_mesh_format(a.format);
    if (!fmt) throw Error(ErrorCode::InvalidParams, "unknown mesh format '" + a.format + "'");

    std::vector<ViewSpec> views;
    if (a.standard) {
        if (!a.drop.empty()) throw Error(ErrorCode::InvalidParams, "--standard and --drop are exclusive");
        if (cx.axes != standard_viewport_axes(cx.axes.size()))
            throw Error(ErrorCode::BadViewSpec, "standard viewports need axes x y z w or t x y z w");
        views = standard_viewports(cx.axes.size());
        if (a.out_dir.empty()) throw Error(ErrorCode::InvalidParams, "--standard needs --out-dir");
    } else {
        ViewSpec v;
        for (const auto& d : a.drop) v.drop.push_back(parse_axis_or_throw(d));
        v.rotations = parse_rotations(a.rotate);
        v.label = "view";
        views.push_back(v);
        if (a.out.empty() && a.out_dir.empty()) throw Error(ErrorCode::InvalidParams, "give -o or --out-dir");
    }
    if (!a.out_dir.empty()) fs::create_directories(a.out_dir);

    for (std::size_t i = 0; i < views.size(); ++i) {
        const TriMesh mesh = project_complex(cx, views[i]);
        fs::path path;
        if (!a.out.empty() && views.size() == 1) {
            path = a.out;
        } else {
            std::ostringstream name;
            name << "view_" << std::setw(2) << std::setfill('0') << i << "_" << views[i].label << extension(*fmt);
            path = fs::path(a.out_dir) / name.str();
        }
        write_mesh(mesh, a.out.empty() ? *fmt : format_for(a.format, path), path);
        const auto axes = surviving_axes(views[i], cx.axes);
        out << views[i].label << " axes " << axis_name(axes[0]) << axis_name(axes[1]) << axis_name(axes[2])
            << " triangles " << mesh.triangles.size() << " -> " << path.string() << "\n";
    }
    return kOk;
}

// serve ----------------------------------------------------------------------

struct ServeArgs {
    std::string models;
    std::string host = "127.0.0.1";
    int port = 8080;
    unsigned workers = 0;
};

int cmd_serve(const ServeArgs& a, std::ostream& out)
{
    ServiceConfig cfg;
    cfg.model_dir = a.models;
    if (cfg.model_dir.empty()) {
        const char* env = std::getenv("HYPERSLICE_MODEL_DIR");
        cfg.model_dir = env && *env ? env : "models";
    }
    cfg.workers = a.workers ? a.workers : default_workers();
    SliceService service(cfg);
    HttpServer server(service);
    const int port = server.bind(a.host, a.port);
    if (port < 0) throw Error(ErrorCode::Io, "cannot listen on " + a.host + ":" + std::to_string(a.port));
    out << "serving " << service.list_models().size() << " model(s) from " << cfg.model_dir.string() << " on http://"
        << a.host << ":" << port << " with " << cfg.workers << " worker(s)\n"
        << std::flush;

    sigset_t set;
    sigemptyset(&set);
    sigaddset(&set, SIGINT);
    sigaddset(&set, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &set, nullptr);
    std::thread listener([&] { server.listen(); });
    int sig = 0;
    sigwait(&set, &sig);
    server.stop();
    listener.join();
    pthread_sigmask(SIG_UNBLOCK, &set, nullptr);
    out << "stopped\n";
    return kOk;
}

} // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Slice 4D simplicial models with 3-flats"};
    app.name("hyperslice");
    app.require_subcommand(1);

    GenerateArgs gen;
    auto* generate = app.add_subcommand("generate", "Generate a 3-torus or 3-sphere model");
    generate->add_option("shape", gen.shape)->required()->check(CLI::IsMember({"3torus", "3sphere"}));
    generate->add_option("-o,--out", gen.out, "model file to write")->required();
    generate->add_option("--radius", gen.radius, "major radius (torus) or radius (sphere)");
    generate->add_option("--tube", gen.tube);
    generate->add_option("--depth", gen.depth);
    generate->add_option("--delta-ang", gen.delta_ang, "torus angular step in radians");
    generate->add_option("--steps", gen.steps, "sphere steps: chi phi theta")->expected(3);
    generate->add_option("--project", gen.project, "rescale onto a 3-sphere of this radius");
    generate->add_flag("--extrude", gen.extrude, "extrude along t");
    generate->add_option("--speed", gen.speed, "extrusion velocity along t");
    generate->add_option("--t-range", gen.t_range, "extrusion time extent")->expected(2);
    generate->add_option("--t-steps", gen.t_steps);

    SliceArgs sl;
    auto* slice = app.add_subcommand("slice", "Intersect a model with a 3-flat");
    slice->add_option("model", sl.model)->required();
    add_plane_options(slice, sl.plane);
    slice->add_option("--time", sl.time, "time for extruded models");
    slice->add_option("-o,--out", sl.out, "mesh file to write");
    slice->add_option("--format", sl.format, "obj or json (default from extension)");
    slice->add_option("--workers", sl.workers, "slicing threads (default: hardware)");
    slice->add_flag("--diagnostic-colors", sl.diagnostic_colors, "color triangles by slice case");

    SweepArgs sw;
    auto* sweep = app.add_subcommand("sweep", "Slice along a sequence of parallel flats");
    sweep->add_option("model", sw.model)->required();
    sweep->add_option("--axis", sw.axis, "sweep axis (default w)");
    sweep->add_option("--range", sw.range, "start stop")->expected(2)->required();
    sweep->add_option("--frames", sw.frames, "number of frames (default 8)");
    sweep->add_option("--out-dir", sw.out_dir, "directory for numbered mesh files");
    sweep->add_option("--format", sw.format, "obj or json");
    sweep->add_option("--time", sw.time);
    sweep->add_option("--workers", sw.workers);

    std::string validate_model;
    auto* validate = app.add_subcommand("validate", "Check that a model is a closed complex");
    validate->add_option("model", validate_model)->required();

    ProjectArgs pr;
    auto* project = app.add_subcommand("project", "Orthographic projection to 3D");
    project->add_option("model", pr.model)->required();
    project->add_option("--drop", pr.drop, "axes to discard")->expected(1, 2);
    project->add_option("--rotate", pr.rotate, "axis axis radians (repeatable)")
        ->expected(3)
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
    project->add_flag("--standard", pr.standard, "write the standard viewport set");
    project->add_option("-o,--out", pr.out);
    project->add_option("--out-dir", pr.out_dir);
    project->add_option("--format", pr.format);

    ServeArgs sv;
    auto* serve = app.add_subcommand("serve", "Run the slicing service");
    serve->add_option("--models", sv.models, "model directory (or HYPERSLICE_MODEL_DIR)");
    serve->add_option("--host", sv.host);
    serve->add_option("--port", sv.port);
    serve->add_option("--workers", sv.workers);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kInputFailure;
    }

    try {
        if (*generate) return cmd_generate(gen, out);
        if (*slice) return cmd_slice(sl, out);
        if (*sweep) return cmd_sweep(sw, out, err);
        if (*validate) return cmd_validate(validate_model, out);
        if (*project) return cmd_project(pr, out);
        if (*serve) return cmd_serve(sv, out);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return exit_for(e.code());
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return kInputFailure;
    }
    return kInputFailure;
}

} // namespace hyperslice::cli

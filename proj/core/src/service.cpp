#include "hyperslice/service.hpp"

#include "hyperslice/error.hpp"
#include "hyperslice/modelio.hpp"
#include "hyperslice/projector.hpp"

#include <httplib.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <limits>
#include <sstream>

namespace hyperslice {

using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start)
{
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

json error_json(const json& request_id, ErrorCode code, const std::string& message)
{
    return {{"request_id", request_id}, {"error", {{"code", std::string(to_string(code))}, {"message", message}}}};
}

json request_id_of(const json& request)
{
    if (request.is_object() && request.contains("request_id")) return request["request_id"];
    return nullptr;
}

int axis_of(const json& j)
{
    if (j.is_number_integer()) {
        const int a = j.get<int>();
        if (a < 0 || a >= static_cast<int>(kComponents)) throw Error(ErrorCode::InvalidRequest, "axis out of range");
        return a;
    }
    if (!j.is_string()) throw Error(ErrorCode::InvalidRequest, "axis must be a name or index");
    const auto a = parse_axis(j.get<std::string>());
    if (!a) throw Error(ErrorCode::InvalidRequest, "unknown axis '" + j.get<std::string>() + "'");
    return *a;
}

double number_of(const json& j, const char* what)
{
    if (!j.is_number()) throw Error(ErrorCode::InvalidRequest, std::string(what) + " must be a number");
    return j.get<double>();
}

AxisRotation rotation_of(const json& j)
{
    AxisRotation r;
    if (j.is_array() && j.size() == 3) {
        r.axis_i = axis_of(j[0]);
        r.axis_j = axis_of(j[1]);
        r.radians = number_of(j[2], "rotation angle");
    } else if (j.is_object()) {
        r.axis_i = axis_of(j.at("i"));
        r.axis_j = axis_of(j.at("j"));
        r.radians = number_of(j.at("radians"), "rotation angle");
    } else {
        throw Error(ErrorCode::InvalidRequest, "rotation must be [i, j, radians] or {i, j, radians}");
    }
    return r;
}

Hyperplane3Flat plane_of(const json& req, const ActiveAxes& axes)
{
    const bool has_pose = req.contains("pose");
    const bool has_cof = req.contains("cofactors");
    if (has_pose == has_cof) throw Error(ErrorCode::InvalidRequest, "exactly one of pose and cofactors is required");
    if (axes.size() != 4) throw Error(ErrorCode::InvalidPlane, "model does not have four active axes");

    if (has_cof) {
        const json& c = req["cofactors"];
        if (!c.is_array() || c.size() != 5) throw Error(ErrorCode::InvalidPlane, "cofactors need 5 numbers");
        Row5 row{};
        for (std::size_t i = 0; i < 5; ++i) row[i] = number_of(c[i], "cofactor");
        return Hyperplane3Flat(row, axes);
    }

    const json& p = req["pose"];
    if (!p.is_object()) throw Error(ErrorCode::InvalidRequest, "pose must be an object");
    PlanePose pose;
    if (p.contains("anchor")) {
        const json& a = p["anchor"];
        if (!a.is_array() || (a.size() != axes.size() && a.size() != kComponents))
            throw Error(ErrorCode::InvalidRequest, "anchor needs one value per active axis or 7 values");
        if (a.size() == kComponents) {
            for (std::size_t i = 0; i < kComponents; ++i) pose.anchor[i] = number_of(a[i], "anchor");
        } else {
            for (std::size_t i = 0; i < axes.size(); ++i)
                pose.anchor[static_cast<std::size_t>(axes[i])] = number_of(a[i], "anchor");
        }
    }
    if (p.contains("normal_axis")) pose.normal_axis = axis_of(p["normal_axis"]);
    if (p.contains("angles")) {
        if (!p["angles"].is_array()) throw Error(ErrorCode::InvalidRequest, "angles must be a list");
        for (const auto& r : p["angles"]) pose.angles.push_back(rotation_of(r));
    }
    if (!axes.contains(pose.normal_axis)) throw Error(ErrorCode::InvalidPlane, "normal axis is not active");
    try {
        return pose_to_hyperplane(pose, axes);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::BadAxisPair) throw Error(ErrorCode::InvalidPlane, e.what());
        throw;
    }
}

std::optional<ViewSpec> view_of(const json& req)
{
    if (!req.contains("view") || req["view"].is_null()) return std::nullopt;
    const json& v = req["view"];
    if (!v.is_object()) throw Error(ErrorCode::BadViewSpec, "view must be an object");
    ViewSpec view;
    if (v.contains("drop"))
        for (const auto& a : v["drop"]) view.drop.push_back(axis_of(a));
    if (v.contains("rotations"))
        for (const auto& r : v["rotations"]) view.rotations.push_back(rotation_of(r));
    if (v.contains("label") && v["label"].is_string()) view.label = v["label"].get<std::string>();
    return view;
}

json topology_json(const TopologyReport& t)
{
    json comps = json::array();
    for (const auto& c : t.per_component) {
        json j{{"vertices", c.vertices}, {"edges", c.edges}, {"faces", c.faces}, {"euler", c.euler},
               {"closed", c.closed}};
        j["genus"] = c.genus ? json(*c.genus) : json(nullptr);
        comps.push_back(std::move(j));
    }
    return {{"vertices", t.vertices},
            {"edges", t.edges},
            {"faces", t.faces},
            {"euler", t.euler},
            {"components", t.components},
            {"closed", t.closed},
            {"boundary_edges", t.boundary_edges},
            {"non_manifold_edges", t.non_manifold_edges},
            {"per_component", std::move(comps)}};
}

json diagnostics_json(const SliceDiagnostics& d)
{
    json kinds = json::object();
    for (std::size_t k = 0; k < kSliceKindCount; ++k)
        kinds[std::string(to_string(static_cast<SliceKind>(k)))] = d.kinds[k];
    return {{"kinds", std::move(kinds)},
            {"five_plus", d.five_plus},
            {"dropped_small", d.dropped_small},
            {"coplanar_faces", d.coplanar_faces},
            {"contained_faces", d.contained_faces},
            {"outside_time_extent", d.outside_time_extent}};
}

TriMesh reproject(const TriMesh& mesh, const ViewSpec& view, const ActiveAxes& axes)
{
    validate_view(view, axes);
    const auto pts = project(mesh.world, view, axes);
    std::vector<std::array<Index, 3>> tris;
    tris.reserve(mesh.triangles.size());
    for (const auto& t : mesh.triangles) tris.push_back(t.v);
    TriMesh out = TriMesh::from_arrays(pts, tris);
    for (std::size_t i = 0; i < tris.size(); ++i) {
        out.triangles[i].color = mesh.triangles[i].color;
        out.triangles[i].source = mesh.triangles[i].source;
    }
    out.world = mesh.world;
    return out;
}

} // namespace

CatalogEntry describe(const std::string& id, const Complex3& cx)
{
    CatalogEntry e;
    e.id = id;
    e.name = cx.name.empty() ? id : cx.name;
    e.axes = cx.axes;
    e.tets = cx.tets.size();
    e.vertices = cx.pool.size();
    e.time = cx.time;
    for (int a : cx.axes) {
        AxisRange r{a, 0.0, 0.0};
        if (!cx.pool.empty()) {
            r.min = std::numeric_limits<double>::infinity();
            r.max = -std::numeric_limits<double>::infinity();
            for (const auto& v : cx.pool.vertices()) {
                r.min = std::min(r.min, v[static_cast<std::size_t>(a)]);
                r.max = std::max(r.max, v[static_cast<std::size_t>(a)]);
            }
        }
        e.ranges.push_back(r);
    }
    return e;
}

std::stop_token JobRegistry::begin(const std::string& client)
{
    std::lock_guard lock(mutex_);
    auto& slot = running_[client];
    slot.request_stop();
    slot = std::stop_source{};
    return slot.get_token();
}

SliceService::SliceService(ServiceConfig config) : config_(std::move(config))
{
    namespace fs = std::filesystem;
    std::error_code ec;
    if (!fs::is_directory(config_.model_dir, ec))
        throw Error(ErrorCode::Io, "model directory '" + config_.model_dir.string() + "' does not exist");

    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(config_.model_dir))
        if (entry.is_regular_file() && entry.path().extension() == ".hsl") files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
        try {
            add_model(f.stem().string(), load_model(f));
        } catch (const Error& e) {
            spdlog::warn("skipping model {}: {}", f.string(), e.what());
        }
    }
    spdlog::info("loaded {} model(s) from {}", catalog_.size(), config_.model_dir.string());
}

SliceService::SliceService(std::map<std::string, Complex3> models, ServiceConfig config)
    : config_(std::move(config))
{
    for (auto& [id, cx] : models) add_model(id, std::move(cx));
}

void SliceService::add_model(const std::string& id, Complex3 cx)
{
    catalog_.push_back(describe(id, cx));
    models_[id] = std::make_shared<const Complex3>(std::move(cx));
    std::sort(catalog_.begin(), catalog_.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
}

std::shared_ptr<const Complex3> SliceService::model(const std::string& id) const
{
    auto it = models_.find(id);
    return it == models_.end() ? nullptr : it->second;
}

json SliceService::models_json() const
{
    json list = json::array();
    for (const auto& e : catalog_) {
        json axes = json::array();
        json ranges = json::object();
        for (int a : e.axes) axes.push_back(std::string(1, axis_name(a)));
        for (const auto& r : e.ranges) ranges[std::string(1, axis_name(r.axis))] = {r.min, r.max};
        json j{{"id", e.id}, {"name", e.name}, {"axes", std::move(axes)}, {"tets", e.tets},
               {"vertices", e.vertices}, {"ranges", std::move(ranges)}};
        if (e.time) j["time"] = {{"t_min", e.time->t_min}, {"t_max", e.time->t_max}, {"steps", e.time->steps}};
        list.push_back(std::move(j));
    }
    return {{"models", std::move(list)}};
}

namespace {

json run_slice(const Complex3& cx, const std::string& model_id, const json& request_id,
               const Hyperplane3Flat& plane, std::optional<double> time, const std::optional<ViewSpec>& view,
               bool diagnostic_colors, unsigned workers, std::stop_token stop)
{
    const auto start = Clock::now();
    SliceRequest req{plane, time, diagnostic_colors};
    SliceConfig cfg;
    cfg.workers = workers;
    cfg.stop = stop;
    SliceResult res = slice_complex(req, cx, cfg);
    if (res.cancelled) return error_json(request_id, ErrorCode::Superseded, "a newer request replaced this one");
    const double slice_ms = ms_since(start);

    TriMesh mesh = view ? reproject(res.mesh, *view, cx.axes) : std::move(res.mesh);
    const auto topo_start = Clock::now();
    const TopologyReport topo = mesh_topology(mesh);
    const double topo_ms = ms_since(topo_start);

    json cof = json::array();
    for (double c : plane.cofactors()) cof.push_back(c);
    json out{{"request_id", request_id},
             {"model", model_id},
             {"plane", std::move(cof)},
             {"mesh", mesh_to_json(mesh)},
             {"topology", topology_json(topo)},
             {"diagnostics", diagnostics_json(res.diagnostics)}};
    out["time"] = time ? json(*time) : json(nullptr);
    out["timing_ms"] = {{"slice", slice_ms}, {"topology", topo_ms}, {"total", ms_since(start)}};
    return out;
}

} // namespace

json SliceService::slice(const json& request, std::stop_token stop) const
{
    const json rid = request_id_of(request);
    try {
        if (!request.is_object()) throw Error(ErrorCode::InvalidRequest, "request must be a JSON object");
        if (!request.contains("model") || !request["model"].is_string())
            throw Error(ErrorCode::InvalidRequest, "model id missing");
        const std::string id = request["model"].get<std::string>();
        const auto cx = model(id);
        if (!cx) return error_json(rid, ErrorCode::UnknownModel, "no model '" + id + "'");
        const Hyperplane3Flat plane = plane_of(request, cx->axes);
        std::optional<double> time;
        if (request.contains("time") && !request["time"].is_null()) time = number_of(request["time"], "time");
        const bool colors = request.value("diagnostic_colors", false);
        return run_slice(*cx, id, rid, plane, time, view_of(request), colors, config_.workers, stop);
    } catch (const Error& e) {
        return error_json(rid, e.code(), e.what());
    } catch (const json::exception& e) {
        return error_json(rid, ErrorCode::InvalidRequest, e.what());
    }
}

void SliceService::sweep_each(const json& request, std::stop_token stop,
                              const std::function<bool(const json&)>& emit) const
{
    const json rid = request_id_of(request);
    try {
        if (!request.is_object()) throw Error(ErrorCode::InvalidRequest, "request must be a JSON object");
        if (!request.contains("model") || !request["model"].is_string())
            throw Error(ErrorCode::InvalidRequest, "model id missing");
        const std::string id = request["model"].get<std::string>();
        const auto cx = model(id);
        if (!cx) {
            emit(error_json(rid, ErrorCode::UnknownModel, "no model '" + id + "'"));
            return;
        }
        const int ax = axis_of(request.value("axis", json("w")));
        if (!cx->axes.contains(ax)) throw Error(ErrorCode::InvalidPlane, "sweep axis is not active");
        const double start = number_of(request.at("start"), "start");
        const double stop_at = number_of(request.at("stop"), "stop");
        const json& fr = request.at("frames");
        if (!fr.is_number_integer() || fr.get<long>() < 1) throw Error(ErrorCode::InvalidRequest, "frames must be >= 1");
        const long frames = fr.get<long>();
        std::optional<double> time;
        if (request.contains("time") && !request["time"].is_null()) time = number_of(request["time"], "time");
        const auto view = view_of(request);
        const bool colors = request.value("diagnostic_colors", false);

        for (long f = 0; f < frames; ++f) {
            if (stop.stop_requested()) {
                emit(error_json(rid, ErrorCode::Superseded, "a newer request replaced this sweep"));
                return;
            }
            const double offset =
                frames == 1 ? start : start + (stop_at - start) * static_cast<double>(f) / static_cast<double>(frames - 1);
            PlanePose pose;
            pose.anchor[static_cast<std::size_t>(ax)] = offset;
            pose.normal_axis = ax;
            json payload = run_slice(*cx, id, rid, pose_to_hyperplane(pose, cx->axes), time, view, colors,
                                     config_.workers, stop);
            payload["frame"] = f;
            payload["offset"] = offset;
            if (!emit(payload) || payload.contains("error")) return;
        }
    } catch (const Error& e) {
        emit(error_json(rid, e.code(), e.what()));
    } catch (const json::exception& e) {
        emit(error_json(rid, ErrorCode::InvalidRequest, e.what()));
    }
}

json SliceService::sweep(const json& request, std::stop_token stop) const
{
    json frames = json::array();
    json failure;
    sweep_each(request, stop, [&](const json& frame) {
        if (frame.contains("error")) {
            failure = frame;
            return false;
        }
        frames.push_back(frame);
        return true;
    });
    if (!failure.is_null()) return failure;
    return {{"request_id", request_id_of(request)}, {"frames", std::move(frames)}};
}

int status_for(const json& result)
{
    if (!result.is_object() || !result.contains("error")) return 200;
    const std::string code = result["error"].value("code", "");
    if (code == "UnknownModel") return 404;
    if (code == "Superseded") return 409;
    return 400;
}

std::uint64_t fnv1a64(std::string_view data)
{
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char ch : data) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    return h;
}

namespace {

std::string hex64(std::uint64_t v)
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

} // namespace

std::vector<std::string> chunk_payload(const std::string& body, std::size_t chunk_bytes)
{
    if (chunk_bytes == 0 || body.size() <= chunk_bytes) return {body};
    std::vector<std::string> out;
    std::size_t index = 0;
    for (std::size_t pos = 0; pos < body.size(); pos += chunk_bytes, ++index)
        out.push_back(json{{"chunk", index}, {"data", body.substr(pos, chunk_bytes)}}.dump() + "\n");
    out.push_back(json{{"checksum", "fnv1a64:" + hex64(fnv1a64(body))}, {"chunks", index}, {"bytes", body.size()}}
                      .dump() +
                  "\n");
    return out;
}

std::string reassemble_chunks(const std::string& ndjson)
{
    std::istringstream in(ndjson);
    std::string line;
    std::string body;
    std::size_t expected = 0;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        json rec;
        try {
            rec = json::parse(line);
        } catch (const json::exception& e) {
            throw ParseError(ErrorCode::ParseError, lineno, e.what());
        }
        if (rec.contains("checksum")) {
            if (rec.value("chunks", std::size_t{0}) != expected)
                throw ParseError(ErrorCode::ParseError, lineno, "chunk count mismatch");
            if (rec["checksum"].get<std::string>() != "fnv1a64:" + hex64(fnv1a64(body)))
                throw ParseError(ErrorCode::ParseError, lineno, "checksum mismatch");
            return body;
        }
        if (rec.value("chunk", std::size_t{0}) != expected)
            throw ParseError(ErrorCode::ParseError, lineno, "chunk out of order");
        body += rec.at("data").get<std::string>();
        ++expected;
    }
    throw ParseError(ErrorCode::ParseError, lineno, "missing checksum record");
}

struct HttpServer::Impl {
    const SliceService& service;
    httplib::Server server;

    explicit Impl(const SliceService& s) : service(s) {}

    void respond(httplib::Response& res, const json& result) const
    {
        res.status = status_for(result);
        std::string body = result.dump();
        if (body.size() <= service.config().chunk_bytes) {
            res.set_content(std::move(body), "application/json");
            return;
        }
        auto chunks = std::make_shared<std::vector<std::string>>(chunk_payload(body, service.config().chunk_bytes));
        res.set_chunked_content_provider("application/x-ndjson",
                                         [chunks, next = std::size_t{0}](std::size_t, httplib::DataSink& sink) mutable {
                                             if (next < chunks->size()) {
                                                 const auto& c = (*chunks)[next++];
                                                 sink.write(c.data(), c.size());
                                             } else {
                                                 sink.done();
                                             }
                                             return true;
                                         });
    }

    static json parse_body(const httplib::Request& req, json& out)
    {
        try {
            out = json::parse(req.body);
            return nullptr;
        } catch (const json::exception& e) {
            return error_json(nullptr, ErrorCode::InvalidRequest, e.what());
        }
    }

    static std::string client_of(const httplib::Request& req, const json& body)
    {
        if (body.is_object() && body.contains("client") && body["client"].is_string())
            return body["client"].get<std::string>();
        if (req.has_header("X-Client-Id")) return req.get_header_value("X-Client-Id");
        return req.remote_addr;
    }

    void install()
    {
        server.Get("/models", [this](const httplib::Request&, httplib::Response& res) {
            res.set_content(service.models_json().dump(), "application/json");
        });

        server.Post("/slice", [this](const httplib::Request& req, httplib::Response& res) {
            json body;
            if (json err = parse_body(req, body); !err.is_null()) return respond(res, err);
            const auto token = service.jobs().begin(client_of(req, body));
            respond(res, service.slice(body, token));
        });

        server.Post("/sweep", [this](const httplib::Request& req, httplib::Response& res) {
            json body;
            if (json err = parse_body(req, body); !err.is_null()) return respond(res, err);
            const auto token = service.jobs().begin(client_of(req, body));
            respond(res, service.sweep(body, token));
        });

        // Server-sent events: one "frame" event per sweep frame, then "done".
        server.Get("/live", [this](const httplib::Request& req, httplib::Response& res) {
            json body = json::object();
            for (const auto& [k, v] : req.params) {
                if (k == "start" || k == "stop" || k == "time") {
                    try {
                        body[k] = std::stod(v);
                    } catch (const std::exception&) {
                        body[k] = v;
                    }
                } else if (k == "frames") {
                    try {
                        body[k] = std::stol(v);
                    } catch (const std::exception&) {
                        body[k] = v;
                    }
                } else {
                    body[k] = v;
                }
            }
            const auto token = service.jobs().begin(client_of(req, body));
            auto done = std::make_shared<bool>(false);
            res.set_chunked_content_provider(
                "text/event-stream", [this, body, token, done](std::size_t, httplib::DataSink& sink) {
                    if (*done) {
                        sink.done();
                        return true;
                    }
                    service.sweep_each(body, token, [&](const json& frame) {
                        const char* kind = frame.contains("error") ? "error" : "frame";
                        const std::string ev = std::string("event: ") + kind + "\ndata: " + frame.dump() + "\n\n";
                        return sink.write(ev.data(), ev.size());
                    });
                    const std::string end = "event: done\ndata: {}\n\n";
                    sink.write(end.data(), end.size());
                    *done = true;
                    sink.done();
                    return true;
                });
        });
    }
};

HttpServer::HttpServer(const SliceService& service) : impl_(std::make_unique<Impl>(service)) { impl_->install(); }

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port)
{
    if (port == 0) return impl_->server.bind_to_any_port(host);
    return impl_->server.bind_to_port(host, port) ? port : -1;
}

bool HttpServer::listen() { return impl_->server.listen_after_bind(); }

void HttpServer::stop()
{
    if (impl_) impl_->server.stop();
}

} // namespace hyperslice

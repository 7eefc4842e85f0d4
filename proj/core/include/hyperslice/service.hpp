#pragma once

#include "hyperslice/complex.hpp"
#include "hyperslice/slicer.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stop_token>
#include <string>
#include <vector>

namespace hyperslice {

inline constexpr std::size_t kDefaultChunkBytes = 10u * 1024u * 1024u;

struct ServiceConfig {
    std::filesystem::path model_dir;
    unsigned workers = 0;
    std::size_t chunk_bytes = kDefaultChunkBytes;
};

struct AxisRange {
    int axis = 0;
    double min = 0.0;
    double max = 0.0;
};

struct CatalogEntry {
    std::string id; // file stem
    std::string name;
    ActiveAxes axes;
    std::size_t tets = 0;
    std::size_t vertices = 0;
    std::vector<AxisRange> ranges; // one per active axis
    std::optional<TimeExtent> time;
};

/// Catalog entry for an in-memory complex.
CatalogEntry describe(const std::string& id, const Complex3& cx);

/// Latest-wins bookkeeping: starting a job for a client stops that client's previous job.
class JobRegistry {
public:
    std::stop_token begin(const std::string& client);

private:
    std::mutex mutex_;
    std::map<std::string, std::stop_source> running_;
};

/// Stateless request handlers over a read-only model catalog. Every handler returns a
/// JSON object; failures come back as {"request_id", "error": {"code", "message"}}.
class SliceService {
public:
    /// Loads every parseable *.hsl file in the model directory. Throws Error(Io) when
    /// the directory does not exist.
    explicit SliceService(ServiceConfig config);
    /// Serves the given models directly (id -> complex).
    SliceService(std::map<std::string, Complex3> models, ServiceConfig config = {});

    const std::vector<CatalogEntry>& list_models() const { return catalog_; }
    nlohmann::json models_json() const;

    nlohmann::json slice(const nlohmann::json& request, std::stop_token stop = {}) const;
    nlohmann::json sweep(const nlohmann::json& request, std::stop_token stop = {}) const;
    /// Sweep planes one frame at a time; `emit` returns false to stop early.
    void sweep_each(const nlohmann::json& request, std::stop_token stop,
                    const std::function<bool(const nlohmann::json&)>& emit) const;

    JobRegistry& jobs() const { return jobs_; }
    const ServiceConfig& config() const { return config_; }
    std::shared_ptr<const Complex3> model(const std::string& id) const;

private:
    void add_model(const std::string& id, Complex3 cx);

    ServiceConfig config_;
    std::map<std::string, std::shared_ptr<const Complex3>> models_;
    std::vector<CatalogEntry> catalog_;
    mutable JobRegistry jobs_;
};

/// HTTP status for a handler result (200 unless it carries an error).
int status_for(const nlohmann::json& result);

/// Splits a serialized payload into newline-delimited chunk records followed by a
/// checksum record, or returns a single element when it fits in `chunk_bytes`.
std::vector<std::string> chunk_payload(const std::string& body, std::size_t chunk_bytes);
/// Inverse of chunk_payload; verifies the checksum record. Throws Error(ParseError).
std::string reassemble_chunks(const std::string& ndjson);
std::uint64_t fnv1a64(std::string_view data);

/// HTTP front end: GET /models, POST /slice, POST /sweep, GET /live (server-sent events).
class HttpServer {
public:
    explicit HttpServer(const SliceService& service);
    ~HttpServer();
    HttpServer(const HttpServer&) = delete;
    HttpServer& operator=(const HttpServer&) = delete;

    /// Binds; port 0 picks a free port. Returns the bound port or -1.
    int bind(const std::string& host, int port);
    /// Blocks until stop().
    bool listen();
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace hyperslice

#pragma once

#include <chrono>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "metaweave/errors.hpp"

namespace metaweave::altclient {

struct InvalidDoi : InputError {
    explicit InvalidDoi(const std::string& doi)
        : InputError("'" + doi + "' is not a DOI (want 10.<registrant>/<suffix>)"), doi(doi) {}
    std::string doi;
};
struct CacheMiss : InputError {
    explicit CacheMiss(const std::string& doi)
        : InputError("no cached response for '" + doi + "' in cache-only mode"), doi(doi) {}
    std::string doi;
};
struct HttpError : NetworkError {
    explicit HttpError(int status)
        : NetworkError("metrics service returned HTTP " + std::to_string(status)),
          status(status) {}
    int status;
};
struct RateLimited : NetworkError {
    RateLimited() : NetworkError("metrics service kept rate limiting after retries") {}
};

enum class FetchMode { Live, CacheOnly };
enum class Status { Tracked, NotTracked };

struct Counts {
    double score = 0.0;
    int policy = 0;
    int patent = 0;

    bool operator==(const Counts&) const = default;
};

struct AltmetricRecord {
    std::string doi; // normalized
    Status status = Status::NotTracked;
    std::optional<Counts> counts; // present iff Tracked
    std::string fetched_at;       // ISO-8601 UTC
};

/// One HTTP round trip. Implementations may throw NetworkError.
class HttpTransport {
public:
    struct Response {
        int status = 0;
        std::string body;
    };
    virtual ~HttpTransport() = default;
    virtual Response get(const std::string& path) = 0;
};

/// Time source the client schedules against; injectable for tests.
class Clock {
public:
    virtual ~Clock() = default;
    virtual std::chrono::steady_clock::time_point now() = 0;
    virtual void sleep_until(std::chrono::steady_clock::time_point t) = 0;
    virtual std::string utc_now_iso8601() = 0;
};

std::unique_ptr<Clock> make_system_clock();

/// TLS transport against api.altmetric.com.
std::unique_ptr<HttpTransport> make_live_transport();

struct ClientOptions {
    std::filesystem::path cache_dir;
    double rate_limit_per_sec = 1.0;
    std::optional<std::string> api_key; // falls back to $ALTMETRIC_KEY
};

struct BatchItem {
    std::string doi; // as given, pre-normalization
    std::optional<AltmetricRecord> record;
    std::optional<std::string> error;
};

struct BatchResult {
    std::vector<BatchItem> items; // aligned with the input order
    int n_errors = 0;
};

/// Cached, rate-limited client. A cache hit is authoritative in both
/// modes; cache-only never touches the transport (which may be null).
class AltmetricClient {
public:
    AltmetricClient(ClientOptions options, HttpTransport* transport, Clock* clock);

    AltmetricRecord fetch_doi(const std::string& doi, FetchMode mode);
    BatchResult fetch_batch(const std::vector<std::string>& dois, FetchMode mode);

    static std::string cache_file_name(const std::string& normalized_doi);

private:
    AltmetricRecord fetch_normalized(const std::string& doi, FetchMode mode);
    std::optional<AltmetricRecord> cache_lookup(const std::string& doi) const;
    void cache_store(const AltmetricRecord& record);
    HttpTransport::Response request_with_backoff(const std::string& path);

    ClientOptions options_;
    HttpTransport* transport_;
    Clock* clock_;
    std::mutex mutex_;
    std::optional<std::chrono::steady_clock::time_point> last_request_;
};

/// Reads every cached record (for plotting without refetching).
std::vector<AltmetricRecord> load_cache(const std::filesystem::path& cache_dir);

} // namespace metaweave::altclient

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include "metaweave/altmetric.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <map>
#include <thread>

#include <json.hpp>

#include "metaweave/fsutil.hpp"
#include "metaweave/ingest.hpp"

namespace metaweave::altclient {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

bool valid_doi(const std::string& doi) {
    if (doi.rfind("10.", 0) != 0) return false;
    const std::size_t slash = doi.find('/');
    if (slash == std::string::npos) return false;
    if (slash <= 3) return false;             // empty registrant
    return slash + 1 < doi.size();            // non-empty suffix
}

AltmetricRecord record_from_cache_json(const json& entry, const std::string& path) {
    if (!entry.is_object() || !entry.contains("doi") || !entry.contains("status"))
        throw InputError("corrupt cache entry " + path);
    AltmetricRecord rec;
    rec.doi = entry.at("doi").get<std::string>();
    rec.fetched_at = entry.value("fetched_at", std::string());
    const std::string status = entry.at("status").get<std::string>();
    if (status == "tracked") {
        rec.status = Status::Tracked;
        Counts counts;
        counts.score = entry.value("score", 0.0);
        counts.policy = entry.value("cited_by_policies_count", 0);
        counts.patent = entry.value("cited_by_patents_count", 0);
        rec.counts = counts;
    } else if (status == "not_tracked") {
        rec.status = Status::NotTracked;
    } else {
        throw InputError("corrupt cache entry " + path);
    }
    return rec;
}

ordered_json cache_json_from_record(const AltmetricRecord& rec) {
    ordered_json entry;
    entry["doi"] = rec.doi;
    entry["status"] = rec.status == Status::Tracked ? "tracked" : "not_tracked";
    entry["fetched_at"] = rec.fetched_at;
    if (rec.counts) {
        entry["score"] = rec.counts->score;
        entry["cited_by_policies_count"] = rec.counts->policy;
        entry["cited_by_patents_count"] = rec.counts->patent;
    }
    return entry;
}

class SystemClock final : public Clock {
public:
    std::chrono::steady_clock::time_point now() override {
        return std::chrono::steady_clock::now();
    }
    void sleep_until(std::chrono::steady_clock::time_point t) override {
        std::this_thread::sleep_until(t);
    }
    std::string utc_now_iso8601() override {
        const std::time_t t = std::time(nullptr);
        std::tm tm{};
        gmtime_r(&t, &tm);
        char buf[80];
        std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ", tm.tm_year + 1900,
                      tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec);
        return buf;
    }
};

class LiveTransport final : public HttpTransport {
public:
    LiveTransport() : client_("https://api.altmetric.com") {
        client_.set_connection_timeout(10);
        client_.set_read_timeout(30);
        client_.set_follow_location(true);
    }
    Response get(const std::string& path) override {
        auto result = client_.Get(path);
        if (!result)
            throw NetworkError("request to api.altmetric.com failed: " +
                               httplib::to_string(result.error()));
        return Response{result->status, result->body};
    }

private:
    httplib::Client client_;
};

} // namespace

std::unique_ptr<Clock> make_system_clock() { return std::make_unique<SystemClock>(); }

std::unique_ptr<HttpTransport> make_live_transport() {
    return std::make_unique<LiveTransport>();
}

AltmetricClient::AltmetricClient(ClientOptions options, HttpTransport* transport, Clock* clock)
    : options_(std::move(options)), transport_(transport), clock_(clock) {
    if (!options_.api_key) {
        if (const char* key = std::getenv("ALTMETRIC_KEY")) options_.api_key = key;
    }
}

std::string AltmetricClient::cache_file_name(const std::string& normalized_doi) {
    return fsutil::fnv1a64_hex(normalized_doi) + ".json";
}

std::optional<AltmetricRecord> AltmetricClient::cache_lookup(const std::string& doi) const {
    const std::filesystem::path path = options_.cache_dir / cache_file_name(doi);
    if (!std::filesystem::exists(path)) return std::nullopt;
    json entry;
    try {
        entry = json::parse(fsutil::read_file(path));
    } catch (const json::parse_error&) {
        throw InputError("corrupt cache entry " + path.string());
    }
    return record_from_cache_json(entry, path.string());
}

void AltmetricClient::cache_store(const AltmetricRecord& record) {
    const std::string name = cache_file_name(record.doi);
    fsutil::write_file_atomic(options_.cache_dir / name,
                              cache_json_from_record(record).dump(2) + "\n");

    const std::filesystem::path index_path = options_.cache_dir / "index.json";
    json index = json::object();
    if (std::filesystem::exists(index_path)) {
        try {
            index = json::parse(fsutil::read_file(index_path));
        } catch (const json::parse_error&) {
            index = json::object(); // the index is derived data, rebuild as we go
        }
    }
    index[record.doi] = name;
    fsutil::write_file_atomic(index_path, index.dump(2) + "\n");
}

HttpTransport::Response AltmetricClient::request_with_backoff(const std::string& path) {
    using namespace std::chrono;
    const auto min_interval =
        duration_cast<steady_clock::duration>(duration<double>(1.0 / options_.rate_limit_per_sec));

    for (int attempt = 0;; ++attempt) {
        if (last_request_) {
            const auto target = *last_request_ + min_interval;
            if (clock_->now() < target) clock_->sleep_until(target);
        }
        last_request_ = clock_->now();
        const HttpTransport::Response response = transport_->get(path);
        if (response.status != 429) return response;
        if (attempt >= 3) throw RateLimited();
        clock_->sleep_until(clock_->now() + seconds(1LL << attempt));
    }
}

AltmetricRecord AltmetricClient::fetch_normalized(const std::string& doi, FetchMode mode) {
    if (auto cached = cache_lookup(doi)) return *cached;
    if (mode == FetchMode::CacheOnly) throw CacheMiss(doi);
    if (!transport_) throw NetworkError("live mode requested without a transport");

    std::lock_guard<std::mutex> lock(mutex_);
    std::string path = "/v1/doi/" + doi;
    if (options_.api_key) path += "?key=" + *options_.api_key;
    const HttpTransport::Response response = request_with_backoff(path);

    AltmetricRecord record;
    record.doi = doi;
    record.fetched_at = clock_->utc_now_iso8601();
    if (response.status == 200) {
        json body;
        try {
            body = json::parse(response.body);
        } catch (const json::parse_error&) {
            throw NetworkError("unparseable metrics response for " + doi);
        }
        record.status = Status::Tracked;
        Counts counts;
        counts.score = body.value("score", 0.0);
        counts.policy = body.value("cited_by_policies_count", 0);
        counts.patent = body.value("cited_by_patents_count", 0);
        record.counts = counts;
    } else if (response.status == 404) {
        record.status = Status::NotTracked;
    } else {
        throw HttpError(response.status);
    }
    cache_store(record);
    return record;
}

AltmetricRecord AltmetricClient::fetch_doi(const std::string& doi, FetchMode mode) {
    const std::string normalized = ingest::normalize_doi(doi);
    if (!valid_doi(normalized)) throw InvalidDoi(doi);
    return fetch_normalized(normalized, mode);
}

BatchResult AltmetricClient::fetch_batch(const std::vector<std::string>& dois, FetchMode mode) {
    BatchResult result;
    result.items.reserve(dois.size());

    struct Outcome {
        std::optional<AltmetricRecord> record;
        std::optional<std::string> error;
    };
    std::map<std::string, Outcome> by_doi; // one fetch per normalized DOI

    for (const std::string& raw : dois) {
        BatchItem item;
        item.doi = raw;
        const std::string normalized = ingest::normalize_doi(raw);
        if (!valid_doi(normalized)) {
            item.error = InvalidDoi(raw).what();
        } else {
            auto it = by_doi.find(normalized);
            if (it == by_doi.end()) {
                Outcome outcome;
                try {
                    outcome.record = fetch_normalized(normalized, mode);
                } catch (const std::exception& e) {
                    outcome.error = e.what();
                }
                it = by_doi.emplace(normalized, std::move(outcome)).first;
            }
            item.record = it->second.record;
            item.error = it->second.error;
        }
        if (item.error) ++result.n_errors;
        result.items.push_back(std::move(item));
    }
    return result;
}

std::vector<AltmetricRecord> load_cache(const std::filesystem::path& cache_dir) {
    std::vector<AltmetricRecord> records;
    if (!std::filesystem::exists(cache_dir)) return records;
    for (const auto& entry : std::filesystem::directory_iterator(cache_dir)) {
        if (!entry.is_regular_file()) continue;
        const std::string name = entry.path().filename().string();
        if (name == "index.json" || entry.path().extension() != ".json") continue;
        json parsed;
        try {
            parsed = json::parse(fsutil::read_file(entry.path()));
        } catch (const json::parse_error&) {
            throw InputError("corrupt cache entry " + entry.path().string());
        }
        records.push_back(record_from_cache_json(parsed, entry.path().string()));
    }
    std::sort(records.begin(), records.end(),
              [](const AltmetricRecord& a, const AltmetricRecord& b) { return a.doi < b.doi; });
    return records;
}

} // namespace metaweave::altclient

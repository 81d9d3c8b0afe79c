#pragma once

// Record harvesting from a local directory or a paged HTTP API, with a
// content-addressed raw cache and a resumable checkpoint.
//
// HTTP contract: GET {base_url}?page=P&per_page=N[&since=YYYY-MM-DD], pages
// numbered from 1. A page body is either a JSON array of items or an object
// {"items": [...], "next": url-or-null}. An empty page, or a null "next",
// ends the walk. An item is either a full record envelope (it has
// "payload") or a summary {"source_id", "submission_date", "suffix",
// "digest", "href"}; summaries whose digest is already cached are not
// fetched.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "kgforge/date.hpp"
#include "kgforge/error.hpp"
#include "kgforge/jsonld.hpp"

namespace kgforge {

enum class SourceMode { Directory, Http };

struct SourceConfig {
  SourceMode mode = SourceMode::Directory;
  std::string base_url;             // http mode
  std::filesystem::path directory = "records";  // directory mode
  std::size_t page_size = 100;
  std::optional<Date> since;
  double rate_limit = 5.0;  // requests per second
  int max_retries = 5;
  std::chrono::milliseconds backoff_initial{250};
  std::chrono::milliseconds backoff_max{8000};
  std::size_t parallel_fetches = 1;
  std::uint64_t jitter_seed = 0x5eed;

  // Throws kgforge::Error on an invalid combination.
  void check() const;
};

std::string_view source_mode_name(SourceMode m);
SourceMode parse_source_mode(std::string_view name);

struct CacheEntry {
  std::string source_id;
  Date submission_date;
  std::string suffix;
  std::string digest;  // sha-256 of the envelope bytes
  std::string path;    // relative to the cache directory
  std::string fetched_at;

  friend bool operator==(const CacheEntry&, const CacheEntry&) = default;
};

// Record identity used by the cache index and the checkpoint.
std::string record_key(std::string_view source_id, std::string_view suffix);

// Content-addressed store of record envelopes:
//   <dir>/<digest[0:2]>/<digest>.json and <dir>/index.json
// Safe to use from several threads.
class RecordCache {
 public:
  explicit RecordCache(std::filesystem::path dir);

  bool has_blob(const std::string& digest) const;
  // Stores the bytes (if new) and returns their digest.
  std::string put_blob(std::string_view bytes);
  // Reads a blob and verifies it against its digest; nullopt if missing or
  // corrupt.
  std::optional<std::string> read_blob(const std::string& digest) const;

  void record(const CacheEntry& entry);
  std::optional<CacheEntry> find(const std::string& key) const;
  // Index entries keyed by record_key, in key order.
  std::map<std::string, CacheEntry> entries() const;

  // Writes index.json. Throws IoError.
  void flush() const;

  const std::filesystem::path& dir() const noexcept { return dir_; }
  static std::string blob_path(const std::string& digest);

 private:
  std::filesystem::path dir_;
  mutable std::mutex mu_;
  std::map<std::string, CacheEntry> index_;
};

struct HttpResponse {
  int status = 0;  // 0 = no response (connection failure)
  std::string body;
  std::string error;
};

class Transport {
 public:
  virtual ~Transport() = default;
  // Must be safe to call from several threads.
  virtual HttpResponse get(const std::string& url) = 0;
};

// cpp-httplib backed transport (http and https).
std::unique_ptr<Transport> make_http_transport(std::chrono::seconds timeout = std::chrono::seconds(30));

class Clock {
 public:
  virtual ~Clock() = default;
  virtual std::chrono::nanoseconds now() = 0;
  virtual void sleep_for(std::chrono::nanoseconds d) = 0;
};

Clock& system_clock();

// Never lets more than max(1, floor(rate)) requests start within any
// one-second window; below one request per second, spaces requests 1/rate
// apart.
class RateLimiter {
 public:
  RateLimiter(double rate, Clock& clock);
  // Blocks until a request may start; returns its start time.
  std::chrono::nanoseconds acquire();

 private:
  double rate_;
  Clock& clock_;
  std::mutex mu_;
  std::vector<std::chrono::nanoseconds> recent_;
};

struct Checkpoint {
  std::string source;  // base_url or directory
  std::string since;
  bool completed = false;
  std::size_t page = 1;
  std::string next_url;  // set when the source links pages explicitly
  std::vector<std::string> yielded;  // record keys in yield order

  // Throws kgforge::Error if the text is not a checkpoint.
  static Checkpoint parse(std::string_view text);
  std::string dump() const;
};

class HarvestError : public Error {
 public:
  using Error::Error;
};

struct HarvestOptions {
  // Continue from the checkpoint file when it matches the configuration.
  bool resume = false;
  // Stop (as if interrupted) after yielding this many records.
  std::optional<std::size_t> stop_after;
};

struct HarvestResult {
  std::size_t yielded = 0;
  std::size_t cache_hits = 0;
  std::size_t fetched = 0;  // record bodies fetched from the source
  std::size_t page_requests = 0;
  std::size_t skipped = 0;   // malformed records
  std::size_t filtered = 0;  // older than `since`
  bool completed = false;
  bool resumed = false;
};

using RecordSink = std::function<void(const RawRecord&, const CacheEntry&)>;
using LogSink = std::function<void(std::string_view)>;

class Harvester {
 public:
  // `transport` and `clock` may be null in directory mode / to use the
  // system clock. They must outlive the harvester.
  Harvester(SourceConfig cfg, RecordCache& cache, std::filesystem::path checkpoint_file,
            Transport* transport = nullptr, Clock* clock = nullptr, LogSink log = {});

  // Yields each record at most once. Throws HarvestError when the source
  // stays unreachable after the retries; the checkpoint is saved first.
  HarvestResult run(const RecordSink& sink, const HarvestOptions& options = {});

 private:
  HttpResponse get_with_retry(const std::string& url, bool& gave_up);
  std::chrono::nanoseconds backoff(int attempt);
  void run_directory(const RecordSink& sink, Checkpoint& cp, HarvestResult& res,
                     const HarvestOptions& options);
  void run_http(const RecordSink& sink, Checkpoint& cp, HarvestResult& res,
                const HarvestOptions& options);
  // Returns false when `stop_after` was reached.
  bool emit(std::string_view bytes, bool network, const RecordSink& sink, Checkpoint& cp,
            HarvestResult& res, const HarvestOptions& options, std::set<std::string>& seen,
            std::string_view origin);
  void save(const Checkpoint& cp) const;
  void log(const std::string& message) const;

  SourceConfig cfg_;
  RecordCache& cache_;
  std::filesystem::path checkpoint_file_;
  Transport* transport_;
  Clock& clock_;
  LogSink log_;
  RateLimiter limiter_;
  std::mutex rng_mu_;
  std::mt19937_64 rng_;
};

// Every cached record, in record-key order. Corrupt blobs are skipped and
// reported through `log`.
std::vector<RawRecord> cached_records(const RecordCache& cache, const LogSink& log = {});

}  // namespace kgforge

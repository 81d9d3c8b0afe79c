#include "kgforge/harvester.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <iostream>
#include <regex>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "kgforge/digest.hpp"
#include "kgforge/io.hpp"

namespace kgforge {

namespace fs = std::filesystem;
using nlohmann::json;
using std::chrono::nanoseconds;

std::string_view source_mode_name(SourceMode m) {
  return m == SourceMode::Http ? "http" : "directory";
}

SourceMode parse_source_mode(std::string_view name) {
  if (name == "http") return SourceMode::Http;
  if (name == "directory") return SourceMode::Directory;
  throw Error("unknown source mode '" + std::string(name) + "'");
}

void SourceConfig::check() const {
  if (page_size < 1) throw Error("source.page_size must be at least 1");
  if (!(rate_limit > 0)) throw Error("source.rate_limit must be positive");
  if (max_retries < 0) throw Error("source.max_retries must not be negative");
  if (parallel_fetches < 1) throw Error("source.parallel_fetches must be at least 1");
  if (mode == SourceMode::Http) {
    if (!base_url.starts_with("http://") && !base_url.starts_with("https://")) {
      throw Error("source.base_url must be an http(s) URL");
    }
  } else if (directory.empty()) {
    throw Error("source.directory is required in directory mode");
  }
}

std::string record_key(std::string_view source_id, std::string_view suffix) {
  std::string key(source_id);
  key += '#';
  key += suffix;
  return key;
}

// RecordCache

RecordCache::RecordCache(fs::path dir) : dir_(std::move(dir)) {
  fs::path index = dir_ / "index.json";
  if (!fs::exists(index)) return;
  json doc = json::parse(read_file(index), nullptr, false);
  if (doc.is_discarded() || !doc.is_object() || !doc.contains("records")) {
    throw Error("corrupt cache index " + index.string());
  }
  try {
    for (const json& r : doc["records"]) {
      CacheEntry e;
      e.source_id = r.at("source_id").get<std::string>();
      e.submission_date = Date::parse(r.at("submission_date").get<std::string>());
      e.suffix = r.at("suffix").get<std::string>();
      e.digest = r.at("digest").get<std::string>();
      e.path = r.at("path").get<std::string>();
      e.fetched_at = r.at("fetched_at").get<std::string>();
      index_[record_key(e.source_id, e.suffix)] = std::move(e);
    }
  } catch (const json::exception& e) {
    throw Error("corrupt cache index " + index.string() + ": " + e.what());
  }
}

std::string RecordCache::blob_path(const std::string& digest) {
  return digest.substr(0, 2) + "/" + digest + ".json";
}

bool RecordCache::has_blob(const std::string& digest) const {
  return fs::exists(dir_ / blob_path(digest));
}

std::string RecordCache::put_blob(std::string_view bytes) {
  std::string digest = sha256_hex(bytes);
  std::lock_guard lock(mu_);
  if (!read_blob(digest)) write_file_atomic(dir_ / blob_path(digest), bytes);
  return digest;
}

std::optional<std::string> RecordCache::read_blob(const std::string& digest) const {
  fs::path p = dir_ / blob_path(digest);
  if (!fs::exists(p)) return std::nullopt;
  std::string bytes = read_file(p);
  if (sha256_hex(bytes) != digest) return std::nullopt;
  return bytes;
}

void RecordCache::record(const CacheEntry& entry) {
  std::lock_guard lock(mu_);
  index_[record_key(entry.source_id, entry.suffix)] = entry;
}

std::optional<CacheEntry> RecordCache::find(const std::string& key) const {
  std::lock_guard lock(mu_);
  auto it = index_.find(key);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::map<std::string, CacheEntry> RecordCache::entries() const {
  std::lock_guard lock(mu_);
  return index_;
}

void RecordCache::flush() const {
  json records = json::array();
  {
    std::lock_guard lock(mu_);
    for (const auto& [key, e] : index_) {
      records.push_back({{"source_id", e.source_id},
                         {"submission_date", e.submission_date.str()},
                         {"suffix", e.suffix},
                         {"digest", e.digest},
                         {"path", e.path},
                         {"fetched_at", e.fetched_at}});
    }
  }
  json doc = {{"format", 1}, {"records", std::move(records)}};
  write_file_atomic(dir_ / "index.json", doc.dump(2) + "\n");
}

std::vector<RawRecord> cached_records(const RecordCache& cache, const LogSink& log) {
  std::vector<RawRecord> out;
  for (const auto& [key, e] : cache.entries()) {
    auto bytes = cache.read_blob(e.digest);
    if (!bytes) {
      if (log) log("cache blob for " + key + " is missing or corrupt; skipped");
      continue;
    }
    try {
      RawRecord r = parse_record_envelope(*bytes);
      r.fetched_at = e.fetched_at;
      out.push_back(std::move(r));
    } catch (const Error& err) {
      if (log) log("cached record " + key + " is malformed: " + err.what());
    }
  }
  return out;
}

// Transport

namespace {

class HttplibTransport : public Transport {
 public:
  explicit HttplibTransport(std::chrono::seconds timeout) : timeout_(timeout) {}

  HttpResponse get(const std::string& url) override {
    static const std::regex split(R"(^(https?://[^/?#]+)([^#]*))");
    std::smatch m;
    if (!std::regex_search(url, m, split)) return {0, {}, "malformed URL " + url};
    std::string path = m[2].str().empty() ? "/" : m[2].str();
    httplib::Client client(m[1].str());
    client.set_connection_timeout(timeout_);
    client.set_read_timeout(timeout_);
    client.set_follow_location(true);
    auto res = client.Get(path);
    if (!res) return {0, {}, httplib::to_string(res.error())};
    return {res->status, res->body, {}};
  }

 private:
  std::chrono::seconds timeout_;
};

class SystemClock : public Clock {
 public:
  nanoseconds now() override {
    return std::chrono::duration_cast<nanoseconds>(
        std::chrono::steady_clock::now().time_since_epoch());
  }
  void sleep_for(nanoseconds d) override {
    if (d.count() > 0) std::this_thread::sleep_for(d);
  }
};

}  // namespace

std::unique_ptr<Transport> make_http_transport(std::chrono::seconds timeout) {
  return std::make_unique<HttplibTransport>(timeout);
}

Clock& system_clock() {
  static SystemClock clock;
  return clock;
}

// RateLimiter

RateLimiter::RateLimiter(double rate, Clock& clock) : rate_(rate), clock_(clock) {}

nanoseconds RateLimiter::acquire() {
  std::lock_guard lock(mu_);
  constexpr nanoseconds kWindow = std::chrono::seconds(1);
  nanoseconds now = clock_.now();
  if (rate_ < 1.0) {
    auto spacing = nanoseconds(static_cast<std::int64_t>(std::ceil(1e9 / rate_)));
    if (!recent_.empty() && now < recent_.back() + spacing) {
      clock_.sleep_for(recent_.back() + spacing - now);
      now = clock_.now();
    }
    recent_.assign(1, now);
    return now;
  }
  std::size_t capacity = static_cast<std::size_t>(std::floor(rate_));
  while (true) {
    std::erase_if(recent_, [&](nanoseconds t) { return t + kWindow <= now; });
    if (recent_.size() < capacity) break;
    clock_.sleep_for(recent_.front() + kWindow - now);
    now = clock_.now();
  }
  recent_.push_back(now);
  return now;
}

// Checkpoint

Checkpoint Checkpoint::parse(std::string_view text) {
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) throw Error("checkpoint is not a JSON object");
  try {
    Checkpoint cp;
    cp.source = doc.at("source").get<std::string>();
    cp.since = doc.at("since").get<std::string>();
    cp.completed = doc.at("completed").get<bool>();
    cp.page = doc.at("page").get<std::size_t>();
    cp.next_url = doc.at("next_url").get<std::string>();
    cp.yielded = doc.at("yielded").get<std::vector<std::string>>();
    return cp;
  } catch (const json::exception& e) {
    throw Error(std::string("malformed checkpoint: ") + e.what());
  }
}

std::string Checkpoint::dump() const {
  json doc = {{"source", source},     {"since", since},       {"completed", completed},
              {"page", page},         {"next_url", next_url}, {"yielded", yielded}};
  return doc.dump(2) + "\n";
}

// Harvester

Harvester::Harvester(SourceConfig cfg, RecordCache& cache, fs::path checkpoint_file,
                     Transport* transport, Clock* clock, LogSink log)
    : cfg_(std::move(cfg)),
      cache_(cache),
      checkpoint_file_(std::move(checkpoint_file)),
      transport_(transport),
      clock_(clock != nullptr ? *clock : system_clock()),
      log_(std::move(log)),
      limiter_(cfg_.rate_limit, clock_),
      rng_(cfg_.jitter_seed) {
  cfg_.check();
  if (cfg_.mode == SourceMode::Http && transport_ == nullptr) {
    throw Error("http mode needs a transport");
  }
}

void Harvester::log(const std::string& message) const {
  if (log_) {
    log_(message);
  } else {
    std::cerr << "harvest: " << message << "\n";
  }
}

void Harvester::save(const Checkpoint& cp) const {
  write_file_atomic(checkpoint_file_, cp.dump());
}

HarvestResult Harvester::run(const RecordSink& sink, const HarvestOptions& options) {
  HarvestResult res;
  Checkpoint cp;
  cp.source = cfg_.mode == SourceMode::Http ? cfg_.base_url : cfg_.directory.string();
  cp.since = cfg_.since ? cfg_.since->str() : std::string();

  if (options.resume && fs::exists(checkpoint_file_)) {
    try {
      Checkpoint saved = Checkpoint::parse(read_file(checkpoint_file_));
      if (saved.source != cp.source || saved.since != cp.since) {
        log("checkpoint belongs to another source or since-date; starting a full run");
      } else {
        cp = std::move(saved);
        res.resumed = true;
      }
    } catch (const Error& e) {
      log(std::string("corrupt checkpoint (") + e.what() + "); starting a full run");
    }
  }
  if (cp.completed) {
    res.completed = true;
    return res;
  }

  if (cfg_.mode == SourceMode::Directory) {
    run_directory(sink, cp, res, options);
  } else {
    run_http(sink, cp, res, options);
  }
  cache_.flush();
  save(cp);
  res.completed = cp.completed;
  return res;
}

bool Harvester::emit(std::string_view bytes, bool network, const RecordSink& sink,
                     Checkpoint& cp, HarvestResult& res, const HarvestOptions& options,
                     std::set<std::string>& seen, std::string_view origin) {
  RawRecord record;
  try {
    record = parse_record_envelope(bytes);
  } catch (const Error& e) {
    ++res.skipped;
    log("skipping malformed record " + std::string(origin) + ": " + e.what());
    return true;
  }
  if (cfg_.since && record.submission_date < *cfg_.since) {
    ++res.filtered;
    return true;
  }
  std::string key = record_key(record.source_id, record.suffix);
  if (!seen.insert(key).second) {
    if (!res.resumed) log("record " + key + " appears twice; yielded once");
    return true;
  }

  std::string digest = sha256_hex(bytes);
  bool hit = !network && cache_.has_blob(digest);
  if (!hit) cache_.put_blob(bytes);
  if (hit) {
    ++res.cache_hits;
  } else {
    ++res.fetched;
  }

  CacheEntry entry;
  entry.source_id = record.source_id;
  entry.submission_date = record.submission_date;
  entry.suffix = record.suffix;
  entry.digest = digest;
  entry.path = RecordCache::blob_path(digest);
  auto previous = cache_.find(key);
  entry.fetched_at = previous && previous->digest == digest ? previous->fetched_at : utc_timestamp();
  cache_.record(entry);
  record.fetched_at = entry.fetched_at;

  sink(record, entry);
  ++res.yielded;
  cp.yielded.push_back(key);
  save(cp);
  return !(options.stop_after && res.yielded >= *options.stop_after);
}

void Harvester::run_directory(const RecordSink& sink, Checkpoint& cp, HarvestResult& res,
                              const HarvestOptions& options) {
  if (!fs::is_directory(cfg_.directory)) {
    throw HarvestError("source directory " + cfg_.directory.string() + " not found");
  }
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(cfg_.directory)) {
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());

  std::set<std::string> seen(cp.yielded.begin(), cp.yielded.end());
  for (const fs::path& f : files) {
    std::string bytes;
    try {
      bytes = read_file(f);
    } catch (const IoError& e) {
      ++res.skipped;
      log(std::string(e.what()) + "; skipped");
      continue;
    }
    if (!emit(bytes, false, sink, cp, res, options, seen, f.filename().string())) return;
  }
  cp.completed = true;
}

nanoseconds Harvester::backoff(int attempt) {
  double base = static_cast<double>(
      std::chrono::duration_cast<nanoseconds>(cfg_.backoff_initial).count());
  double cap = static_cast<double>(
      std::chrono::duration_cast<nanoseconds>(cfg_.backoff_max).count());
  double d = std::min(cap, base * std::pow(2.0, attempt));
  double jitter;
  {
    std::lock_guard lock(rng_mu_);
    jitter = std::uniform_real_distribution<double>(0.5, 1.0)(rng_);
  }
  return nanoseconds(static_cast<std::int64_t>(d * jitter));
}

HttpResponse Harvester::get_with_retry(const std::string& url, bool& gave_up) {
  gave_up = false;
  for (int attempt = 0;; ++attempt) {
    limiter_.acquire();
    HttpResponse r = transport_->get(url);
    bool transient = r.status == 0 || r.status == 429 || r.status >= 500;
    if (!transient) return r;
    if (attempt >= cfg_.max_retries) {
      gave_up = true;
      return r;
    }
    log("GET " + url + " failed (" +
        (r.status == 0 ? r.error : "HTTP " + std::to_string(r.status)) + "); retrying");
    clock_.sleep_for(backoff(attempt));
  }
}

namespace {

std::string page_url(const SourceConfig& cfg, std::size_t page) {
  std::string url = cfg.base_url;
  url += url.find('?') == std::string::npos ? '?' : '&';
  url += "page=" + std::to_string(page) + "&per_page=" + std::to_string(cfg.page_size);
  if (cfg.since) url += "&since=" + cfg.since->str();
  return url;
}

std::string resolve_href(const std::string& base, const std::string& href) {
  if (href.starts_with("http://") || href.starts_with("https://")) return href;
  static const std::regex origin(R"(^(https?://[^/?#]+))");
  std::smatch m;
  std::regex_search(base, m, origin);
  if (href.starts_with("/")) return m[1].str() + href;
  std::string dir = base.substr(0, base.find('?'));
  dir = dir.substr(0, dir.rfind('/') + 1);
  if (dir.size() <= m[1].str().size()) dir = m[1].str() + "/";
  return dir + href;
}

}  // namespace

void Harvester::run_http(const RecordSink& sink, Checkpoint& cp, HarvestResult& res,
                         const HarvestOptions& options) {
  std::set<std::string> seen(cp.yielded.begin(), cp.yielded.end());
  constexpr std::size_t kMaxPages = 1000000;

  for (std::size_t guard = 0; guard < kMaxPages; ++guard) {
    std::string url = cp.next_url.empty() ? page_url(cfg_, cp.page) : cp.next_url;
    bool gave_up = false;
    ++res.page_requests;
    HttpResponse r = get_with_retry(url, gave_up);
    if (gave_up) {
      save(cp);
      cache_.flush();
      throw HarvestError("source unreachable at " + url + " after " +
                         std::to_string(cfg_.max_retries) + " retries; checkpoint saved");
    }
    if (r.status != 200) {
      save(cp);
      cache_.flush();
      throw HarvestError("GET " + url + " returned HTTP " + std::to_string(r.status));
    }
    json body = json::parse(r.body, nullptr, false);
    json items;
    std::optional<std::string> next;
    bool linked = false;
    if (body.is_array()) {
      items = body;
    } else if (body.is_object() && body.contains("items") && body["items"].is_array()) {
      items = body["items"];
      if (body.contains("next")) {
        linked = true;
        if (body["next"].is_string()) next = resolve_href(url, body["next"].get<std::string>());
      }
    } else {
      save(cp);
      throw HarvestError("page " + url + " is not a JSON array or {items, next} object");
    }
    if (items.empty()) break;

    // Items whose body must be fetched, fetched with bounded parallelism.
    std::vector<std::optional<std::string>> bodies(items.size());
    std::vector<std::size_t> to_fetch;
    for (std::size_t i = 0; i < items.size(); ++i) {
      const json& item = items[i];
      if (!item.is_object() || item.contains("payload")) continue;
      std::string key = record_key(item.value("source_id", ""), item.value("suffix", ""));
      if (seen.contains(key)) continue;
      std::string digest = item.value("digest", "");
      if (!digest.empty()) {
        if (auto cached = cache_.read_blob(digest)) {
          bodies[i] = std::move(cached);
          continue;
        }
      }
      if (item.contains("href") && item["href"].is_string()) to_fetch.push_back(i);
    }
    std::vector<bool> fetched_now(items.size(), false);
    for (std::size_t start = 0; start < to_fetch.size(); start += cfg_.parallel_fetches) {
      std::size_t end = std::min(to_fetch.size(), start + cfg_.parallel_fetches);
      std::vector<std::future<std::pair<HttpResponse, bool>>> batch;
      for (std::size_t k = start; k < end; ++k) {
        std::string href = resolve_href(url, items[to_fetch[k]]["href"].get<std::string>());
        batch.push_back(std::async(std::launch::async, [this, href] {
          bool failed = false;
          HttpResponse resp = get_with_retry(href, failed);
          return std::make_pair(std::move(resp), failed);
        }));
      }
      for (std::size_t k = start; k < end; ++k) {
        auto [resp, failed] = batch[k - start].get();
        std::size_t i = to_fetch[k];
        if (failed) {
          for (std::size_t rest = k + 1; rest < end; ++rest) batch[rest - start].wait();
          save(cp);
          cache_.flush();
          throw HarvestError("record " + items[i]["href"].get<std::string>() +
                             " unreachable after " + std::to_string(cfg_.max_retries) +
                             " retries; checkpoint saved");
        }
        if (resp.status != 200) {
          ++res.skipped;
          log("record " + items[i]["href"].get<std::string>() + " returned HTTP " +
              std::to_string(resp.status) + "; skipped");
          continue;
        }
        bodies[i] = std::move(resp.body);
        fetched_now[i] = true;
      }
    }

    for (std::size_t i = 0; i < items.size(); ++i) {
      const json& item = items[i];
      std::string origin = url + " item " + std::to_string(i);
      if (item.is_object() && item.contains("payload")) {
        if (!emit(item.dump(), false, sink, cp, res, options, seen, origin)) return;
      } else if (bodies[i]) {
        if (!emit(*bodies[i], fetched_now[i], sink, cp, res, options, seen, origin)) return;
      } else if (!item.is_object() || !item.contains("href")) {
        ++res.skipped;
        log("skipping malformed item " + origin);
      }
    }

    if (linked && !next) break;
    if (next) {
      cp.next_url = *next;
    } else {
      ++cp.page;
    }
    save(cp);
  }
  cp.completed = true;
}

}  // namespace kgforge

#pragma once

// Spoken feedback: screen-region localisation, the offline phrase catalog,
// a cooldown scheduler and a non-blocking playback queue.

#include <array>
#include <cctype>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <cstdlib>
#include <deque>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <stop_token>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

#include "yolo_assist/error.hpp"
#include "yolo_assist/postprocess.hpp"

namespace yolo_assist {

enum class Region { center, left, right, top, bottom };

inline constexpr std::array<Region, 5> kAllRegions{Region::center, Region::left, Region::right,
                                                   Region::top, Region::bottom};

inline std::string_view to_string(Region r) {
  switch (r) {
    case Region::center: return "center";
    case Region::left: return "left";
    case Region::right: return "right";
    case Region::top: return "top";
    case Region::bottom: return "bottom";
  }
  return "?";
}

inline Region parse_region(std::string_view text) {
  for (Region r : kAllRegions) {
    if (to_string(r) == text) return r;
  }
  throw FormatError("unknown region '" + std::string(text) + "'");
}

// Thirds grid: the middle cell is "center"; elsewhere the axis with the
// larger offset from the middle picks the side, horizontal on ties.
// Offsets closer than 1e-9 count as equal.
inline Region region_of_point(double u, double v) {
  constexpr double kEps = 1e-9;
  const bool mid_u = u >= 1.0 / 3.0 - kEps && u <= 2.0 / 3.0 + kEps;
  const bool mid_v = v >= 1.0 / 3.0 - kEps && v <= 2.0 / 3.0 + kEps;
  if (mid_u && mid_v) return Region::center;
  const double du = std::fabs(u - 0.5);
  const double dv = std::fabs(v - 0.5);
  if (du + kEps >= dv) return u < 0.5 ? Region::left : Region::right;
  return v < 0.5 ? Region::top : Region::bottom;
}

inline Region region_of(const BBox& box, int frame_width, int frame_height) {
  if (frame_width < 1 || frame_height < 1) {
    throw UsageError("frame dims must be positive");
  }
  const double u = std::clamp(static_cast<double>(box.center_x()) / frame_width, 0.0, 1.0);
  const double v = std::clamp(static_cast<double>(box.center_y()) / frame_height, 0.0, 1.0);
  return region_of_point(u, v);
}

// ---------------------------------------------------------------------------
// Phrase catalog

inline std::string slugify(std::string_view name) {
  std::string out;
  for (unsigned char c : name) {
    out += std::isalnum(c) ? static_cast<char>(std::tolower(c)) : '_';
  }
  return out;
}

inline std::string phrase_text(std::string_view class_name, Region region) {
  if (region == Region::center) return std::string(class_name) + " ahead";
  return std::string(class_name) + " at " + std::string(to_string(region));
}

struct PhraseEntry {
  std::string class_name;
  Region region = Region::center;
  std::string phrase;
  std::string asset_id;
  std::string asset_file;
  friend bool operator==(const PhraseEntry&, const PhraseEntry&) = default;
};

class PhraseCatalog {
 public:
  PhraseCatalog() = default;

  // Entries must cover classes x regions exactly, with unique asset names.
  explicit PhraseCatalog(std::vector<PhraseEntry> entries) : entries_(std::move(entries)) {
    std::set<std::string> assets;
    for (std::size_t i = 0; i < entries_.size(); ++i) {
      const auto& e = entries_[i];
      if (!index_.emplace(std::make_pair(e.class_name, e.region), i).second) {
        throw FormatError("duplicate catalog entry for '" + e.class_name + "' at " +
                          std::string(to_string(e.region)));
      }
      if (!assets.insert(e.asset_file).second) {
        throw FormatError("duplicate asset file '" + e.asset_file + "'");
      }
      if (std::find(classes_.begin(), classes_.end(), e.class_name) == classes_.end()) {
        classes_.push_back(e.class_name);
      }
    }
    for (const auto& c : classes_) {
      for (Region r : kAllRegions) {
        if (!index_.contains({c, r})) {
          throw FormatError("catalog lacks '" + c + "' at " + std::string(to_string(r)));
        }
      }
    }
  }

  [[nodiscard]] const std::vector<PhraseEntry>& entries() const { return entries_; }
  [[nodiscard]] const std::vector<std::string>& classes() const { return classes_; }
  [[nodiscard]] bool contains(const std::string& class_name) const {
    return index_.contains({class_name, Region::center});
  }

  [[nodiscard]] const PhraseEntry& lookup(const std::string& class_name, Region region) const {
    auto it = index_.find({class_name, region});
    if (it == index_.end()) throw FormatError("unknown class '" + class_name + "'");
    return entries_[it->second];
  }

  friend bool operator==(const PhraseCatalog& a, const PhraseCatalog& b) {
    return a.entries_ == b.entries_;
  }

 private:
  std::vector<PhraseEntry> entries_;
  std::vector<std::string> classes_;
  std::map<std::pair<std::string, Region>, std::size_t> index_;
};

inline PhraseCatalog build_phrase_catalog(std::span<const std::string> class_names,
                                          const std::string& extension = "mp3") {
  if (class_names.empty()) throw UsageError("phrase catalog needs at least one class");
  std::set<std::string> seen;
  std::vector<PhraseEntry> entries;
  for (const auto& name : class_names) {
    if (!seen.insert(name).second) throw FormatError("duplicate class name '" + name + "'");
    for (Region r : kAllRegions) {
      const std::string id = slugify(name) + "_" + std::string(to_string(r));
      entries.push_back({name, r, phrase_text(name, r), id, id + "." + extension});
    }
  }
  return PhraseCatalog(std::move(entries));
}

inline nlohmann::ordered_json manifest_json(const PhraseCatalog& catalog) {
  auto out = nlohmann::ordered_json::array();
  for (const auto& e : catalog.entries()) {
    out.push_back({{"class", e.class_name},
                   {"region", std::string(to_string(e.region))},
                   {"phrase", e.phrase},
                   {"asset_file", e.asset_file}});
  }
  return out;
}

inline PhraseCatalog catalog_from_manifest(const nlohmann::json& manifest) {
  if (!manifest.is_array()) throw FormatError("manifest must be a JSON array");
  std::vector<PhraseEntry> entries;
  try {
    for (const auto& item : manifest) {
      PhraseEntry e;
      e.class_name = item.at("class").get<std::string>();
      e.region = parse_region(item.at("region").get<std::string>());
      e.phrase = item.at("phrase").get<std::string>();
      e.asset_file = item.at("asset_file").get<std::string>();
      const auto dot = e.asset_file.rfind('.');
      e.asset_id = dot == std::string::npos ? e.asset_file : e.asset_file.substr(0, dot);
      entries.push_back(std::move(e));
    }
  } catch (const nlohmann::json::exception& ex) {
    throw FormatError(std::string("malformed manifest: ") + ex.what());
  }
  return PhraseCatalog(std::move(entries));
}

// ---------------------------------------------------------------------------
// Scheduling and playback

struct Announcement {
  std::string class_name;
  Region region = Region::center;
  std::string phrase;
  std::string asset_id;
  std::string asset_file;
  double timestamp = 0.0;  // seconds on the caller's monotonic clock
  friend bool operator==(const Announcement&, const Announcement&) = default;
};

inline Announcement phrase_for(const std::string& class_name, Region region,
                               const PhraseCatalog& catalog, double timestamp = 0.0) {
  const PhraseEntry& e = catalog.lookup(class_name, region);
  return {e.class_name, e.region, e.phrase, e.asset_id, e.asset_file, timestamp};
}

inline std::string log_line(const Announcement& a) {
  nlohmann::ordered_json j{{"t", std::round(a.timestamp * 1000.0) / 1000.0},
                           {"class", a.class_name},
                           {"region", std::string(to_string(a.region))},
                           {"phrase", a.phrase}};
  return j.dump();
}

// Bounded FIFO shared by the detection thread and the playback thread.
// push never waits: when full, the oldest pending item is discarded.
class AnnouncementQueue {
 public:
  explicit AnnouncementQueue(std::size_t capacity = 4) : capacity_(capacity) {
    if (capacity_ == 0) throw UsageError("queue capacity must be >= 1");
  }

  // Returns true when an older announcement had to be dropped.
  bool push(Announcement a) {
    bool dropped = false;
    {
      std::lock_guard lock(mutex_);
      if (items_.size() >= capacity_) {
        items_.pop_front();
        ++dropped_;
        dropped = true;
      }
      items_.push_back(std::move(a));
    }
    ready_.notify_one();
    return dropped;
  }

  std::optional<Announcement> try_pop() {
    std::lock_guard lock(mutex_);
    if (items_.empty()) return std::nullopt;
    Announcement a = std::move(items_.front());
    items_.pop_front();
    return a;
  }

  // Blocks until an item arrives or stop is requested.
  std::optional<Announcement> pop_wait(std::stop_token stop) {
    std::unique_lock lock(mutex_);
    if (!ready_.wait(lock, stop, [&] { return !items_.empty(); })) return std::nullopt;
    Announcement a = std::move(items_.front());
    items_.pop_front();
    return a;
  }

  [[nodiscard]] std::size_t size() const {
    std::lock_guard lock(mutex_);
    return items_.size();
  }
  [[nodiscard]] std::size_t dropped() const {
    std::lock_guard lock(mutex_);
    return dropped_;
  }
  [[nodiscard]] std::size_t capacity() const { return capacity_; }

 private:
  const std::size_t capacity_;
  mutable std::mutex mutex_;
  std::condition_variable_any ready_;
  std::deque<Announcement> items_;
  std::size_t dropped_ = 0;
};

struct SchedulerConfig {
  double cooldown_seconds = 3.0;
  int max_per_frame = 2;
  std::size_t queue_capacity = 4;
};

// Picks which detections of a frame get announced. Owned by the detection
// thread; not thread-safe.
class FeedbackScheduler {
 public:
  FeedbackScheduler(PhraseCatalog catalog, SchedulerConfig config = {})
      : catalog_(std::move(catalog)), config_(config) {
    if (config_.max_per_frame < 0) throw UsageError("max_per_frame must be >= 0");
    if (config_.cooldown_seconds < 0) throw UsageError("cooldown must be >= 0");
  }

  [[nodiscard]] const SchedulerConfig& config() const { return config_; }
  [[nodiscard]] const PhraseCatalog& catalog() const { return catalog_; }

  // Detections are visited by descending confidence. A (class, region) pair
  // announced less than `cooldown` ago is skipped, as is a repeat within the
  // frame. Classes missing from the catalog are ignored.
  std::vector<Announcement> schedule(std::span<const Detection> detections, int frame_width,
                                     int frame_height, double now) {
    std::vector<Announcement> emitted;
    for (std::size_t idx : confidence_order(detections)) {
      if (static_cast<int>(emitted.size()) >= config_.max_per_frame) break;
      const Detection& d = detections[idx];
      if (!catalog_.contains(d.class_name)) continue;
      const Region region = region_of(d.box, frame_width, frame_height);
      const auto key = std::make_pair(d.class_name, region);
      auto it = last_.find(key);
      if (it != last_.end() && now - it->second < config_.cooldown_seconds) continue;
      last_[key] = now;
      emitted.push_back(phrase_for(d.class_name, region, catalog_, now));
    }
    return emitted;
  }

 private:
  PhraseCatalog catalog_;
  SchedulerConfig config_;
  std::map<std::pair<std::string, Region>, double> last_;
};

class AudioSink {
 public:
  virtual ~AudioSink() = default;
  virtual void play(const Announcement& a) = 0;
};

// Records what was played; optionally sleeps to imitate playback time.
class RecordingSink final : public AudioSink {
 public:
  explicit RecordingSink(std::chrono::milliseconds play_time = std::chrono::milliseconds(0))
      : play_time_(play_time) {}

  void play(const Announcement& a) override {
    if (play_time_.count() > 0) std::this_thread::sleep_for(play_time_);
    std::lock_guard lock(mutex_);
    played_.push_back(a);
  }
  [[nodiscard]] std::vector<Announcement> played() const {
    std::lock_guard lock(mutex_);
    return played_;
  }

 private:
  std::chrono::milliseconds play_time_;
  mutable std::mutex mutex_;
  std::vector<Announcement> played_;
};

// Hands each asset file to an external player command.
class CommandSink final : public AudioSink {
 public:
  CommandSink(std::string player, std::string asset_dir)
      : player_(std::move(player)), asset_dir_(std::move(asset_dir)) {}

  void play(const Announcement& a) override {
    std::string path = asset_dir_.empty() ? a.asset_file : asset_dir_ + "/" + a.asset_file;
    std::string quoted = "'";
    for (char c : path) {
      if (c == '\'') {
        quoted += "'\\''";
      } else {
        quoted += c;
      }
    }
    quoted += "'";
    const std::string cmd = player_ + " " + quoted + " >/dev/null 2>&1";
    [[maybe_unused]] const int rc = std::system(cmd.c_str());
  }

 private:
  std::string player_;
  std::string asset_dir_;
};

// Drains the queue into a sink on its own thread.
class PlaybackWorker {
 public:
  PlaybackWorker(AnnouncementQueue& queue, AudioSink& sink)
      : thread_([&queue, &sink](std::stop_token stop) {
          while (auto a = queue.pop_wait(stop)) sink.play(*a);
        }) {}

  void stop() {
    thread_.request_stop();
    if (thread_.joinable()) thread_.join();
  }

 private:
  std::jthread thread_;
};

// Scheduler + queue + optional playback thread + announcement log. The log
// records every emitted announcement at enqueue time, so it does not depend
// on playback speed.
class FeedbackPipeline {
 public:
  FeedbackPipeline(PhraseCatalog catalog, SchedulerConfig config, std::ostream* log = nullptr,
                   AudioSink* sink = nullptr)
      : scheduler_(std::move(catalog), config), queue_(config.queue_capacity), log_(log) {
    if (sink != nullptr) worker_.emplace(queue_, *sink);
  }
  ~FeedbackPipeline() { stop(); }

  FeedbackPipeline(const FeedbackPipeline&) = delete;
  FeedbackPipeline& operator=(const FeedbackPipeline&) = delete;

  std::vector<Announcement> on_frame(std::span<const Detection> detections, int frame_width,
                                     int frame_height, double now) {
    auto emitted = scheduler_.schedule(detections, frame_width, frame_height, now);
    for (const auto& a : emitted) {
      if (log_ != nullptr) *log_ << log_line(a) << '\n';
      queue_.push(a);
    }
    emitted_ += emitted.size();
    return emitted;
  }

  void stop() {
    if (worker_) worker_->stop();
  }

  [[nodiscard]] std::size_t emitted() const { return emitted_; }
  [[nodiscard]] std::size_t dropped() const { return queue_.dropped(); }
  [[nodiscard]] AnnouncementQueue& queue() { return queue_; }

 private:
  FeedbackScheduler scheduler_;
  AnnouncementQueue queue_;
  std::ostream* log_;
  std::optional<PlaybackWorker> worker_;
  std::size_t emitted_ = 0;
};

}  // namespace yolo_assist

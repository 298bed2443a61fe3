#pragma once

#include <cstdint>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "ranharness/metrics/point.hpp"

namespace ranharness::metrics {

enum class Aggregation { raw, mean, max, min, count };

struct Query {
  std::string measurement;
  Tags tag_filter;
  std::uint64_t from_slot = 0;
  std::uint64_t to_slot = UINT64_MAX;
  Aggregation agg = Aggregation::raw;
  /// Bucket width in slots; required iff agg != raw.
  std::optional<std::uint64_t> window;
};

/// Time-series store keyed by (measurement, tags). Writes within one
/// (series, field) must have strictly increasing slots. Readers see a
/// point-in-time snapshot.
class MetricsStore {
 public:
  MetricsStore() = default;
  MetricsStore(const MetricsStore& other);
  MetricsStore& operator=(const MetricsStore& other);

  /// Inserts every field of p. Returns the number of samples accepted;
  /// samples that would break slot ordering are rejected.
  std::size_t insert(const MetricPoint& p);

  /// Throws std::invalid_argument for a malformed range or window.
  std::vector<Series> query(const Query& q) const;

  /// Every series, ordered by measurement then tag set.
  std::vector<Series> snapshot() const;

  std::size_t sample_count() const;
  std::size_t rejected_count() const;
  bool empty() const { return sample_count() == 0; }

  bool operator==(const MetricsStore& other) const;

 private:
  struct Key {
    std::string measurement;
    Tags tags;
    bool operator<(const Key& o) const {
      if (measurement != o.measurement) return measurement < o.measurement;
      return tags < o.tags;
    }
  };

  mutable std::shared_mutex mutex_;
  std::map<Key, std::map<std::string, std::vector<Sample>>> series_;
  std::size_t samples_ = 0;
  std::size_t rejected_ = 0;
};

/// Synchronous writer that tags points with a component and inserts them
/// straight into a store. Used where no collector thread is wanted.
class StoreWriter final : public PointWriter {
 public:
  StoreWriter(MetricsStore& store, std::string component)
      : store_(store), component_(std::move(component)) {}
  void write(MetricPoint p) override;

 private:
  MetricsStore& store_;
  std::string component_;
};

std::string to_string(Aggregation a);
std::optional<Aggregation> parse_aggregation(const std::string& s);

}  // namespace ranharness::metrics

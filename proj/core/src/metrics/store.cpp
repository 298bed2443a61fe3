#include "ranharness/metrics/store.hpp"

#include <mutex>
#include <stdexcept>

namespace ranharness::metrics {

MetricsStore::MetricsStore(const MetricsStore& other) {
  std::shared_lock lock(other.mutex_);
  series_ = other.series_;
  samples_ = other.samples_;
  rejected_ = other.rejected_;
}

MetricsStore& MetricsStore::operator=(const MetricsStore& other) {
  if (this == &other) return *this;
  MetricsStore copy(other);
  std::unique_lock lock(mutex_);
  series_ = std::move(copy.series_);
  samples_ = copy.samples_;
  rejected_ = copy.rejected_;
  return *this;
}

std::size_t MetricsStore::insert(const MetricPoint& p) {
  std::unique_lock lock(mutex_);
  auto& fields = series_[Key{p.measurement, p.tags}];
  std::size_t accepted = 0;
  for (const auto& [name, value] : p.fields) {
    auto& samples = fields[name];
    if (!samples.empty() && samples.back().slot >= p.ts_slot) {
      ++rejected_;
      continue;
    }
    samples.push_back({p.ts_slot, value});
    ++accepted;
  }
  samples_ += accepted;
  return accepted;
}

namespace {

bool matches(const Tags& tags, const Tags& filter) {
  for (const auto& [k, v] : filter) {
    auto it = tags.find(k);
    if (it == tags.end() || it->second != v) return false;
  }
  return true;
}

struct Bucket {
  std::uint64_t index = 0;
  double sum = 0;
  double max = 0;
  double min = 0;
  std::uint64_t count = 0;
};

std::vector<Sample> aggregate(const std::vector<Sample>& samples, const Query& q) {
  std::vector<Sample> out;
  std::vector<Bucket> buckets;
  const std::uint64_t window = *q.window;
  for (const auto& s : samples) {
    if (s.slot < q.from_slot || s.slot > q.to_slot) continue;
    const std::uint64_t idx = (s.slot - q.from_slot) / window;
    if (buckets.empty() || buckets.back().index != idx) {
      buckets.push_back({idx, 0, s.value, s.value, 0});
    }
    Bucket& b = buckets.back();
    b.sum += s.value;
    if (s.value > b.max) b.max = s.value;
    if (s.value < b.min) b.min = s.value;
    ++b.count;
  }
  out.reserve(buckets.size());
  for (const auto& b : buckets) {
    double v = 0;
    switch (q.agg) {
      case Aggregation::mean: v = b.sum / static_cast<double>(b.count); break;
      case Aggregation::max: v = b.max; break;
      case Aggregation::min: v = b.min; break;
      case Aggregation::count: v = static_cast<double>(b.count); break;
      case Aggregation::raw: break;
    }
    out.push_back({q.from_slot + b.index * window, v});
  }
  return out;
}

}  // namespace

std::vector<Series> MetricsStore::query(const Query& q) const {
  if (q.from_slot > q.to_slot) throw std::invalid_argument("malformed range: from > to");
  if (q.agg == Aggregation::raw && q.window)
    throw std::invalid_argument("window not allowed for raw queries");
  if (q.agg != Aggregation::raw && (!q.window || *q.window == 0))
    throw std::invalid_argument("aggregation requires a positive window");

  std::shared_lock lock(mutex_);
  std::vector<Series> out;
  auto it = series_.lower_bound(Key{q.measurement, {}});
  for (; it != series_.end() && it->first.measurement == q.measurement; ++it) {
    if (!matches(it->first.tags, q.tag_filter)) continue;
    Series s{q.measurement, it->first.tags, {}};
    for (const auto& [field, samples] : it->second) {
      std::vector<Sample> picked;
      if (q.agg == Aggregation::raw) {
        for (const auto& sample : samples)
          if (sample.slot >= q.from_slot && sample.slot <= q.to_slot) picked.push_back(sample);
      } else {
        picked = aggregate(samples, q);
      }
      if (!picked.empty()) s.fields.emplace(field, std::move(picked));
    }
    if (!s.fields.empty()) out.push_back(std::move(s));
  }
  return out;
}

std::vector<Series> MetricsStore::snapshot() const {
  std::shared_lock lock(mutex_);
  std::vector<Series> out;
  out.reserve(series_.size());
  for (const auto& [key, fields] : series_) {
    Series s{key.measurement, key.tags, {}};
    for (const auto& [field, samples] : fields)
      if (!samples.empty()) s.fields.emplace(field, samples);
    if (!s.fields.empty()) out.push_back(std::move(s));
  }
  return out;
}

std::size_t MetricsStore::sample_count() const {
  std::shared_lock lock(mutex_);
  return samples_;
}

std::size_t MetricsStore::rejected_count() const {
  std::shared_lock lock(mutex_);
  return rejected_;
}

bool MetricsStore::operator==(const MetricsStore& other) const {
  return snapshot() == other.snapshot();
}

void StoreWriter::write(MetricPoint p) {
  p.tags["component"] = component_;
  if (auto why = check_point(p); !why.empty()) throw std::invalid_argument(why);
  store_.insert(p);
}

std::string to_string(Aggregation a) {
  switch (a) {
    case Aggregation::raw: return "raw";
    case Aggregation::mean: return "mean";
    case Aggregation::max: return "max";
    case Aggregation::min: return "min";
    case Aggregation::count: return "count";
  }
  return "raw";
}

std::optional<Aggregation> parse_aggregation(const std::string& s) {
  for (auto a : {Aggregation::raw, Aggregation::mean, Aggregation::max, Aggregation::min,
                 Aggregation::count})
    if (to_string(a) == s) return a;
  return std::nullopt;
}

}  // namespace ranharness::metrics

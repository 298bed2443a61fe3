#pragma once

#include <cstdint>

namespace ranharness::ransim {

/// Declares radio-link failure after `slots` consecutive samples below the
/// threshold. Any sample at or above the threshold resets the count.
class RadioLinkMonitor {
 public:
  RadioLinkMonitor(double threshold_db = -5.0, std::uint32_t slots = 10)
      : threshold_db_(threshold_db), slots_(slots) {}

  /// Returns true on the sample that completes the failure run.
  bool update(double sinr_db) {
    if (sinr_db < threshold_db_) {
      ++below_;
    } else {
      below_ = 0;
    }
    return below_ >= slots_;
  }

  void reset() { below_ = 0; }
  std::uint32_t consecutive_below() const { return below_; }

 private:
  double threshold_db_;
  std::uint32_t slots_;
  std::uint32_t below_ = 0;
};

}  // namespace ranharness::ransim

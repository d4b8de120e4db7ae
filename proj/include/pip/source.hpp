#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "pip/model.hpp"

namespace pip {

inline constexpr std::size_t kTimelineLimit = 100;

/// Read access to an OSN. Implementations throw RateLimitedError once their
/// request budget for the current window is spent.
class PostSource {
 public:
  virtual ~PostSource() = default;
  /// Most recent first; unknown tags give an empty list.
  virtual std::vector<Post> search_hashtag(const std::string& tag, std::size_t limit) = 0;
  /// Most recent first; unknown accounts give an empty list.
  virtual std::vector<Post> account_timeline(const std::string& account, std::size_t limit = kTimelineLimit) = 0;
  virtual std::optional<Account> get_profile(const std::string& account) = 0;
};

class AvailabilitySource {
 public:
  virtual ~AvailabilitySource() = default;
  virtual AvailabilityStatus check_availability(const std::string& post_id, Timestamp t) = 0;
};

}  // namespace pip

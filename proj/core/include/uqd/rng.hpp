#pragma once

#include <cstdint>

namespace uqd {

enum class StreamRole : std::uint64_t {
  Init = 1,
  Selection = 2,
  Mutation = 3,
  OffspringEval = 4,
  ArchiveReeval = 5,
  PostHocReeval = 6,
};

// Counter-based keyed stream: draw k of a stream with key K is a pure
// function of (K, k), so results cannot depend on the execution schedule.
// Streams for logical roles are derived by chaining subkeys, e.g.
// root.derive(StreamRole::OffspringEval).derive(gen).derive(i).derive(s).
class RngStream {
 public:
  RngStream() = default;
  explicit RngStream(std::uint64_t seed);

  RngStream derive(std::uint64_t subkey) const;
  RngStream derive(StreamRole role) const;

  std::uint64_t next_u64();
  double next_double();    // uniform [0, 1)
  double next_gaussian();  // standard normal
  std::uint64_t next_below(std::uint64_t n);

  std::uint64_t key() const { return key_; }
  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
  bool has_cached_gaussian_ = false;
  double cached_gaussian_ = 0.0;
};

}  // namespace uqd

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace crashbound::detail {

/// Ordered, randomly addressable sequence of crash patterns, each a sorted
/// list of `pattern_size()` flat hidden-neuron ids.
class PatternSource {
 public:
  virtual ~PatternSource() = default;
  virtual std::uint64_t count() const = 0;
  virtual std::size_t pattern_size() const = 0;
  /// Writes pattern number `rank` into `ids`.
  virtual void seek(std::uint64_t rank, std::span<std::size_t> ids) const = 0;
  /// Advances `ids` (currently pattern `rank`) to pattern rank + 1.
  virtual void advance(std::uint64_t rank, std::span<std::size_t> ids) const = 0;
};

/// All size-k subsets of {0..n-1}, lexicographic.
class CombinationSource final : public PatternSource {
 public:
  CombinationSource(std::size_t n, std::size_t k);
  std::uint64_t count() const override { return count_; }
  std::size_t pattern_size() const override { return k_; }
  void seek(std::uint64_t rank, std::span<std::size_t> ids) const override;
  void advance(std::uint64_t rank, std::span<std::size_t> ids) const override;

 private:
  std::size_t n_;
  std::size_t k_;
  std::uint64_t count_;
};

/// Cartesian product of per-layer combinations; layer 0 varies slowest.
class AllocationSource final : public PatternSource {
 public:
  AllocationSource(std::span<const std::size_t> widths, std::span<const std::size_t> f_per_layer);
  std::uint64_t count() const override { return count_; }
  std::size_t pattern_size() const override { return k_; }
  void seek(std::uint64_t rank, std::span<std::size_t> ids) const override;
  void advance(std::uint64_t rank, std::span<std::size_t> ids) const override;

 private:
  std::vector<std::size_t> widths_;
  std::vector<std::size_t> f_;
  std::vector<std::size_t> offsets_;
  std::vector<std::uint64_t> layer_counts_;
  std::size_t k_ = 0;
  std::uint64_t count_ = 1;
};

/// Explicit list of patterns stored row-major.
class ListSource final : public PatternSource {
 public:
  ListSource(std::size_t k, std::vector<std::size_t> flat);
  std::uint64_t count() const override { return count_; }
  std::size_t pattern_size() const override { return k_; }
  void seek(std::uint64_t rank, std::span<std::size_t> ids) const override;
  void advance(std::uint64_t rank, std::span<std::size_t> ids) const override;

 private:
  std::size_t k_;
  std::vector<std::size_t> flat_;
  std::uint64_t count_;
};

/// Draws `n_samples` uniform size-k subsets of {0..n-1} by partial
/// Fisher-Yates, each sorted ascending.
ListSource sample_patterns(std::size_t n, std::size_t k, std::uint64_t n_samples, std::uint64_t seed);

}  // namespace crashbound::detail

#include "crashbound/detail/pattern_source.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "crashbound/combinatorics.hpp"
#include "crashbound/error.hpp"
#include "crashbound/rng.hpp"

namespace crashbound::detail {

CombinationSource::CombinationSource(std::size_t n, std::size_t k)
    : n_(n), k_(k), count_(binomial_u64(n, k)) {}

void CombinationSource::seek(std::uint64_t rank, std::span<std::size_t> ids) const {
  unrank_combination(n_, rank, ids);
}

void CombinationSource::advance(std::uint64_t, std::span<std::size_t> ids) const {
  next_combination(n_, ids);
}

AllocationSource::AllocationSource(std::span<const std::size_t> widths, std::span<const std::size_t> f_per_layer)
    : widths_(widths.begin(), widths.end()), f_(f_per_layer.begin(), f_per_layer.end()) {
  if (f_.size() != widths_.size()) throw PatternError("allocation length does not match depth");
  offsets_.assign(widths_.size(), 0);
  for (std::size_t l = 0; l < widths_.size(); ++l) {
    if (f_[l] > widths_[l]) throw PatternError("allocation exceeds width of layer " + std::to_string(l));
    if (l > 0) offsets_[l] = offsets_[l - 1] + widths_[l - 1];
    layer_counts_.push_back(binomial_u64(widths_[l], f_[l]));
    const BigInt total = BigInt(count_) * layer_counts_.back();
    if (total > BigInt(UINT64_MAX)) throw DomainError("allocation pattern count overflows 64 bits");
    count_ = total.convert_to<std::uint64_t>();
    k_ += f_[l];
  }
}

void AllocationSource::seek(std::uint64_t rank, std::span<std::size_t> ids) const {
  std::size_t pos = k_;
  for (std::size_t l = widths_.size(); l-- > 0;) {
    const std::uint64_t r = rank % layer_counts_[l];
    rank /= layer_counts_[l];
    pos -= f_[l];
    auto part = ids.subspan(pos, f_[l]);
    unrank_combination(widths_[l], r, part);
    for (auto& id : part) id += offsets_[l];
  }
}

void AllocationSource::advance(std::uint64_t, std::span<std::size_t> ids) const {
  std::size_t end = k_;
  for (std::size_t l = widths_.size(); l-- > 0;) {
    const std::size_t begin = end - f_[l];
    auto part = ids.subspan(begin, f_[l]);
    for (auto& id : part) id -= offsets_[l];
    const bool carried = !next_combination(widths_[l], part);
    if (carried) std::iota(part.begin(), part.end(), std::size_t{0});
    for (auto& id : part) id += offsets_[l];
    if (!carried) return;
    end = begin;
  }
}

ListSource::ListSource(std::size_t k, std::vector<std::size_t> flat)
    : k_(k), flat_(std::move(flat)), count_(k == 0 ? 0 : flat_.size() / k) {}

void ListSource::seek(std::uint64_t rank, std::span<std::size_t> ids) const {
  std::copy_n(flat_.begin() + static_cast<std::ptrdiff_t>(rank * k_), k_, ids.begin());
}

void ListSource::advance(std::uint64_t rank, std::span<std::size_t> ids) const { seek(rank + 1, ids); }

ListSource sample_patterns(std::size_t n, std::size_t k, std::uint64_t n_samples, std::uint64_t seed) {
  if (k == 0 || k > n) throw DomainError("sampled patterns need 1 <= k <= hidden neuron count");
  SplitMix64 rng(seed);
  std::vector<std::size_t> perm(n);
  std::vector<std::size_t> flat;
  flat.reserve(n_samples * k);
  for (std::uint64_t s = 0; s < n_samples; ++s) {
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    for (std::size_t i = 0; i < k; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
      std::swap(perm[i], perm[j]);
    }
    std::sort(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(k));
    flat.insert(flat.end(), perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(k));
  }
  return ListSource(k, std::move(flat));
}

}  // namespace crashbound::detail

#include "crashbound/combinatorics.hpp"

#include "crashbound/error.hpp"

namespace crashbound {

BigInt binomial(long long n, long long k) {
  if (n < 0 || k < 0 || k > n)
    throw DomainError("binomial(" + std::to_string(n) + ", " + std::to_string(k) + ") is undefined");
  if (k > n - k) k = n - k;
  BigInt r = 1;
  // r stays an exact binomial C(n - k + i, i) after each step.
  for (long long i = 1; i <= k; ++i) {
    r *= n - k + i;
    r /= i;
  }
  return r;
}

std::uint64_t binomial_u64(std::uint64_t n, std::uint64_t k) {
  const BigInt b = binomial(static_cast<long long>(n), static_cast<long long>(k));
  if (b > BigInt(UINT64_MAX)) throw DomainError("C(" + std::to_string(n) + ", " + std::to_string(k) + ") overflows 64 bits");
  return b.convert_to<std::uint64_t>();
}

std::string to_decimal(const BigInt& v) { return v.str(); }

void unrank_combination(std::uint64_t n, std::uint64_t rank, std::span<std::size_t> out) {
  const std::uint64_t k = out.size();
  std::uint64_t next = 0;
  for (std::uint64_t i = 0; i < k; ++i) {
    // Skip candidates whose block of completions lies entirely below rank.
    for (;; ++next) {
      const std::uint64_t block = binomial_u64(n - next - 1, k - i - 1);
      if (rank < block) break;
      rank -= block;
    }
    out[i] = next++;
  }
}

bool next_combination(std::size_t n, std::span<std::size_t> c) {
  const std::size_t k = c.size();
  std::size_t i = k;
  while (i > 0) {
    --i;
    if (c[i] < n - k + i) {
      ++c[i];
      for (std::size_t j = i + 1; j < k; ++j) c[j] = c[j - 1] + 1;
      return true;
    }
  }
  return false;
}

}  // namespace crashbound

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace crashbound {

using BigInt = boost::multiprecision::cpp_int;

/// Exact C(n, k). Throws DomainError unless 0 <= k <= n.
BigInt binomial(long long n, long long k);

/// C(n, k) when it fits in 64 bits; throws DomainError on overflow.
std::uint64_t binomial_u64(std::uint64_t n, std::uint64_t k);

std::string to_decimal(const BigInt& v);

/// Writes the `rank`-th k-subset of {0..n-1} in lexicographic order into
/// `out` (k = out.size()). Requires rank < C(n, k).
void unrank_combination(std::uint64_t n, std::uint64_t rank, std::span<std::size_t> out);

/// Advances `c` to the next k-subset of {0..n-1} in lexicographic order.
/// Returns false (leaving `c` unspecified) after the last one.
bool next_combination(std::size_t n, std::span<std::size_t> c);

}  // namespace crashbound

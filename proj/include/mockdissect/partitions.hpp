#pragma once

// Partitions without repeated odd parts, their M2-ranks, and brute-force rank generating
// functions. This is the ground-truth oracle for everything in mockforms.

#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "mockdissect/cyclotomic.hpp"
#include "mockdissect/errors.hpp"
#include "mockdissect/qseries.hpp"

namespace mockdissect {

using Partition = std::vector<int>;  // weakly decreasing

inline constexpr int kDefaultEnumerationCap = 80;

inline void check_cap(long n, int cap) {
  if (n < 0) throw DomainError("partition size must be nonnegative");
  if (n > cap)
    throw DomainError("n = " + std::to_string(n) + " exceeds the enumeration cap " + std::to_string(cap) +
                      "; use the Eulerian series oracle (r2_eulerian) instead");
}

inline bool is_podp(const Partition& p) {
  for (size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0) return false;
    if (i > 0 && p[i] > p[i - 1]) return false;
    if (i > 0 && p[i] == p[i - 1] && p[i] % 2 != 0) return false;
  }
  return true;
}

/// All partitions of n with distinct odd parts, largest part first, in reverse
/// lexicographic order.
inline std::vector<Partition> enum_podp(int n, int cap = kDefaultEnumerationCap) {
  check_cap(n, cap);
  std::vector<Partition> out;
  Partition cur;
  auto rec = [&](auto&& self, int rest, int max_part) -> void {
    if (rest == 0) {
      out.push_back(cur);
      return;
    }
    for (int k = std::min(rest, max_part); k >= 1; --k) {
      cur.push_back(k);
      self(self, rest - k, k % 2 ? k - 1 : k);  // an odd part may not repeat
      cur.pop_back();
    }
  };
  rec(rec, n, n);
  return out;
}

/// ceil(largest / 2) - number of parts.
inline long m2_rank(const Partition& p) {
  if (p.empty()) return 0;
  return (p.front() + 1) / 2 - static_cast<long>(p.size());
}

/// rank -> N2(rank, n) for one n, by walking every partition.
using RankCounts = std::map<long, BigInt>;

namespace detail {

// Tables for all n <= filled, built once by a depth-first walk over every partition.
struct RankTableCache {
  std::mutex mu;
  int filled = -1;
  std::vector<RankCounts> table;
};

inline RankTableCache& rank_cache() {
  static RankTableCache c;
  return c;
}

inline void fill_rank_tables(int n_max, std::vector<RankCounts>& table) {
  table.assign(static_cast<size_t>(n_max + 1), {});
  table[0][0] = 1;
  // The walk fixes the largest part first, then appends parts; each node is one partition.
  for (int largest = 1; largest <= n_max; ++largest) {
    const long half = (largest + 1) / 2;
    auto rec = [&](auto&& self, int sum, int max_next, long parts) -> void {
      table[static_cast<size_t>(sum)][half - parts] += 1;
      for (int k = std::min(max_next, n_max - sum); k >= 1; --k) self(self, sum + k, k % 2 ? k - 1 : k, parts + 1);
    };
    rec(rec, largest, largest % 2 ? largest - 1 : largest, 1);
  }
}

}  // namespace detail

/// Rank distribution of partitions of n (n <= cap), cached across calls.
inline RankCounts rank_counts(int n, int cap = kDefaultEnumerationCap) {
  check_cap(n, cap);
  auto& c = detail::rank_cache();
  std::lock_guard lock(c.mu);
  if (c.filled < n) {
    detail::fill_rank_tables(std::max(n, std::min(cap, kDefaultEnumerationCap)), c.table);
    c.filled = static_cast<int>(c.table.size()) - 1;
  }
  return c.table[static_cast<size_t>(n)];
}

inline BigInt n2_count(long m, int n, int cap = kDefaultEnumerationCap) {
  auto t = rank_counts(n, cap);
  auto it = t.find(m);
  return it == t.end() ? BigInt(0) : it->second;
}

inline BigInt n2_mod(long k, long c, int n, int cap = kDefaultEnumerationCap) {
  if (c < 1) throw DomainError("modulus must be positive");
  BigInt s = 0;
  for (const auto& [m, cnt] : rank_counts(n, cap))
    if (mod_floor(m - k, c) == 0) s += cnt;
  return s;
}

/// sum_n sum_m N2(m,n) zeta_c^(a m) q^n for n < prec, by enumeration.
inline CSeries r2_series_bruteforce(long a, int c, long prec, int cap = kDefaultEnumerationCap) {
  if (c < 1) throw DomainError("modulus must be positive");
  check_cap(prec - 1, cap);
  CSeries out(CycNum::zero(c), 1, 0, prec);
  for (int n = 0; n < prec; ++n) {
    CycNum acc = CycNum::zero(c);
    for (const auto& [m, cnt] : rank_counts(n, cap))
      acc += CycNum::zeta_pow(c, mod_floor(a * m, c)) * Rational(cnt);
    out.at(n) = acc;
  }
  return out;
}

}  // namespace mockdissect

#pragma once

// Gamma0(N) ∩ Gamma1(M): membership, cusps and widths, index, and the eta multiplier.
//
// Cusp classes are computed by reduction mod L = lcm(N, M). The group contains Gamma(L),
// so two cusps are equivalent iff their column vectors (alpha, gamma) mod L, up to sign,
// lie in one orbit of the image of the group in SL2(Z/L).

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "mockdissect/cyclotomic.hpp"
#include "mockdissect/errors.hpp"
#include "mockdissect/rational.hpp"

namespace mockdissect {

struct GroupSpec {
  long N = 1;  // Gamma0 level
  long M = 1;  // Gamma1 level
  friend bool operator==(const GroupSpec&, const GroupSpec&) = default;
  long level() const { return lcm_l(N, M); }
};

/// alpha/gamma reduced with gamma >= 0; infinity is 1/0.
struct Cusp {
  long num = 1;
  long den = 0;

  Cusp() = default;
  Cusp(long a, long c) : num(a), den(c) {
    if (a == 0 && c == 0) throw DomainError("0/0 is not a cusp");
    if (c < 0 || (c == 0 && a < 0)) {
      num = -num;
      den = -den;
    }
    long g = gcd_l(num, den);
    num /= g;
    den /= g;
  }
  static Cusp infinity() { return Cusp(1, 0); }
  bool is_infinity() const { return den == 0; }

  std::string to_string() const {
    if (den == 0) return "inf";
    if (den == 1) return std::to_string(num);
    return std::to_string(num) + "/" + std::to_string(den);
  }
  static Cusp parse(const std::string& s) {
    if (s == "inf" || s == "oo" || s == "infinity" || s == "∞") return infinity();
    auto slash = s.find('/');
    try {
      if (slash == std::string::npos) return Cusp(std::stol(s), 1);
      return Cusp(std::stol(s.substr(0, slash)), std::stol(s.substr(slash + 1)));
    } catch (const std::invalid_argument&) {
      throw ParseError("bad cusp '" + s + "'");
    } catch (const std::out_of_range&) {
      throw ParseError("bad cusp '" + s + "'");
    }
  }
  friend bool operator==(const Cusp&, const Cusp&) = default;
  friend auto operator<=>(const Cusp&, const Cusp&) = default;
};

struct UniMatrix {
  long a, b, c, d;  // [[alpha, beta], [gamma, delta]]
  long det() const { return a * d - b * c; }
  UniMatrix operator*(const UniMatrix& o) const {
    return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
  }
};

inline bool member(const UniMatrix& B, const GroupSpec& G) {
  if (B.det() != 1) throw DomainError("matrix is not in SL2(Z)");
  return mod_floor(B.c, G.N) == 0 && mod_floor(B.c, G.M) == 0 && mod_floor(B.a - 1, G.M) == 0 &&
         mod_floor(B.d - 1, G.M) == 0;
}

/// (g, x, y) with a x + b y = g = gcd(a, b) >= 0.
inline std::tuple<long, long, long> ext_gcd(long a, long b) {
  long old_r = a, r = b, old_s = 1, s = 0, old_t = 0, t = 1;
  while (r != 0) {
    long q = old_r / r;
    std::tie(old_r, r) = std::pair{r, old_r - q * r};
    std::tie(old_s, s) = std::pair{s, old_s - q * s};
    std::tie(old_t, t) = std::pair{t, old_t - q * t};
  }
  if (old_r < 0) return {-old_r, -old_s, -old_t};
  return {old_r, old_s, old_t};
}

/// A matrix in SL2(Z) whose first column is (alpha, gamma).
inline UniMatrix matrix_to_cusp(const Cusp& c) {
  if (c.is_infinity()) return {1, 0, 0, 1};
  auto [g, x, y] = ext_gcd(c.num, c.den);  // num x + den y = 1
  if (g != 1) throw DomainError("cusp is not reduced");
  return {c.num, -y, c.den, x};
}

/// Least w >= 1 with B T^w B^-1 in G, from B T^w B^-1 = [[1 - ag w, a^2 w], [-g^2 w, 1 + ag w]]:
/// g^2 w = 0 mod L and a g w = 0 mod M.
inline long width(const Cusp& c, const GroupSpec& G) {
  const long L = G.level();
  const long g2 = mod_floor(mod_floor(c.den, L) * mod_floor(c.den, L), L);
  const long ag = mod_floor(mod_floor(c.num, G.M) * mod_floor(c.den, G.M), G.M);
  return lcm_l(L / gcd_l(g2, L), G.M / gcd_l(ag, G.M));
}

/// 2x2 matrices mod L.
struct ModMatrix {
  long a, b, c, d;
};

inline constexpr long kMaxCuspLevel = 1200;

/// Cusp classes of a group, computed once per group.
class CuspStructure {
 public:
  static std::shared_ptr<const CuspStructure> get(const GroupSpec& G) {
    static std::mutex mu;
    static std::map<std::pair<long, long>, std::shared_ptr<const CuspStructure>> cache;
    std::lock_guard lock(mu);
    auto key = std::pair{G.N, G.M};
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    auto s = std::shared_ptr<const CuspStructure>(new CuspStructure(G));
    cache.emplace(key, s);
    return s;
  }

  long level() const { return L_; }
  /// Size of the image of G in SL2(Z/L).
  long image_size() const { return image_size_; }
  long index() const { return index_; }
  bool contains_minus_identity() const { return minus_id_; }
  const std::vector<std::pair<Cusp, long>>& cusps() const { return cusps_; }

  /// Class id of a cusp; equal ids mean G-equivalent cusps.
  long class_of(const Cusp& c) const { return class_id_.at(find(vec_index(c.num, c.den))); }

 private:
  explicit CuspStructure(const GroupSpec& G) : G_(G), L_(G.level()) {
    if (G.N < 1 || G.M < 1) throw DomainError("group levels must be positive");
    if (L_ > kMaxCuspLevel)
      throw DomainError("level " + std::to_string(L_) + " exceeds the cusp enumeration bound " +
                        std::to_string(kMaxCuspLevel));
    build_image();
    build_orbits();
  }

  long vec_index(long x, long y) const {
    x = mod_floor(x, L_);
    y = mod_floor(y, L_);
    long i = x * L_ + y, j = mod_floor(-x, L_) * L_ + mod_floor(-y, L_);
    return std::min(i, j);
  }

  long find(long i) const {
    while (parent_[static_cast<size_t>(i)] != i) i = parent_[static_cast<size_t>(i)];
    return i;
  }
  long find_compress(long i) {
    long r = find(i);
    while (parent_[static_cast<size_t>(i)] != r) {
      long n = parent_[static_cast<size_t>(i)];
      parent_[static_cast<size_t>(i)] = r;
      i = n;
    }
    return r;
  }

  void unite(long i, long j) {
    i = find_compress(i);
    j = find_compress(j);
    if (i != j) parent_[static_cast<size_t>(std::max(i, j))] = std::min(i, j);
  }

  bool in_image(const ModMatrix& m) const {
    return mod_floor(m.c, gcd_l(G_.N, L_)) == 0 && mod_floor(m.c, G_.M) == 0 && mod_floor(m.a - 1, G_.M) == 0 &&
           mod_floor(m.d - 1, G_.M) == 0 && mod_floor(m.a * m.d - m.b * m.c - 1, L_) == 0;
  }

  // Closure of {T, diag(u, u^-1) : u a unit, u = 1 mod M} under multiplication mod L. The
  // congruences force gamma = 0 mod L, so these generate the whole image.
  void build_image() {
    std::vector<ModMatrix>& gens = gens_;
    gens.push_back({1 % L_, 1 % L_, 0, 1 % L_});
    for (long u = 1; u <= L_; ++u) {
      if (gcd_l(u, L_) != 1 || mod_floor(u - 1, G_.M) != 0) continue;
      auto [g, inv, unused] = ext_gcd(u, L_);
      (void)g;
      (void)unused;
      gens.push_back({u % L_, 0, 0, mod_floor(inv, L_)});
    }
    auto key = [&](const ModMatrix& m) {
      return ((mod_floor(m.a, L_) * L_ + mod_floor(m.b, L_)) * L_ + mod_floor(m.c, L_)) * L_ + mod_floor(m.d, L_);
    };
    std::set<long> seen;
    std::vector<ModMatrix> frontier{{1 % L_, 0, 0, 1 % L_}};
    seen.insert(key(frontier[0]));
    image_.push_back(frontier[0]);
    while (!frontier.empty()) {
      std::vector<ModMatrix> next;
      for (const auto& m : frontier)
        for (const auto& g : gens) {
          ModMatrix p{mod_floor(m.a * g.a + m.b * g.c, L_), mod_floor(m.a * g.b + m.b * g.d, L_),
                      mod_floor(m.c * g.a + m.d * g.c, L_), mod_floor(m.c * g.b + m.d * g.d, L_)};
          if (!in_image(p)) throw std::logic_error("generator product left the congruence image");
          if (seen.insert(key(p)).second) {
            image_.push_back(p);
            next.push_back(p);
          }
        }
      frontier = std::move(next);
    }
    image_size_ = static_cast<long>(image_.size());
    // |SL2(Z/L)| = L^3 prod_{p | L} (1 - 1/p^2)
    long order = L_ * L_ * L_;
    for (long p = 2, r = L_; r > 1; ++p) {
      if (r % p) continue;
      order = order / (p * p) * (p * p - 1);
      while (r % p == 0) r /= p;
    }
    if (order % image_size_ != 0) throw std::logic_error("image size does not divide |SL2(Z/L)|");
    index_ = order / image_size_;
    minus_id_ = in_image({L_ - 1, 0, 0, L_ - 1});
  }

  void build_orbits() {
    parent_.resize(static_cast<size_t>(L_ * L_));
    std::iota(parent_.begin(), parent_.end(), 0L);
    auto primitive = [&](long x, long y) { return gcd_l(gcd_l(x, y), L_) == 1; };
    for (long x = 0; x < L_; ++x)
      for (long y = 0; y < L_; ++y) {
        if (!primitive(x, y)) continue;
        // components of the generator graph are the orbits of the generated group
        for (const auto& g : gens_) unite(vec_index(x, y), vec_index(g.a * x + g.b * y, g.c * x + g.d * y));
      }
    // canonical representative per class: least gamma in [0, L), then least alpha
    std::map<long, std::pair<long, long>> best;
    for (long x = 0; x < L_; ++x)
      for (long y = 0; y < L_; ++y) {
        if (!primitive(x, y)) continue;
        long r = find_compress(vec_index(x, y));
        auto cand = std::pair{y, x};
        auto it = best.find(r);
        if (it == best.end() || cand < it->second) best[r] = cand;
      }
    const long inf_root = find(vec_index(1, 0));
    std::vector<std::pair<Cusp, long>> list;
    for (auto [root, yx] : best) {
      auto [y, x] = yx;
      Cusp c;
      if (root == inf_root) {
        c = Cusp::infinity();
      } else {
        long gam = y == 0 ? L_ : y;
        long alpha = x;
        while (gcd_l(alpha, gam) != 1) alpha += L_;
        c = Cusp(alpha, gam);
      }
      list.emplace_back(c, width(c, G_));
    }
    std::sort(list.begin(), list.end(), [](const auto& p, const auto& q) {
      // by value, infinity last
      if (p.first.is_infinity() != q.first.is_infinity()) return q.first.is_infinity();
      return Rational(p.first.num, std::max(p.first.den, 1L)) < Rational(q.first.num, std::max(q.first.den, 1L));
    });
    for (size_t i = 0; i < list.size(); ++i) class_id_[find(vec_index(list[i].first.num, list[i].first.den))] = static_cast<long>(i);
    cusps_ = std::move(list);
  }

  GroupSpec G_;
  long L_;
  std::vector<ModMatrix> gens_;
  std::vector<ModMatrix> image_;
  long image_size_ = 0;
  long index_ = 0;
  bool minus_id_ = false;
  std::vector<long> parent_;
  std::map<long, long> class_id_;
  std::vector<std::pair<Cusp, long>> cusps_;
};

inline bool cusp_equiv(const Cusp& c1, const Cusp& c2, const GroupSpec& G) {
  auto s = CuspStructure::get(G);
  return s->class_of(c1) == s->class_of(c2);
}

/// One representative per class with its width, sorted by value with infinity last.
inline std::vector<std::pair<Cusp, long>> cusp_set(const GroupSpec& G) { return CuspStructure::get(G)->cusps(); }

/// [SL2(Z) : G].
inline long group_index(const GroupSpec& G) { return CuspStructure::get(G)->index(); }

/// Jacobi symbol (m|n) for odd n > 0.
inline int jacobi(long m, long n) {
  if (n <= 0 || n % 2 == 0) throw DomainError("Jacobi symbol needs an odd positive modulus");
  m = mod_floor(m, n);
  int r = 1;
  while (m != 0) {
    while (m % 2 == 0) {
      m /= 2;
      long t = n % 8;
      if (t == 3 || t == 5) r = -r;
    }
    std::swap(m, n);
    if (m % 4 == 3 && n % 4 == 3) r = -r;
    m %= n;
  }
  return n == 1 ? r : 0;
}

/// (m|n) extended to odd negative n: (0|±1) = 1, and a sign flip when m < 0 and n < 0.
inline int jacobi_ext(long m, long n) {
  if (m == 0 && (n == 1 || n == -1)) return 1;
  int j = jacobi(m, n < 0 ? -n : n);
  return (m < 0 && n < 0) ? -j : j;
}

/// nu(B) as a 24th root of unity: eta(B tau) = nu(B) sqrt(gamma tau + delta) eta(tau).
inline CycNum eta_multiplier(const UniMatrix& B) {
  if (B.det() != 1) throw DomainError("matrix is not in SL2(Z)");
  const long a = B.a, b = B.b, g = B.c, d = B.d;
  long x;  // exponent of exp(pi i / 12)
  int sign;
  if (mod_floor(g, 2) == 1) {
    sign = jacobi(d, g < 0 ? -g : g);
    x = (a + d) * g - b * d * (g * g - 1) - 3 * g;
  } else {
    sign = jacobi_ext(g, d);
    x = (a + d) * g - b * d * (g * g - 1) + 3 * d - 3 - 3 * g * d;
  }
  return CycNum::zeta_pow(24, mod_floor(x + (sign < 0 ? 12 : 0), 24));
}

}  // namespace mockdissect

#pragma once

#include "ermt/numeric.hpp"

#include <array>
#include <cstddef>
#include <functional>
#include <vector>

namespace ermt {

constexpr int kDefaultPairingCap = 8;

// Fixed-point-free involution on {1..2p}. partner is stored 0-based internally
// but the accessors are 1-based to match the usual notation.
class Pairing {
 public:
  Pairing() = default;
  // partner1[k-1] = partner of k, 1-based values.
  explicit Pairing(std::vector<int> partner1);
  // Builds from a list of 1-based blocks.
  static Pairing from_blocks(const std::vector<std::array<int, 2>>& blocks);

  int p() const { return static_cast<int>(partner_.size() / 2); }
  int size() const { return static_cast<int>(partner_.size()); }
  int partner(int k) const { return partner_[k - 1] + 1; }
  const std::vector<int>& raw() const { return partner_; }
  std::vector<std::array<int, 2>> blocks() const;
  bool operator==(const Pairing& o) const { return partner_ == o.partner_; }
  bool operator<(const Pairing& o) const { return partner_ < o.partner_; }

 private:
  std::vector<int> partner_;  // 0-based
};

struct Crossing {
  int i, j, k, l;
  bool operator==(const Crossing&) const = default;
  auto operator<=>(const Crossing&) const = default;
};

enum class Taxonomy { SelfAdjoint, Rectangular };
enum class CrossingClass { SymType1, SymType2, RectType1, RectType2, RectType3 };

// Calls fn on every pairing of [2p] in canonical order. Throws CapExceeded
// when p > cap.
void for_each_pairing(int p, const std::function<void(const Pairing&)>& fn,
                      int cap = kDefaultPairingCap);
std::vector<Pairing> enumerate_pairings(int p, int cap = kDefaultPairingCap);

std::vector<Crossing> crossings(const Pairing& pi);
bool is_noncrossing(const Pairing& pi);
CrossingClass classify_crossing(const Pairing& pi, const Crossing& x, Taxonomy taxonomy);

// chi_p = 4^{-p} C_p.
Rational catalan_chi(int p);
std::vector<Rational> catalan_chi_table(int pmax);
BigInt catalan_number(int p);
BigInt double_factorial_odd(int p);  // (2p-1)!!

}  // namespace ermt

#include "ermt/pairing.hpp"

#include <string>

namespace ermt {

Pairing::Pairing(std::vector<int> partner1) {
  const int n = static_cast<int>(partner1.size());
  if (n == 0 || n % 2 != 0) throw Error("pairing needs a positive even ground set");
  partner_.resize(n);
  for (int k = 0; k < n; ++k) {
    const int q = partner1[k];
    if (q < 1 || q > n || q == k + 1 || partner1[q - 1] != k + 1) {
      throw Error("not a fixed-point-free involution at position " + std::to_string(k + 1));
    }
    partner_[k] = q - 1;
  }
}

Pairing Pairing::from_blocks(const std::vector<std::array<int, 2>>& blocks) {
  std::vector<int> partner(2 * blocks.size(), 0);
  for (const auto& [a, b] : blocks) {
    if (a < 1 || b < 1 || a > static_cast<int>(partner.size()) ||
        b > static_cast<int>(partner.size()) || partner[a - 1] || partner[b - 1]) {
      throw Error("invalid pairing blocks");
    }
    partner[a - 1] = b;
    partner[b - 1] = a;
  }
  return Pairing(std::move(partner));
}

std::vector<std::array<int, 2>> Pairing::blocks() const {
  std::vector<std::array<int, 2>> out;
  for (int k = 0; k < size(); ++k) {
    if (partner_[k] > k) out.push_back({k + 1, partner_[k] + 1});
  }
  return out;
}

namespace {

void enumerate_rec(std::vector<int>& partner, const std::function<void(const Pairing&)>& fn) {
  const int n = static_cast<int>(partner.size());
  int first = 0;
  while (first < n && partner[first] != 0) ++first;
  if (first == n) {
    fn(Pairing(partner));
    return;
  }
  for (int q = first + 1; q < n; ++q) {
    if (partner[q] != 0) continue;
    partner[first] = q + 1;
    partner[q] = first + 1;
    enumerate_rec(partner, fn);
    partner[first] = 0;
    partner[q] = 0;
  }
}

}  // namespace

void for_each_pairing(int p, const std::function<void(const Pairing&)>& fn, int cap) {
  if (p < 1) throw Error("pairing order must be positive");
  if (p > cap) {
    throw CapExceeded("p = " + std::to_string(p) + " exceeds pairing cap " + std::to_string(cap));
  }
  std::vector<int> partner(2 * p, 0);
  enumerate_rec(partner, fn);
}

std::vector<Pairing> enumerate_pairings(int p, int cap) {
  std::vector<Pairing> out;
  for_each_pairing(p, [&](const Pairing& pi) { out.push_back(pi); }, cap);
  return out;
}

std::vector<Crossing> crossings(const Pairing& pi) {
  std::vector<Crossing> out;
  const int n = pi.size();
  for (int i = 1; i <= n; ++i) {
    const int k = pi.partner(i);
    if (k < i) continue;
    for (int j = i + 1; j < k; ++j) {
      const int l = pi.partner(j);
      if (l > k) out.push_back({i, j, k, l});
    }
  }
  return out;
}

bool is_noncrossing(const Pairing& pi) {
  const int n = pi.size();
  for (int i = 1; i <= n; ++i) {
    const int k = pi.partner(i);
    if (k < i) continue;
    for (int j = i + 1; j < k; ++j) {
      if (pi.partner(j) > k) return false;
    }
  }
  return true;
}

namespace {

bool has_straddler(const Pairing& pi, const Crossing& x) {
  auto inside = [&](int a) { return (x.i < a && a < x.j) || (x.k < a && a < x.l); };
  for (int a = 1; a <= pi.size(); ++a) {
    if (inside(a)) {
      const int b = pi.partner(a);
      if (!inside(b)) return true;
    }
  }
  return false;
}

}  // namespace

CrossingClass classify_crossing(const Pairing& pi, const Crossing& x, Taxonomy taxonomy) {
  const int n = pi.size();
  const bool ordered = 1 <= x.i && x.i < x.j && x.j < x.k && x.k < x.l && x.l <= n;
  if (!ordered || pi.partner(x.i) != x.k || pi.partner(x.j) != x.l) {
    throw NotACrossing("(" + std::to_string(x.i) + "," + std::to_string(x.j) + "," +
                       std::to_string(x.k) + "," + std::to_string(x.l) +
                       ") is not a crossing of the pairing");
  }
  if (taxonomy == Taxonomy::SelfAdjoint) {
    return has_straddler(pi, x) ? CrossingClass::SymType1 : CrossingClass::SymType2;
  }
  if ((x.i + x.k) % 2 != 0 || (x.j + x.l) % 2 != 0) return CrossingClass::RectType1;
  return has_straddler(pi, x) ? CrossingClass::RectType2 : CrossingClass::RectType3;
}

Rational catalan_chi(int p) {
  if (p < 0) throw Error("catalan_chi: negative order");
  Rational chi = 1;
  for (int q = 0; q < p; ++q) chi *= Rational(2 * q + 1, 2 * q + 4);
  return chi;
}

std::vector<Rational> catalan_chi_table(int pmax) {
  std::vector<Rational> out(pmax + 1);
  out[0] = 1;
  for (int q = 0; q < pmax; ++q) out[q + 1] = out[q] * Rational(2 * q + 1, 2 * q + 4);
  return out;
}

BigInt catalan_number(int p) {
  BigInt c = 1;
  for (int q = 0; q < p; ++q) c = c * 2 * (2 * q + 1) / (q + 2);
  return c;
}

BigInt double_factorial_odd(int p) {
  BigInt r = 1;
  for (int q = 1; q <= p; ++q) r *= 2 * q - 1;
  return r;
}

}  // namespace ermt

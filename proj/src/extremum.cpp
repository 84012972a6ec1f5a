#include "ermt/extremum.hpp"

#include <algorithm>
#include <string>
#include <unordered_map>

namespace ermt {

BigInt MomentPolynomial::mass() const {
  BigInt total = 0;
  for (const auto& [kl, c] : coeffs) total += c;
  return total;
}

int genus_exponent(const Pairing& pi) {
  std::vector<int> partner = pi.raw();  // 0-based
  int ell = 0;
  while (!partner.empty()) {
    const Pairing cur(([&] {
      std::vector<int> one(partner.size());
      for (std::size_t k = 0; k < partner.size(); ++k) one[k] = partner[k] + 1;
      return one;
    })());
    const auto xs = crossings(cur);
    if (xs.empty()) break;
    const int n = cur.size();
    const int shift = xs.front().i - 1;
    // After rotation, position q (1-based) holds original position q + shift.
    auto orig = [&](int q) { return (q - 1 + shift) % n; };
    auto rot = [&](int o) { return (o - shift + n) % n + 1; };
    const int l = rot(partner[orig(1)]);
    int k = 0, m = 0;
    for (int q = 2; q < l; ++q) {
      const int mate = rot(partner[orig(q)]);
      if (mate > l) {
        k = q;
        m = mate;
        break;
      }
    }
    std::vector<int> order;
    for (int q = l + 1; q < m; ++q) order.push_back(q);
    for (int q = k + 1; q < l; ++q) order.push_back(q);
    for (int q = 2; q < k; ++q) order.push_back(q);
    for (int q = m + 1; q <= n; ++q) order.push_back(q);
    std::vector<int> newpos(n + 1, -1);
    for (std::size_t t = 0; t < order.size(); ++t) newpos[order[t]] = static_cast<int>(t);
    std::vector<int> next(order.size());
    for (std::size_t t = 0; t < order.size(); ++t) {
      next[t] = newpos[rot(partner[orig(order[t])])];
    }
    partner = std::move(next);
    ++ell;
  }
  return ell;
}

MomentPolynomial hermitian_polynomial(int p, int cap) {
  MomentPolynomial poly;
  poly.p = p;
  poly.taxonomy = Kind::Hermitian;
  for_each_pairing(
      p, [&](const Pairing& pi) { poly.coeffs[{genus_exponent(pi), 0}] += 1; }, cap);
  return poly;
}

namespace {

struct Letter {
  int id;
  bool star;  // adjoint letter (rectangular words only)
};
using Word = std::vector<Letter>;
using Poly = std::map<std::pair<int, int>, BigInt>;

Word cat(std::initializer_list<const Word*> parts) {
  Word out;
  for (const Word* w : parts) out.insert(out.end(), w->begin(), w->end());
  return out;
}

void add_into(Poly& dst, const Poly& src, int dk, int dl) {
  for (const auto& [kl, c] : src) dst[{kl.first + dk, kl.second + dl}] += c;
}

Poly convolve(const Poly& a, const Poly& b) {
  Poly out;
  for (const auto& [x, cx] : a)
    for (const auto& [y, cy] : b) out[{x.first + y.first, x.second + y.second}] += cx * cy;
  return out;
}

struct Key {
  std::vector<int> partner;
  bool first_star;
  bool operator<(const Key& o) const {
    if (partner != o.partner) return partner < o.partner;
    return first_star < o.first_star;
  }
};

class Reducer {
 public:
  explicit Reducer(bool rectangular) : rect_(rectangular) {}

  Poly reduce(const Word& w) {
    if (w.empty()) return Poly{{{0, 0}, BigInt(1)}};
    Key key{partner_of(w), rect_ && w.front().star};
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    Poly out = rect_ ? step_rect(w, key.partner) : step_sym(w, key.partner);
    memo_.emplace(std::move(key), out);
    return out;
  }

 private:
  static std::vector<int> partner_of(const Word& w) {
    std::unordered_map<int, int> first;
    std::vector<int> partner(w.size(), -1);
    for (std::size_t q = 0; q < w.size(); ++q) {
      auto [it, fresh] = first.emplace(w[q].id, static_cast<int>(q));
      if (!fresh) {
        partner[q] = it->second;
        partner[it->second] = static_cast<int>(q);
      }
    }
    for (int v : partner) {
      if (v < 0) throw Error("internal: unpaired letter in reduction word");
    }
    return partner;
  }

  Word transpose(const Word& w) const {
    Word out(w.rbegin(), w.rend());
    if (rect_) {
      for (auto& l : out) l.star = !l.star;
    }
    return out;
  }

  static Pairing as_pairing(const std::vector<int>& partner) {
    std::vector<int> one(partner.size());
    for (std::size_t k = 0; k < partner.size(); ++k) one[k] = partner[k] + 1;
    return Pairing(std::move(one));
  }

  struct Segments {
    Word m[5];
  };
  static Segments split(const Word& w, const Crossing& x) {
    Segments s;
    s.m[0].assign(w.begin(), w.begin() + (x.i - 1));
    s.m[1].assign(w.begin() + x.i, w.begin() + (x.j - 1));
    s.m[2].assign(w.begin() + x.j, w.begin() + (x.k - 1));
    s.m[3].assign(w.begin() + x.k, w.begin() + (x.l - 1));
    s.m[4].assign(w.begin() + x.l, w.end());
    return s;
  }

  // Lexicographically smallest pair (by its smaller then larger position)
  // with exactly one end in (i,j) u (k,l).
  static std::pair<int, int> straddler(const std::vector<int>& partner, const Crossing& x) {
    auto inside = [&](int a) { return (x.i < a && a < x.j) || (x.k < a && a < x.l); };
    for (int a = 1; a <= static_cast<int>(partner.size()); ++a) {
      const int b = partner[a - 1] + 1;
      if (b < a) continue;
      if (inside(a) != inside(b)) return {a, b};
    }
    throw Error("internal: no straddling pair");
  }

  // Tr[Q L R] (P L' S): the pair shared by the trace word and the open word is
  // contracted, giving P (RQ) S and/or P (RQ)^T S.
  struct Contracted {
    Word direct;      // P R Q S
    Word transposed;  // P (RQ)^T S
  };
  Contracted contract(const Word& trace_word, const Word& open_word, int id) const {
    auto find = [&](const Word& w) {
      for (std::size_t q = 0; q < w.size(); ++q)
        if (w[q].id == id) return q;
      throw Error("internal: contracted letter missing");
    };
    const std::size_t e = find(trace_word), f = find(open_word);
    const Word q(trace_word.begin(), trace_word.begin() + e);
    const Word r(trace_word.begin() + e + 1, trace_word.end());
    const Word pp(open_word.begin(), open_word.begin() + f);
    const Word ss(open_word.begin() + f + 1, open_word.end());
    const Word rq = cat({&r, &q});
    const Word rqt = transpose(rq);
    return {cat({&pp, &rq, &ss}), cat({&pp, &rqt, &ss})};
  }

  Poly noncrossing(const Word& w, const std::vector<int>& partner) const {
    const int pairs = static_cast<int>(w.size() / 2);
    if (!rect_) return Poly{{{pairs, 0}, BigInt(1)}};
    int ell = 0;
    for (std::size_t q = 0; q < w.size(); ++q) {
      if (static_cast<int>(q) < partner[q] && w[q].star) ++ell;
    }
    return Poly{{{ell, pairs - ell}, BigInt(1)}};
  }

  Poly step_sym(const Word& w, const std::vector<int>& partner) {
    const Pairing pi = as_pairing(partner);
    const auto xs = crossings(pi);
    if (xs.empty()) return noncrossing(w, partner);
    const Crossing x = xs.front();
    const Segments s = split(w, x);
    const Word t1 = transpose(s.m[1]), t2 = transpose(s.m[2]), t3 = transpose(s.m[3]);

    Poly out;
    add_into(out, reduce(cat({&s.m[0], &s.m[3], &s.m[2], &s.m[1], &s.m[4]})), 0, 0);
    add_into(out, reduce(cat({&s.m[0], &s.m[3], &t1, &t2, &s.m[4]})), 0, 0);
    add_into(out, reduce(cat({&s.m[0], &t2, &t3, &s.m[1], &s.m[4]})), 0, 0);

    const Word trace_word = cat({&t1, &s.m[3]});
    const Word open_word = cat({&s.m[0], &t2, &s.m[4]});
    if (classify_crossing(pi, x, Taxonomy::SelfAdjoint) == CrossingClass::SymType1) {
      const auto [e, f] = straddler(partner, x);
      (void)f;
      const Contracted c = contract(trace_word, open_word, w[e - 1].id);
      add_into(out, reduce(c.direct), 0, 0);
      add_into(out, reduce(c.transposed), 0, 0);
    } else {
      add_into(out, convolve(reduce(trace_word), reduce(open_word)), 0, 1);
    }
    return out;
  }

  Poly step_rect(const Word& w, const std::vector<int>& partner) {
    for (std::size_t q = 1; q < w.size(); ++q) {
      if (w[q].star == w[q - 1].star) throw Error("internal: non-alternating word");
    }
    const Pairing pi = as_pairing(partner);
    const auto xs = crossings(pi);
    if (xs.empty()) return noncrossing(w, partner);
    const Crossing x = xs.front();
    const Segments s = split(w, x);
    const bool ac_same = w[x.i - 1].star == w[x.k - 1].star;
    const bool bd_same = w[x.j - 1].star == w[x.l - 1].star;
    const Word t1 = transpose(s.m[1]), t2 = transpose(s.m[2]), t3 = transpose(s.m[3]);

    if (ac_same && !bd_same) return reduce(cat({&s.m[0], &t2, &t3, &s.m[1], &s.m[4]}));
    if (!ac_same && bd_same) return reduce(cat({&s.m[0], &s.m[3], &t1, &t2, &s.m[4]}));
    if (!ac_same && !bd_same) return reduce(cat({&s.m[0], &s.m[3], &s.m[2], &s.m[1], &s.m[4]}));

    const Word trace_word = cat({&t1, &s.m[3]});
    const Word open_word = cat({&s.m[0], &t2, &s.m[4]});
    if (classify_crossing(pi, x, Taxonomy::Rectangular) == CrossingClass::RectType2) {
      const int id = w[straddler(partner, x).first - 1].id;
      const Contracted c = contract(trace_word, open_word, id);
      bool star_in_trace = false, star_in_open = false;
      for (const auto& l : trace_word)
        if (l.id == id) star_in_trace = l.star;
      for (const auto& l : open_word)
        if (l.id == id) star_in_open = l.star;
      return reduce(star_in_trace == star_in_open ? c.transposed : c.direct);
    }
    // Type 3: sigma_1^2 when the second crossing pair is unstarred, else sigma_2^2.
    const bool d_star = w[x.l - 1].star;
    Poly out;
    add_into(out, convolve(reduce(trace_word), reduce(open_word)), d_star ? 0 : 1,
             d_star ? 1 : 0);
    return out;
  }

  bool rect_;
  std::map<Key, Poly> memo_;
};

Word word_of(const Pairing& pi, bool rectangular) {
  Word w(pi.size());
  for (int q = 1; q <= pi.size(); ++q) {
    w[q - 1] = {std::min(q, pi.partner(q)), rectangular && q % 2 == 0};
  }
  return w;
}

MomentPolynomial table(Kind taxonomy, int p, int cap) {
  if (p < 1) throw Error("order must be positive");
  if (p > cap) {
    throw CapExceeded("p = " + std::to_string(p) + " exceeds reduction cap " +
                      std::to_string(cap));
  }
  const bool rect = taxonomy == Kind::Rectangular;
  Reducer reducer(rect);
  MomentPolynomial poly;
  poly.p = p;
  poly.taxonomy = taxonomy;
  for_each_pairing(
      p, [&](const Pairing& pi) { add_into(poly.coeffs, reducer.reduce(word_of(pi, rect)), 0, 0); },
      std::max(cap, p));
  return poly;
}

MomentPolynomial single(const Pairing& pi, Kind taxonomy) {
  const bool rect = taxonomy == Kind::Rectangular;
  Reducer reducer(rect);
  MomentPolynomial poly;
  poly.p = pi.p();
  poly.taxonomy = taxonomy;
  poly.coeffs = reducer.reduce(word_of(pi, rect));
  return poly;
}

}  // namespace

MomentPolynomial kappa_table_symmetric(int p, int cap) {
  return table(Kind::RealSymmetric, p, cap);
}

MomentPolynomial kappa_table_rectangular(int p, int cap) {
  return table(Kind::Rectangular, p, cap);
}

MomentPolynomial moment_polynomial(Kind taxonomy, int p, int cap) {
  if (taxonomy == Kind::Hermitian) return hermitian_polynomial(p, std::max(cap, kDefaultPairingCap));
  return table(taxonomy, p, cap);
}

MomentPolynomial reduce_pairing_symmetric(const Pairing& pi) {
  return single(pi, Kind::RealSymmetric);
}

MomentPolynomial reduce_pairing_rectangular(const Pairing& pi) {
  return single(pi, Kind::Rectangular);
}

namespace {

MatrixParams<Rational> exact_params(const VarianceProfile& profile) {
  if (profile.has_exact()) return compute_params_exact(profile);
  VarianceProfile q = profile;
  std::vector<Rational> b2(profile.b.size());
  for (std::size_t k = 0; k < b2.size(); ++k) {
    const Rational v(profile.b[k]);
    b2[k] = v * v;
  }
  q.b2_exact = std::move(b2);
  return compute_params_exact(q);
}

Rational qpow(const Rational& x, int e) {
  Rational r = 1;
  for (int q = 0; q < e; ++q) r *= x;
  return r;
}

}  // namespace

ExtremalBound extremal_bound(const VarianceProfile& profile, const MomentPolynomial& poly) {
  if (poly.taxonomy != profile.kind) throw InvalidProfile("polynomial and profile kinds differ");
  const auto mp = exact_params(profile);
  if (mp.sigma_star_sq == 0) throw DegenerateProfile("sigma_* = 0");
  ExtremalBound out;
  out.taxonomy = poly.taxonomy;
  out.p = poly.p;
  const Rational& z = mp.sigma_star_sq;
  const Rational scale = qpow(z, poly.p);
  switch (poly.taxonomy) {
    case Kind::Hermitian: {
      out.value = poly.evaluate(mp.sigma_sq, Rational(0), z);
      out.d1 = ceil(mp.sigma_sq / z);
      out.iid_value = scale * poly.evaluate(Rational(out.d1), Rational(0), Rational(1));
      break;
    }
    case Kind::RealSymmetric: {
      out.value = poly.evaluate(mp.sigma_tilde_sq, mp.sigma_sq, z);
      out.d1 = ceil(mp.sigma_sq / z);
      const Rational d(out.d1);
      out.iid_value = scale * poly.evaluate(Rational(d + 1), d, Rational(1));
      break;
    }
    case Kind::Rectangular: {
      out.value = poly.evaluate(mp.sigma1_sq, mp.sigma2_sq, z);
      out.d1 = ceil(mp.sigma1_sq / z);
      out.d2 = ceil(mp.sigma2_sq / z);
      out.iid_value = scale * poly.evaluate(Rational(out.d1), Rational(out.d2), Rational(1));
      break;
    }
  }
  return out;
}

ExtremalBound extremal_bound(const VarianceProfile& profile, int p, int cap) {
  return extremal_bound(profile, moment_polynomial(profile.kind, p, cap));
}

}  // namespace ermt

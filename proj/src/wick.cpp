#include "ermt/wick.hpp"

#include <algorithm>

namespace ermt {

namespace {

// A word letter chosen at the opening position of a pair. The closing
// position must reuse the same element (a, b) with the complementary
// orientation.
struct Opened {
  std::size_t a = 0;
  std::size_t b = 0;
  int orient = 0;
};

struct Step {
  Opened element;
  std::size_t next;
  Rational weight;  // full pair weight, charged at the opening
};

enum class Model { Hermitian, Symmetric, RectReal, RectComplex };

class WordWalker {
 public:
  WordWalker(const VarianceProfile& prof, Model model, const Pairing& pi)
      : prof_(prof), model_(model), pi_(pi), opened_(pi.size()) {}

  PairingContribution run() {
    PairingContribution out;
    out.pairing = pi_;
    out.dim = prof_.n;
    out.matrix.assign(prof_.n * prof_.n, Rational(0));
    if (model_ == Model::RectComplex) {
      for (int k = 1; k <= pi_.size(); ++k) {
        if ((k + pi_.partner(k)) % 2 == 0) return finish(std::move(out));
      }
    }
    for (std::size_t r = 0; r < prof_.n; ++r) {
      row_ = r;
      dfs(1, r, Rational(1), out);
    }
    return finish(std::move(out));
  }

 private:
  PairingContribution finish(PairingContribution out) {
    Rational sum = 0;
    Rational mx = 0;
    for (std::size_t r = 0; r < out.dim; ++r) {
      sum += out.at(r, r);
      mx = std::max(mx, out.at(r, r));
    }
    out.trace = sum / Rational(static_cast<long>(out.dim));
    out.max_diag = mx;
    return out;
  }

  std::vector<Step> openings(int pos, std::size_t c) const {
    std::vector<Step> steps;
    switch (model_) {
      case Model::Hermitian:
        // eps = 1: U_{c j} with j <= c, moves row c -> column j.
        for (std::size_t j = 0; j <= c; ++j) {
          const Rational& w = prof_.sq_exact(c, j);
          if (w == 0) continue;
          steps.push_back({{c, j, 1}, j, j == c ? Rational(w / 2) : w});
        }
        // eps = *: U_{i c}^* with i >= c, moves row c -> column i.
        for (std::size_t i = c; i < prof_.n; ++i) {
          const Rational& w = prof_.sq_exact(i, c);
          if (w == 0) continue;
          steps.push_back({{i, c, 0}, i, i == c ? Rational(w / 2) : w});
        }
        break;
      case Model::Symmetric:
        for (std::size_t j = 0; j < prof_.n; ++j) {
          const Rational& w = prof_.sq_exact(c, j);
          if (w == 0) continue;
          steps.push_back({{std::min(c, j), std::max(c, j), 0}, j, j == c ? Rational(2 * w) : w});
        }
        break;
      case Model::RectReal:
      case Model::RectComplex:
        if (pos % 2 == 1) {
          for (std::size_t j = 0; j < prof_.m; ++j) {
            const Rational& w = prof_.sq_exact(c, j);
            if (w != 0) steps.push_back({{c, j, 0}, j, w});
          }
        } else {
          for (std::size_t i = 0; i < prof_.n; ++i) {
            const Rational& w = prof_.sq_exact(i, c);
            if (w != 0) steps.push_back({{i, c, 0}, i, w});
          }
        }
        break;
    }
    return steps;
  }

  // Returns the next index, or npos when the closing letter cannot attach.
  std::size_t closing(int pos, const Opened& e, std::size_t c) const {
    constexpr std::size_t npos = static_cast<std::size_t>(-1);
    switch (model_) {
      case Model::Hermitian:
        if (e.orient == 1) return c == e.b ? e.a : npos;  // close with U^*
        return c == e.a ? e.b : npos;                     // close with U
      case Model::Symmetric:
        if (c == e.a) return e.b;
        if (c == e.b) return e.a;
        return npos;
      case Model::RectReal:
      case Model::RectComplex:
        if (pos % 2 == 1) return c == e.a ? e.b : npos;
        return c == e.b ? e.a : npos;
    }
    return npos;
  }

  void dfs(int pos, std::size_t c, const Rational& w, PairingContribution& out) {
    constexpr std::size_t npos = static_cast<std::size_t>(-1);
    if (pos > pi_.size()) {
      if (c < out.dim) out.matrix[row_ * out.dim + c] += w;
      return;
    }
    const int mate = pi_.partner(pos);
    if (mate > pos) {
      for (const Step& s : openings(pos, c)) {
        opened_[mate - 1] = s.element;
        dfs(pos + 1, s.next, w * s.weight, out);
      }
    } else {
      const std::size_t next = closing(pos, opened_[pos - 1], c);
      if (next != npos) dfs(pos + 1, next, w, out);
    }
  }

  const VarianceProfile& prof_;
  Model model_;
  const Pairing& pi_;
  std::vector<Opened> opened_;  // indexed by closing position - 1
  std::size_t row_ = 0;
};

void require(const VarianceProfile& prof, bool ok, const char* what) {
  if (!ok) throw InvalidProfile(what);
  if (!prof.has_exact()) {
    throw InvalidProfile("the Wick oracle needs exact coefficients (give b entries as strings)");
  }
}

Rational sum_over_pairings(const VarianceProfile& prof, Model model, int p, int cap,
                           const ContributionSink& sink) {
  Rational total = 0;
  for_each_pairing(
      p,
      [&](const Pairing& pi) {
        PairingContribution c = WordWalker(prof, model, pi).run();
        total += c.trace;
        if (sink) sink(c);
      },
      cap);
  return total;
}

}  // namespace

PairingContribution contribution_hermitian(const VarianceProfile& profile, const Pairing& pi) {
  require(profile, profile.kind == Kind::Hermitian, "expected a Hermitian profile");
  return WordWalker(profile, Model::Hermitian, pi).run();
}

PairingContribution contribution_symmetric(const VarianceProfile& profile, const Pairing& pi) {
  require(profile, profile.kind == Kind::RealSymmetric, "expected a symmetric profile");
  return WordWalker(profile, Model::Symmetric, pi).run();
}

PairingContribution contribution_rect_real(const VarianceProfile& profile, const Pairing& pi) {
  require(profile, profile.kind == Kind::Rectangular, "expected a rectangular profile");
  return WordWalker(profile, Model::RectReal, pi).run();
}

PairingContribution contribution_rect_complex(const VarianceProfile& profile, const Pairing& pi) {
  require(profile, profile.kind == Kind::Rectangular, "expected a rectangular profile");
  return WordWalker(profile, Model::RectComplex, pi).run();
}

Rational moment_hermitian(const VarianceProfile& profile, int p, int cap,
                          const ContributionSink& sink) {
  require(profile, profile.kind == Kind::Hermitian, "expected a Hermitian profile");
  return sum_over_pairings(profile, Model::Hermitian, p, cap, sink);
}

Rational moment_symmetric(const VarianceProfile& profile, int p, int cap,
                          const ContributionSink& sink) {
  require(profile, profile.kind == Kind::RealSymmetric, "expected a symmetric profile");
  return sum_over_pairings(profile, Model::Symmetric, p, cap, sink);
}

Rational moment_rect_real(const VarianceProfile& profile, int p, int cap,
                          const ContributionSink& sink) {
  require(profile, profile.kind == Kind::Rectangular, "expected a rectangular profile");
  return sum_over_pairings(profile, Model::RectReal, p, cap, sink);
}

Rational moment_rect_complex(const VarianceProfile& profile, int p, int cap) {
  require(profile, profile.kind == Kind::Rectangular, "expected a rectangular profile");
  return sum_over_pairings(profile, Model::RectComplex, p, cap, {});
}

Rational moment_rect_complex(std::size_t n, std::size_t m, int p, int cap) {
  return moment_rect_complex(iid(Kind::Rectangular, n, m), p, cap);
}

Rational wick_moment(const VarianceProfile& profile, int p, int cap) {
  switch (profile.kind) {
    case Kind::Hermitian: return moment_hermitian(profile, p, cap);
    case Kind::RealSymmetric: return moment_symmetric(profile, p, cap);
    case Kind::Rectangular: return moment_rect_real(profile, p, cap);
  }
  return 0;
}

}  // namespace ermt

#pragma once

// Tseitin translation of fixed-width integer terms to CNF. A term's literal
// is true iff its value is true and no arithmetic subterm overflows.

#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "fbd/cdcl.hpp"
#include "fbd/error.hpp"
#include "fbd/term.hpp"

namespace fbd {

class BitBlaster {
public:
  using Lit = cdcl::Lit;
  using Bits = std::vector<Lit>;  // least significant bit first

  BitBlaster(cdcl::Solver& s, Width w) : s_(s), w_(w) {
    true_ = Lit::make(s_.new_var());
    s_.add_clause({true_});
  }

  Width width() const { return w_; }
  Lit true_lit() const { return true_; }
  Lit false_lit() const { return ~true_; }
  Lit constant(bool b) const { return b ? true_ : ~true_; }

  /// Literal equivalent to "t holds".
  Lit encode(const Term& t) {
    if (t->sort() != Sort::boolean) throw std::invalid_argument("encode: boolean term expected");
    auto [v, ovf] = boolean(t);
    return land(v, ~ovf);
  }

  // Gates -----------------------------------------------------------------

  Lit land(Lit a, Lit b) {
    if (a == false_lit() || b == false_lit() || a == ~b) return false_lit();
    if (a == true_) return b;
    if (b == true_ || a == b) return a;
    if (b < a) std::swap(a, b);
    const auto key = std::pair{a.x, b.x};
    if (auto it = and_cache_.find(key); it != and_cache_.end()) return it->second;
    const Lit o = fresh();
    s_.add_clause({~o, a});
    s_.add_clause({~o, b});
    s_.add_clause({o, ~a, ~b});
    and_cache_.emplace(key, o);
    return o;
  }
  Lit lor(Lit a, Lit b) { return ~land(~a, ~b); }

  Lit lxor(Lit a, Lit b) {
    if (a == b) return false_lit();
    if (a == ~b) return true_;
    if (a == false_lit()) return b;
    if (b == false_lit()) return a;
    if (a == true_) return ~b;
    if (b == true_) return ~a;
    bool flip = false;
    if (a.negated()) {
      a = ~a;
      flip = !flip;
    }
    if (b.negated()) {
      b = ~b;
      flip = !flip;
    }
    if (b < a) std::swap(a, b);
    const auto key = std::pair{a.x, b.x};
    Lit o;
    if (auto it = xor_cache_.find(key); it != xor_cache_.end()) {
      o = it->second;
    } else {
      o = fresh();
      s_.add_clause({~o, a, b});
      s_.add_clause({~o, ~a, ~b});
      s_.add_clause({o, ~a, b});
      s_.add_clause({o, a, ~b});
      xor_cache_.emplace(key, o);
    }
    return flip ? ~o : o;
  }

  Lit land(const std::vector<Lit>& xs) {
    Lit acc = true_;
    for (auto x : xs) acc = land(acc, x);
    return acc;
  }
  Lit lor(const std::vector<Lit>& xs) {
    Lit acc = false_lit();
    for (auto x : xs) acc = lor(acc, x);
    return acc;
  }

  /// Unsigned a <= k for a constant k (bits beyond a's width are zero).
  Lit ule_const(const Bits& a, std::uint64_t k) {
    // Scan from the least significant bit: le holds for the suffix seen so far.
    Lit le = true_;
    for (std::size_t i = 0; i < a.size(); ++i) {
      const bool kb = i < 64 && ((k >> i) & 1U);
      le = kb ? lor(~a[i], le) : land(~a[i], le);
    }
    if (a.size() < 64 && (k >> a.size()) != 0) return true_;
    return le;
  }

  /// Unsigned sum of two bit vectors, widened by one bit.
  Bits add_unsigned(const Bits& a, const Bits& b) {
    const std::size_t n = std::max(a.size(), b.size());
    Bits out;
    Lit carry = false_lit();
    for (std::size_t i = 0; i < n; ++i) {
      const Lit x = i < a.size() ? a[i] : false_lit();
      const Lit y = i < b.size() ? b[i] : false_lit();
      auto [sum, c] = full_add(x, y, carry);
      out.push_back(sum);
      carry = c;
    }
    out.push_back(carry);
    while (out.size() > 1 && out.back() == false_lit()) out.pop_back();
    return out;
  }

  // Model read-back --------------------------------------------------------

  std::int64_t int_value(const std::string& name) const {
    const auto& bits = ints_.at(name);
    std::uint64_t u = 0;
    for (std::size_t i = 0; i < bits.size(); ++i)
      if (s_.model_value(bits[i])) u |= std::uint64_t{1} << i;
    return w_.wrap(static_cast<std::int64_t>(u));
  }
  bool bool_value(const std::string& name) const { return s_.model_value(bools_.at(name)); }
  const std::map<std::string, Bits>& int_vars() const { return ints_; }
  const std::map<std::string, Lit>& bool_vars() const { return bools_; }

private:
  struct Word {
    Bits bits;
    Lit ovf;
  };
  struct BoolResult {
    Lit value;
    Lit ovf;
  };

  Lit fresh() { return Lit::make(s_.new_var()); }

  std::pair<Lit, Lit> full_add(Lit a, Lit b, Lit c) {
    const Lit ab = lxor(a, b);
    return {lxor(ab, c), lor(land(a, b), land(c, ab))};
  }

  Bits const_bits(std::int64_t v, std::size_t n) const {
    Bits out;
    const auto u = static_cast<std::uint64_t>(v);
    for (std::size_t i = 0; i < n; ++i) out.push_back(constant(i < 64 ? ((u >> i) & 1U) : (v < 0)));
    return out;
  }

  const Bits& int_var(const std::string& name) {
    auto it = ints_.find(name);
    if (it != ints_.end()) return it->second;
    Bits b;
    for (int i = 0; i < w_.bits; ++i) b.push_back(fresh());
    return ints_.emplace(name, std::move(b)).first->second;
  }

  Lit bool_var(const std::string& name) {
    auto it = bools_.find(name);
    if (it != bools_.end()) return it->second;
    return bools_.emplace(name, fresh()).first->second;
  }

  // Returns (sum bits, carry out) of a + b + cin over equal widths.
  std::pair<Bits, Lit> adder(const Bits& a, const Bits& b, Lit cin) {
    Bits out;
    Lit carry = cin;
    for (std::size_t i = 0; i < a.size(); ++i) {
      auto [s, c] = full_add(a[i], b[i], carry);
      out.push_back(s);
      carry = c;
    }
    return {out, carry};
  }

  Word word(const Term& t) {
    if (auto it = words_.find(t.get()); it != words_.end()) return it->second;
    const auto n = static_cast<std::size_t>(w_.bits);
    Word r;
    switch (t->op()) {
      case Op::int_const:
        r = Word{const_bits(w_.wrap(t->value()), n), constant(!w_.fits(t->value()))};
        break;
      case Op::int_var: r = Word{int_var(t->name()), false_lit()}; break;
      case Op::neg: {
        auto a = word(t->arg(0));
        Bits inv;
        for (auto b : a.bits) inv.push_back(~b);
        auto [sum, c] = adder(inv, const_bits(0, n), true_);
        (void)c;
        // Negation overflows only on the minimum value.
        Bits low(a.bits.begin(), a.bits.end() - 1);
        Lit is_min = land(a.bits.back(), ~lor(low));
        r = Word{sum, lor(a.ovf, is_min)};
        break;
      }
      case Op::add:
      case Op::sub: {
        auto a = word(t->arg(0));
        auto b = word(t->arg(1));
        const bool is_sub = t->op() == Op::sub;
        Bits rhs = b.bits;
        if (is_sub)
          for (auto& x : rhs) x = ~x;
        auto [sum, c] = adder(a.bits, rhs, constant(is_sub));
        (void)c;
        const Lit sa = a.bits.back(), sb = rhs.back(), sr = sum.back();
        const Lit ovf = land(~lxor(sa, sb), lxor(sr, sa));
        r = Word{sum, lor(lor(a.ovf, b.ovf), ovf)};
        break;
      }
      case Op::mul: {
        auto a = word(t->arg(0));
        auto b = word(t->arg(1));
        const std::size_t m = 2 * n;
        Bits ax = a.bits, bx = b.bits;
        while (ax.size() < m) ax.push_back(a.bits.back());
        while (bx.size() < m) bx.push_back(b.bits.back());
        Bits acc = const_bits(0, m);
        for (std::size_t i = 0; i < m; ++i) {
          if (bx[i] == false_lit()) continue;
          Bits partial(m, false_lit());
          for (std::size_t j = 0; i + j < m; ++j) partial[i + j] = land(ax[j], bx[i]);
          acc = adder(acc, partial, false_lit()).first;
        }
        // The exact product fits in 2n bits; it fits in n bits iff the top n+1 bits agree.
        Lit ovf = false_lit();
        for (std::size_t i = n; i < m; ++i) ovf = lor(ovf, lxor(acc[i], acc[n - 1]));
        r = Word{Bits(acc.begin(), acc.begin() + static_cast<std::ptrdiff_t>(n)), lor(lor(a.ovf, b.ovf), ovf)};
        break;
      }
      default: throw std::invalid_argument("bitblast: integer term expected");
    }
    keep_.push_back(t);
    words_.emplace(t.get(), r);
    return r;
  }

  // Signed a < b.
  Lit slt(const Bits& a, const Bits& b) {
    Lit lt = false_lit();
    for (std::size_t i = 0; i < a.size(); ++i) {
      Lit x = a[i], y = b[i];
      if (i + 1 == a.size()) std::swap(x, y);  // sign bit has inverted weight
      lt = lor(land(~x, y), land(~lxor(x, y), lt));
    }
    return lt;
  }

  Lit equal(const Bits& a, const Bits& b) {
    Lit acc = true_;
    for (std::size_t i = 0; i < a.size(); ++i) acc = land(acc, ~lxor(a[i], b[i]));
    return acc;
  }

  BoolResult boolean(const Term& t) {
    if (auto it = bools_cache_.find(t.get()); it != bools_cache_.end()) return it->second;
    BoolResult r{false_lit(), false_lit()};
    switch (t->op()) {
      case Op::bool_const: r = {constant(t->truth()), false_lit()}; break;
      case Op::bool_var: r = {bool_var(t->name()), false_lit()}; break;
      case Op::eq:
      case Op::ne:
      case Op::lt:
      case Op::le:
      case Op::gt:
      case Op::ge: {
        auto a = word(t->arg(0));
        auto b = word(t->arg(1));
        Lit v;
        switch (t->op()) {
          case Op::eq: v = equal(a.bits, b.bits); break;
          case Op::ne: v = ~equal(a.bits, b.bits); break;
          case Op::lt: v = slt(a.bits, b.bits); break;
          case Op::le: v = ~slt(b.bits, a.bits); break;
          case Op::gt: v = slt(b.bits, a.bits); break;
          default: v = ~slt(a.bits, b.bits); break;
        }
        r = {v, lor(a.ovf, b.ovf)};
        break;
      }
      case Op::lnot: {
        auto a = boolean(t->arg(0));
        r = {~a.value, a.ovf};
        break;
      }
      case Op::land:
      case Op::lor: {
        std::vector<Lit> vals, ovfs;
        for (const auto& a : t->args()) {
          auto x = boolean(a);
          vals.push_back(x.value);
          ovfs.push_back(x.ovf);
        }
        r = {t->op() == Op::land ? land(vals) : lor(vals), lor(ovfs)};
        break;
      }
      case Op::iff:
      case Op::implies: {
        auto a = boolean(t->arg(0));
        auto b = boolean(t->arg(1));
        const Lit v = t->op() == Op::iff ? ~lxor(a.value, b.value) : lor(~a.value, b.value);
        r = {v, lor(a.ovf, b.ovf)};
        break;
      }
      case Op::when: {
        auto pc = boolean(t->arg(0));
        auto c = boolean(t->arg(1));
        r = {c.value, lor(pc.ovf, land(pc.value, c.ovf))};
        break;
      }
      default: throw std::invalid_argument("bitblast: boolean term expected");
    }
    keep_.push_back(t);
    bools_cache_.emplace(t.get(), r);
    return r;
  }

  struct PairHash {
    std::size_t operator()(const std::pair<int, int>& p) const {
      return std::hash<std::int64_t>{}((static_cast<std::int64_t>(p.first) << 32) ^ p.second);
    }
  };

  cdcl::Solver& s_;
  Width w_;
  Lit true_;
  std::map<std::string, Bits> ints_;
  std::map<std::string, Lit> bools_;
  std::unordered_map<std::pair<int, int>, Lit, PairHash> and_cache_;
  std::unordered_map<std::pair<int, int>, Lit, PairHash> xor_cache_;
  std::unordered_map<const Node*, Word> words_;
  std::unordered_map<const Node*, BoolResult> bools_cache_;
  std::vector<Term> keep_;
};

}  // namespace fbd

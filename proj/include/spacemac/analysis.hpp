#pragma once

// Closed-form calculators: the two non-repudiation probability bounds
// (malicious child disparaging a parent; malicious parent sabotaging a
// child's report) and the per-packet communication / computation
// overhead formulas of this scheme and the two baselines it is compared
// against. Binomials are exact 64-bit integers; probabilities evaluate
// in long double.

#include <cmath>
#include <stdexcept>
#include <string>

#include "spacemac/combin.hpp"

namespace spacemac::analysis {

struct SchemeParams {
  unsigned q = 256;       // field size
  unsigned n = 1024;      // payload symbols
  unsigned m = 32;        // generation size
  unsigned w = 4;         // average packets combined per node
  unsigned l = 1;         // parallel detection tag instances
  unsigned lambda = 19;   // locating tags per packet
  unsigned delta = 9;     // child-verifiable subset
  unsigned theta = 3;     // controller acceptance threshold
  unsigned ell = 9;       // network level (baseline formulas)
  unsigned cover_x = 49;  // |X| of the cover-free family baseline
  unsigned cover_b = 7;   // |B| of the cover-free family baseline
  unsigned c = 2;         // collusion parameter of that baseline
};

inline void validate(const SchemeParams& p) {
  auto need = [](bool ok, const char* field) {
    if (!ok)
      throw std::invalid_argument(std::string("SchemeParams: invalid ") +
                                  field);
  };
  need(p.q >= 2, "q");
  need(p.n >= 1, "n");
  need(p.m >= 1, "m");
  need(p.w >= 1, "w");
  need(p.l >= 1, "l");
  need(p.lambda >= 2, "lambda");
  need(p.delta >= 1 && p.delta < p.lambda, "delta");
  need(p.theta >= 1 && p.theta <= p.lambda - p.delta, "theta");
  need(p.ell >= 1, "ell");
  need(p.cover_x >= 1, "cover_x");
  need(p.cover_b >= 1, "cover_b");
}

// Probability that a child reporting a vector its parent never sent
// gets at least theta of the lambda - delta controller-checked tags
// accepted: sum_{i=theta}^{lambda-delta} C(lambda-delta, i) q^-i
// (1 - 1/q)^(lambda-delta-i).
inline double lemma4_prob(const SchemeParams& p) {
  validate(p);
  const unsigned rest = p.lambda - p.delta;
  const long double inv_q = 1.0L / p.q;
  long double sum = 0.0L;
  for (unsigned i = p.theta; i <= rest; ++i)
    sum += static_cast<long double>(combin::binomial(rest, i)) *
           std::pow(inv_q, static_cast<int>(i)) *
           std::pow(1.0L - inv_q, static_cast<int>(rest - i));
  return static_cast<double>(sum);
}

// One term of the sender-sabotage bound: probability weight when the
// parent computes exactly x of the lambda tags honestly.
inline double lemma5_px(const SchemeParams& p, unsigned x) {
  validate(p);
  if (x > p.lambda)
    throw std::invalid_argument("lemma5_px: x out of range");
  const unsigned lo = (x + 1 > p.theta) ? x - p.theta + 1 : 0;
  const unsigned hi = std::min(p.delta, x);
  const long double inv_q = 1.0L / p.q;
  long double sum = 0.0L;
  for (unsigned i = lo; i <= hi; ++i) {
    if (x - i > p.lambda - p.delta) continue;
    long double term =
        static_cast<long double>(combin::binomial(p.delta, i)) *
        static_cast<long double>(combin::binomial(p.lambda - p.delta, x - i));
    term /= static_cast<long double>(combin::binomial(p.lambda, x));
    term *= std::pow(inv_q, static_cast<int>(p.delta - i));
    sum += term;
  }
  return static_cast<double>(std::min(sum, 1.0L));
}

// Probability that a malicious parent, by corrupting some of the lambda
// tags it sends, gets its child's (honestly combined) report rejected:
// max over x in [0, delta + theta - 1] of p(x).
inline double lemma5_prob(const SchemeParams& p) {
  validate(p);
  double best = 0.0;
  for (unsigned x = 0; x < p.delta + p.theta; ++x)
    best = std::max(best, lemma5_px(p, x));
  return best;
}

enum class Scheme { ours, ripple, broadcast, ours_locating, ours_full };

inline Scheme scheme_from_name(std::string_view name) {
  if (name == "ours") return Scheme::ours;
  if (name == "ripple") return Scheme::ripple;
  if (name == "broadcast") return Scheme::broadcast;
  if (name == "ours_locating") return Scheme::ours_locating;
  if (name == "ours_full") return Scheme::ours_full;
  throw std::invalid_argument("unknown scheme: " + std::string(name));
}

inline unsigned log2_ceil(unsigned q) {
  unsigned bits = 0;
  unsigned v = q - 1;
  while (v != 0) {
    ++bits;
    v >>= 1;
  }
  return bits;
}

// Per-packet tag bandwidth in bits. The cover-free baseline carries
// |X| tags on the wire even though each node verifies only |B|; its
// published table prints the |B| form, which comm_overhead_published
// reproduces for the comparison output.
inline double comm_overhead_bits(Scheme s, const SchemeParams& p) {
  validate(p);
  const double sym = log2_ceil(p.q);
  switch (s) {
    case Scheme::ours: return 3.0 * sym;
    case Scheme::ripple: return p.ell / 2.0 * sym;
    case Scheme::broadcast: return static_cast<double>(p.cover_x) * sym;
    case Scheme::ours_locating: return static_cast<double>(p.lambda) * sym;
    case Scheme::ours_full: return (3.0 + p.lambda) * sym;
  }
  throw std::invalid_argument("unknown scheme");
}

inline double comm_overhead_published_bits(Scheme s, const SchemeParams& p) {
  if (s == Scheme::broadcast) return static_cast<double>(p.cover_b) *
                                     log2_ceil(p.q);
  return comm_overhead_bits(s, p);
}

// Per-packet, per-node finite field multiplications.
inline double comp_overhead_mults(Scheme s, const SchemeParams& p) {
  validate(p);
  const double n2m = static_cast<double>(p.n) + 2.0 * p.m;
  switch (s) {
    case Scheme::ours: return 3.0 * n2m + p.w;
    case Scheme::ours_locating:
      return (static_cast<double>(p.delta) + p.lambda) * n2m;
    case Scheme::ours_full:
      return (3.0 + p.delta + p.lambda) * n2m + p.w;
    case Scheme::ripple:
      return p.w * (p.ell - 1) / 2.0 +
             (static_cast<double>(p.n) + p.m + (p.ell - 1) / 2.0);
    case Scheme::broadcast:
      return static_cast<double>(p.w) * p.cover_x + p.cover_b * n2m;
  }
  throw std::invalid_argument("unknown scheme");
}

// The published comparison table lists 1,096 multiplications for the
// level-based baseline, but its stated closed form evaluates to 1,076
// at these parameters. The calculator implements the formula; callers
// can surface the reference value with a mismatch flag.
inline constexpr double kRipplePublishedMults = 1096.0;

}  // namespace spacemac::analysis

#pragma once

// Generation-based random linear network coding: source augmentation,
// recoding, Gaussian-elimination decoding, and the subspace predicates
// used for pollution checks and subspace reporting.

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "spacemac/detail/rng.hpp"
#include "spacemac/gf.hpp"
#include "spacemac/mac.hpp"

namespace spacemac::rlnc {

struct Generation {
  SpaceId id;
  std::size_t n = 0;
  std::size_t m = 0;
  std::vector<gf::FieldVector> payloads;  // m vectors of length n
  std::vector<gf::FieldVector> packets;   // m augmented vectors, length n+m
};

// Source packet i is payload_i followed by the unit coefficient vector
// e_i, so the last m symbols of every honest combination carry the
// global coding coefficients.
inline Generation augment(std::vector<gf::FieldVector> payloads,
                          const SpaceId& id) {
  if (payloads.empty())
    throw std::invalid_argument("augment: no payloads");
  const std::size_t m = payloads.size();
  const std::size_t n = payloads[0].size();
  if (n == 0) throw std::invalid_argument("augment: empty payload");
  Generation g;
  g.id = id;
  g.n = n;
  g.m = m;
  g.packets.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    if (payloads[i].size() != n)
      throw std::invalid_argument("augment: payload length mismatch");
    gf::FieldVector pkt(n + m, 0);
    std::copy(payloads[i].begin(), payloads[i].end(), pkt.begin());
    pkt[n + i] = 1;
    g.packets.push_back(std::move(pkt));
  }
  g.payloads = std::move(payloads);
  return g;
}

inline gf::FieldVector recode(std::span<const gf::FieldVector> packets,
                              std::span<const gf::FieldElement> coeffs) {
  if (packets.empty()) throw std::invalid_argument("recode: empty buffer");
  if (packets.size() != coeffs.size())
    throw std::invalid_argument("recode: coefficient count mismatch");
  gf::FieldVector out(packets[0].size(), 0);
  for (std::size_t i = 0; i < packets.size(); ++i) {
    if (packets[i].size() != out.size())
      throw std::invalid_argument("recode: packet length mismatch");
    gf::axpy(out, coeffs[i], packets[i]);
  }
  return out;
}

struct DecodeOutcome {
  enum class Status { ok, insufficient_rank, inconsistent };
  Status status = Status::insufficient_rank;
  std::size_t rank = 0;
  std::vector<gf::FieldVector> payloads;  // present iff status == ok
};

// Gaussian elimination on the coefficient block. Recovers the original
// payloads when the coefficient submatrix reaches rank m; an all-zero
// coefficient row with nonzero payload residue means corrupted input.
inline DecodeOutcome decode(std::span<const gf::FieldVector> packets,
                            std::size_t n, std::size_t m) {
  const std::size_t len = n + m;
  std::vector<gf::FieldVector> rows;
  rows.reserve(packets.size());
  DecodeOutcome out;
  for (const auto& p : packets) {
    if (p.size() != len)
      throw std::invalid_argument("decode: packet length mismatch");
    gf::FieldVector r(p);
    // Reduce the coefficient block against accepted rows.
    for (const auto& row : rows) {
      std::size_t pivot = 0;
      while (row[n + pivot] == 0) ++pivot;
      if (r[n + pivot] != 0) gf::axpy(r, r[n + pivot], row);
    }
    std::size_t pivot = m;
    for (std::size_t j = 0; j < m; ++j)
      if (r[n + j] != 0) {
        pivot = j;
        break;
      }
    if (pivot == m) {
      if (!gf::is_zero(r)) {
        out.status = DecodeOutcome::Status::inconsistent;
        out.rank = rows.size();
        return out;
      }
      continue;  // redundant packet
    }
    gf::scale(r, gf::inv(r[n + pivot]));
    for (auto& row : rows)
      if (row[n + pivot] != 0) gf::axpy(row, row[n + pivot], r);
    rows.push_back(std::move(r));
  }
  out.rank = rows.size();
  if (rows.size() < m) {
    out.status = DecodeOutcome::Status::insufficient_rank;
    return out;
  }
  out.status = DecodeOutcome::Status::ok;
  out.payloads.assign(m, {});
  for (const auto& row : rows) {
    std::size_t pivot = 0;
    while (row[n + pivot] == 0) ++pivot;
    out.payloads[pivot].assign(row.begin(),
                               row.begin() + static_cast<std::ptrdiff_t>(n));
  }
  return out;
}

// True iff packet equals the combination of the source packets named by
// its own trailing coefficients: one pass, m*(n+m) multiplications, no
// elimination.
inline bool in_source_space(const Generation& g,
                            std::span<const gf::FieldElement> packet) {
  const std::size_t len = g.n + g.m;
  if (packet.size() != len)
    throw std::invalid_argument("in_source_space: length mismatch");
  gf::FieldVector expect(len, 0);
  for (std::size_t i = 0; i < g.m; ++i)
    gf::axpy(expect, packet[g.n + i], g.packets[i]);
  for (std::size_t i = 0; i < len; ++i)
    if (expect[i] != packet[i]) return false;
  return true;
}

struct SpanSample {
  gf::FieldVector vector;
  gf::FieldVector coeffs;  // the alphas, needed to combine tags alongside
};

// Uniform coefficients over the whole field, zero included; the sample
// is always in the span of the inputs.
inline SpanSample sample_space(std::span<const gf::FieldVector> packets,
                               Rng& rng) {
  if (packets.empty())
    throw std::invalid_argument("sample_space: empty input");
  SpanSample s;
  s.coeffs.resize(packets.size());
  for (auto& c : s.coeffs) c = rng.byte();
  s.vector = recode(packets, s.coeffs);
  return s;
}

}  // namespace spacemac::rlnc

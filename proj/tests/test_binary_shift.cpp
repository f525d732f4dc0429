#include <cmath>

#include "doctest.h"
#include "nce/binary_shift.hpp"
#include "nce/entropy.hpp"

using namespace nce;

namespace {

// Brute-force kernel count of the Toeplitz form: independent oracle for the
// elimination (n <= 14).
int nullity_brute(const ToeplitzForm& t) {
  long long count = 0;
  for (std::uint32_t v = 0; v < (1u << t.n); ++v) {
    bool in_kernel = true;
    for (int r = 0; r < t.n && in_kernel; ++r) {
      if (std::popcount(t.rows[r] & v) & 1) in_kernel = false;
    }
    if (in_kernel) ++count;
  }
  int c = 0;
  while ((1LL << c) < count) ++c;
  REQUIRE((1LL << c) == count);
  return c;
}

}  // namespace

TEST_CASE("bitstream parsing and the period report") {
  CHECK_THROWS_AS((void)Bitstream::parse("01x"), schema_error);
  CHECK_THROWS_AS((void)Bitstream::parse(""), schema_error);
  // -X u {0} u X for X = odds is aperiodic (0 is in the set, 0 + 2 is not).
  Bitstream odds = Bitstream::parse("1010101010");
  CHECK_FALSE(odds.smallest_consistent_period().has_value());
  // X = N makes the set all of Z: period 1 is consistent with the window.
  Bitstream all = Bitstream::parse("1111111111");
  REQUIRE(all.smallest_consistent_period().has_value());
  CHECK(*all.smallest_consistent_period() == 1);
  Bitstream x1 = Bitstream::parse("1000000");
  CHECK_FALSE(x1.smallest_consistent_period().has_value());
}

TEST_CASE("gf2 elimination agrees with the brute-force kernel oracle") {
  Rng rng(13);
  for (int trial = 0; trial < 40; ++trial) {
    std::string s;
    for (int i = 0; i < 11; ++i) s.push_back(rng.integer(2) ? '1' : '0');
    Bitstream b;
    try {
      b = Bitstream::parse(s);
    } catch (const schema_error&) {
      continue;
    }
    for (int n = 1; n <= 12; ++n) {
      const ToeplitzForm t = ToeplitzForm::build(b, n);
      CHECK(gf2_nullity(t) == nullity_brute(t));
    }
  }
}

TEST_CASE("structure sequence: n = 1 and the X = {1} ladder") {
  Bitstream b = Bitstream::parse("1000000000000000");
  StructureSequence seq = structure_sequence(b, 16);
  CHECK(seq.rows[0].c == 1);
  CHECK(seq.rows[0].d == 0);
  CHECK(seq.rows[0].h == doctest::Approx(std::log(2.0)));

  CHECK(seq.rows[3].c == 0);  // n = 4
  CHECK(seq.rows[3].d == 2);
  CHECK(seq.rows[3].h == doctest::Approx(2.0 * std::log(2.0)));
  CHECK(seq.rows[4].c == 1);  // n = 5

  const double half = 0.5 * std::log(2.0);
  double min_mean = 1e9;
  for (const auto& row : seq.rows) {
    if (row.c == 0) CHECK(std::abs(row.mean - half) <= 1e-15);
    min_mean = std::min(min_mean, row.mean);
    CHECK(row.n == 2 * row.d + row.c);
    // (9.6) as an algebraic bound: the mean exceeds half log 2 by at most
    // (c/n) log 2.
    CHECK(row.mean - half <= (double(row.c) / row.n) * std::log(2.0) + 1e-15);
    CHECK(row.mean >= half - 1e-15);
  }
  CHECK(std::abs(min_mean - half) <= 1e-15);
  CHECK(seq.rows.back().min_mean_so_far == doctest::Approx(min_mean));
}

TEST_CASE("structure sequence rejects untrustworthy windows") {
  Bitstream b = Bitstream::parse("101");
  CHECK_NOTHROW((void)structure_sequence(b, 4));
  CHECK_THROWS_AS((void)structure_sequence(b, 5), guard_error);
}

TEST_CASE("concatenation parse: simple streams and the X = {2} doubles") {
  Bitstream x1 = Bitstream::parse("10000000");
  auto p1 = concatenation_decomposition(structure_sequence(x1, 8).c_sequence());
  REQUIRE(p1.m_values.size() == 4);
  for (int m : p1.m_values) CHECK(m == 1);
  CHECK(p1.residual_tail.empty());

  Bitstream x2 = Bitstream::parse("0100000");
  auto p2 = concatenation_decomposition(structure_sequence(x2, 8).c_sequence());
  REQUIRE(p2.m_values.size() == 2);
  for (int m : p2.m_values) CHECK(m == 2);

  CHECK(concatenation_decomposition({}).m_values.empty());
  CHECK_THROWS_AS((void)concatenation_decomposition({2, 1}), invariant_error);

  // Residual tail: X = {2} truncated mid-string.
  Bitstream x2t = Bitstream::parse("01000");
  auto pt = concatenation_decomposition(structure_sequence(x2t, 6).c_sequence());
  REQUIRE(pt.m_values.size() == 1);
  CHECK(pt.m_values[0] == 2);
  REQUIRE(pt.residual_tail.size() == 2);
  CHECK(pt.residual_tail[0] == 1);
  CHECK(pt.residual_tail[1] == 2);
}

TEST_CASE("sign strings: Pauli pair, commuting pair, trace of products") {
  Bitstream anti = Bitstream::parse("1");
  SignStringRealization r1 = sign_string_realization(anti, 2, true);
  CHECK(r1.qubits == 1);
  CHECK(max_abs(r1.dense[0] * r1.dense[1] + r1.dense[1] * r1.dense[0]) <= 1e-12);

  Bitstream comm = Bitstream::parse("0");
  SignStringRealization r0 = sign_string_realization(comm, 2, true);
  CHECK(max_abs(r0.dense[0] * r0.dense[1] - r0.dense[1] * r0.dense[0]) <= 1e-12);
  CHECK(std::abs((r0.dense[0] * r0.dense[1]).trace()) <= 1e-12);
}

TEST_CASE("sign strings: X = {2} pattern verified on all pairs at n = 6") {
  Bitstream b = Bitstream::parse("01000");
  SignStringRealization r = sign_string_realization(b, 6, true);
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < i; ++j) {
      CHECK(r.symplectic(i, j) == b.bit(i - j));
      const double sign = b.bit(i - j) ? -1.0 : 1.0;
      CHECK(max_abs(r.dense[i] * r.dense[j] - sign * r.dense[j] * r.dense[i]) <=
            1e-10);
    }
  }
}

TEST_CASE("center oracle: tiny cases and agreement across random streams") {
  Bitstream one = Bitstream::parse("1");
  SignStringRealization r1 = sign_string_realization(one, 1, false);
  CHECK(center_dimension_oracle(r1) == 1);

  Bitstream x1 = Bitstream::parse("100000000000");
  CHECK(center_dimension_oracle(sign_string_realization(x1, 4, false)) == 0);
  CHECK(center_dimension_oracle(sign_string_realization(x1, 5, false)) == 1);

  Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    std::string s;
    for (int i = 0; i < 11; ++i) s.push_back(rng.integer(2) ? '1' : '0');
    Bitstream b;
    try {
      b = Bitstream::parse(s);
    } catch (const schema_error&) {
      continue;
    }
    StructureSequence seq = structure_sequence(b, 12);
    for (const auto& row : seq.rows) {
      SignStringRealization r = sign_string_realization(b, row.n, false);
      CHECK(center_dimension_oracle(r) == row.c);
    }
  }
}

TEST_CASE("dense-mode center matches 2^c numerically") {
  // The center of the numerically generated algebra has dimension 2^{c_n}.
  for (const char* bits : {"10000", "01000"}) {
    Bitstream b = Bitstream::parse(bits);
    StructureSequence seq = structure_sequence(b, 5);
    for (int n = 3; n <= 5; ++n) {
      SignStringRealization r = sign_string_realization(b, n, true);
      const int dim = 1 << r.qubits;
      if (dim > 16) continue;  // keep the closure cheap
      const TraceFunctional tau = TraceFunctional::uniform(dim);
      StarSubalgebra alg = generated_algebra(
          std::vector<Matrix>(r.dense.begin(), r.dense.begin() + n), tau, 512);
      CHECK(alg.dim() == (1 << n));
      CHECK(static_cast<int>(alg.central_projections.size()) ==
            (1 << seq.rows[n - 1].c));
    }
  }
}

TEST_CASE("rank identity: H = log rank") {
  Bitstream b = Bitstream::parse("1100000000");
  StructureSequence seq = structure_sequence(b, 10);
  for (const auto& row : seq.rows) {
    const double log_rank = (row.c + row.d) * std::log(2.0);
    CHECK(row.h == doctest::Approx(log_rank).epsilon(1e-15));
  }
}

TEST_CASE("genperm multiplication is exact on Pauli words") {
  Bitstream b = Bitstream::parse("10101");
  SignStringRealization r = sign_string_realization(b, 5, true);
  const Matrix direct = r.dense[0] * r.dense[3];
  CHECK(max_abs(genperm_multiply(r.dense[0], r.dense[3]) - direct) <= 1e-14);
}

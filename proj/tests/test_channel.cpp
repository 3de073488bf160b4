#include "doctest.h"

#include "framedual/channel.hpp"
#include "framedual/fixtures.hpp"
#include "helpers.hpp"

using namespace framedual;
using testutil::e112;
using testutil::random_vector;
using testutil::thrown_code;

TEST_CASE("random_erasure samples ascending k-subsets deterministically") {
  auto e = random_erasure(10, 9, 3);
  CHECK(e.k() == 9);
  CHECK(e.complement().size() == 1);

  auto a = random_erasure(30, 5, 42);
  auto b = random_erasure(30, 5, 42);
  CHECK(a.erased() == b.erased());
  CHECK(std::is_sorted(a.erased().begin(), a.erased().end()));

  auto c = random_erasure(30, 5, 43);
  CHECK(a.erased() != c.erased());

  CHECK(thrown_code([] { random_erasure(10, 0, 1); }) == Errc::BadK);
  CHECK(thrown_code([] { random_erasure(10, 10, 1); }) == Errc::BadK);
}

TEST_CASE("random_erasure regression fixture") {
  // Frozen output of the shipped generator for N=10, k=3, seed=7.
  auto e = random_erasure(10, 3, 7);
  CHECK(e.erased_one_based() == std::vector<std::int64_t>{5, 8, 10});
}

TEST_CASE("transmit reports MRC violations without recovering") {
  auto basis = make_frame<double>(MatrixX<double>::Identity(3, 3));
  auto pair = canonical_dual(basis);
  VectorX<double> h(3);
  h << 1, 2, 3;
  auto report = transmit(pair, ErasureSet(3, {1}), h, Method::GramSolve);
  CHECK(report.status == TransmitStatus::MrcViolated);
  CHECK_FALSE(report.mrc_ok);
  nlohmann::json j = report.to_json();
  CHECK(j["status"] == "mrc_violated");
  CHECK_FALSE(j.contains("recon_error_rel"));
}

TEST_CASE("transmit recovers the hand example under every method") {
  auto f = make_frame<double>(e112<double>());
  auto pair = canonical_dual(f);
  VectorX<double> h(2);
  h << 3, 4;
  for (Method m : {Method::Iterative, Method::GramSolve, Method::OperatorInverse}) {
    auto report = transmit(pair, ErasureSet(3, {0}), h, m);
    REQUIRE(report.status == TransmitStatus::Recovered);
    CHECK(report.mrc_ok);
    CHECK(report.recon_error_rel <= 1e-12);
    CHECK(report.signal_norm == doctest::Approx(5.0));
    nlohmann::json j = report.to_json();
    CHECK(j["erased"] == nlohmann::json::array({1}));
    CHECK(j["method"] == method_name(m));
  }
}

TEST_CASE("transmit surfaces construction failures in the report") {
  auto pair = tripled_basis_counterexample<double>(4);
  VectorX<double> h = VectorX<double>::Ones(4);
  ErasureSet first(pair.frame.count(), {0});
  auto report = transmit(pair, first, h, Method::Iterative);
  CHECK(report.status == TransmitStatus::ConstructionFailed);
  CHECK(report.mrc_ok);
  CHECK(report.failure_kind == ReduceStatus::DenominatorVanishes);
  CHECK(report.failure_step == 1);
  nlohmann::json j = report.to_json();
  CHECK(j["failure"]["kind"] == "denominator_vanishes");
  CHECK(j["failure"]["step"] == 1);
}

TEST_CASE("zero signal transmits with zero error") {
  auto f = make_frame<double>(e112<double>());
  auto pair = canonical_dual(f);
  VectorX<double> zero = VectorX<double>::Zero(2);
  auto report = transmit(pair, ErasureSet(3, {0}), zero, Method::Iterative);
  CHECK(report.status == TransmitStatus::Recovered);
  CHECK(report.recon_error_rel == 0.0);
  CHECK(report.signal_norm == 0.0);
}

TEST_CASE("a report never claims recovery when the MRC fails") {
  Rng rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    const Index r = 2 + rng.below(6);
    auto basis = random_frame<double>(r, r, rng.bits());
    auto pair = canonical_dual(basis);
    auto erasure = random_erasure(r, 1 + rng.below(r - 1), rng.bits());
    VectorX<double> h = random_vector<double>(rng, r);
    auto report = transmit(pair, erasure, h, Method::GramSolve);
    CHECK_FALSE(report.mrc_ok);
    CHECK(report.status == TransmitStatus::MrcViolated);
  }
}

template <class S>
static void check_randomized_recovery(std::uint64_t seed, int trials) {
  Rng rng(seed);
  const Method methods[] = {Method::Iterative, Method::GramSolve,
                            Method::OperatorInverse};
  for (int trial = 0; trial < trials; ++trial) {
    const Index r = 4 + rng.below(12);
    const Index n = r + 2 + rng.below(2 * r);
    auto f = random_frame<S>(r, n, rng.bits());
    auto canon = canonical_dual(f);
    DualPair<S> pair =
        (trial % 2) ? random_dual(canon, rng.bits(), 1.0) : canon;
    const Index max_k = std::min<Index>(n - r, 6);
    ErasureSet erasure = random_erasure(n, 1 + rng.below(max_k), rng.bits());
    if (!mrc_check(f, erasure)) continue;  // overwhelmingly unlikely
    VectorX<S> h = random_vector<S>(rng, r);
    auto report = transmit(pair, erasure, h, methods[trial % 3]);
    REQUIRE(report.status == TransmitStatus::Recovered);
    CHECK(report.recon_error_rel <= 1e-9);
  }
}

TEST_CASE("randomized transmissions recover within tolerance") {
  check_randomized_recovery<double>(61, 20);
  check_randomized_recovery<Complex>(62, 10);
}

#pragma once

#include <Eigen/Core>
#include <chrono>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "framedual/channel.hpp"
#include "framedual/erasure.hpp"

namespace framedual {

// One test of the timing protocol: a random r x N frame, its canonical dual
// and two random duals Z1, Z2, one random MRC-satisfying erasure of size k.
// Timed columns: t1/t2 = iterative/Gram from the canonical dual, t3 = the
// pseudoinverse baseline on the reduced frame, t4/t5 = iterative/Gram from
// Z1 and Z2. The operator construction is deliberately not timed.
struct BenchConfig {
  int test_id = 0;  // 0 = assigned by run_suite
  Index n = 0;
  Index r = 0;
  Index k = 0;
  std::uint64_t seed = 1;
  int repetitions = 5;
  int warmup = 1;
  Field field = Field::Real;
  double spread = 1.0;
  Tolerances tols{};
};

struct MethodCell {
  bool ok = false;
  double seconds = 0.0;
  double error = 0.0;
  std::string fail;  // e.g. "denominator_vanishes@3"
};

struct BenchRecord {
  BenchConfig config;
  int threads = 1;
  MethodCell t1, t2, t3, t4_z1, t5_z1, t4_z2, t5_z2;
  std::string setup_failure;  // nonempty when the record never ran (e.g. MRC retries)
  std::vector<std::string> warnings;

  std::string status_string() const;
  std::string csv_row() const;
};

inline constexpr const char* kBenchCsvHeader =
    "test_id,N,r,k,seed,reps,threads,t1,t2,t3,t4_z1,t5_z1,t4_z2,t5_z2,"
    "e1,e2,e3,e4_z1,e5_z1,e4_z2,e5_z2,status";

inline std::string BenchRecord::status_string() const {
  if (!setup_failure.empty()) return setup_failure;
  std::vector<std::string> parts;
  auto note = [&](const char* col, const MethodCell& cell) {
    if (!cell.ok) parts.push_back(std::string(col) + ":" + cell.fail);
  };
  note("t1", t1);
  note("t2", t2);
  note("t3", t3);
  note("t4_z1", t4_z1);
  note("t5_z1", t5_z1);
  note("t4_z2", t4_z2);
  note("t5_z2", t5_z2);
  for (const auto& w : warnings) parts.push_back("warn:" + w);
  if (parts.empty()) return "ok";
  std::string out;
  for (size_t i = 0; i < parts.size(); ++i) {
    if (i) out += ';';
    out += parts[i];
  }
  return out;
}

inline std::string BenchRecord::csv_row() const {
  std::ostringstream os;
  char buf[64];
  auto tcell = [&](const MethodCell& c) -> std::string {
    if (!setup_failure.empty() || !c.ok) return "NA";
    std::snprintf(buf, sizeof(buf), "%.6e", c.seconds);
    return buf;
  };
  auto ecell = [&](const MethodCell& c) -> std::string {
    if (!setup_failure.empty() || !c.ok) return "NA";
    std::snprintf(buf, sizeof(buf), "%.17g", c.error);
    return buf;
  };
  os << config.test_id << ',' << config.n << ',' << config.r << ',' << config.k
     << ',' << config.seed << ',' << config.repetitions << ',' << threads;
  for (const MethodCell* c : {&t1, &t2, &t3, &t4_z1, &t5_z1, &t4_z2, &t5_z2})
    os << ',' << tcell(*c);
  for (const MethodCell* c : {&t1, &t2, &t3, &t4_z1, &t5_z1, &t4_z2, &t5_z2})
    os << ',' << ecell(*c);
  os << ',' << status_string();
  return os.str();
}

namespace detail {

inline double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Run `fn` warmup+reps times; the timed region is exactly the call. Returns
// the median elapsed seconds and the last result.
template <class F>
auto time_median(int warmup, int reps, F&& fn)
    -> std::pair<double, decltype(fn())> {
  using clock = std::chrono::steady_clock;
  for (int i = 0; i < warmup; ++i) (void)fn();
  std::vector<double> times;
  times.reserve(static_cast<size_t>(reps));
  std::optional<decltype(fn())> last;
  for (int i = 0; i < reps; ++i) {
    const auto begin = clock::now();
    auto value = fn();
    const auto end = clock::now();
    times.push_back(std::chrono::duration<double>(end - begin).count());
    last = std::move(value);
  }
  return {median(std::move(times)), std::move(*last)};
}

template <class S>
BenchRecord run_test_impl(const BenchConfig& config) {
  const Tolerances& tols = config.tols;
  BenchRecord rec;
  rec.config = config;
  rec.threads = Eigen::nbThreads();

  Frame<S> frame =
      random_frame<S>(config.r, config.n, derive_seed(config.seed, 1), tols.rank_tol);
  DualPair<S> canonical = canonical_dual(frame, tols.cond_limit);
  DualPair<S> z1 = random_dual(canonical, derive_seed(config.seed, 2), config.spread,
                               tols.dual_tol);
  DualPair<S> z2 = random_dual(canonical, derive_seed(config.seed, 3), config.spread,
                               tols.dual_tol);

  // As in the source protocol, only the erasure draw is retried until the
  // MRC holds; the frame and duals stay fixed.
  std::optional<ErasureSet> erasure;
  for (int attempt = 0; attempt < 10; ++attempt) {
    ErasureSet candidate =
        random_erasure(config.n, config.k, derive_seed(config.seed, 16 + attempt));
    if (mrc_check(frame, candidate, tols.rank_tol)) {
      erasure = std::move(candidate);
      break;
    }
  }
  if (!erasure)
    fail(Errc::MrcRetryExhausted,
         "no MRC-satisfying erasure of size " + std::to_string(config.k) +
             " found in 10 attempts");

  const MatrixX<S>& x = frame.elements();
  MatrixX<S> reduced = select_columns(x, erasure->complement());

  auto run_construction = [&](MethodCell& cell, const MatrixX<S>& dual_matrix,
                              bool iterative) -> std::optional<MatrixX<S>> {
    auto fn = [&]() {
      return iterative ? detail::run_iterative<S>(x, dual_matrix, *erasure,
                                                  tols.denom_tol)
                       : detail::run_gram<S>(x, dual_matrix, *erasure);
    };
    auto [seconds, outcome] = time_median(config.warmup, config.repetitions, fn);
    if (outcome.status != ReduceStatus::Ok) {
      cell.ok = false;
      cell.fail = reduce_status_name(outcome.status);
      if (outcome.status == ReduceStatus::DenominatorVanishes)
        cell.fail += "@" + std::to_string(outcome.fail_step);
      return std::nullopt;
    }
    cell.ok = true;
    cell.seconds = seconds;
    cell.error = duality_error(frame, outcome.vectors, erasure->complement());
    return std::optional<MatrixX<S>>(std::move(outcome.vectors));
  };

  auto v1 = run_construction(rec.t1, canonical.dual, true);
  auto v2 = run_construction(rec.t2, canonical.dual, false);
  run_construction(rec.t4_z1, z1.dual, true);
  run_construction(rec.t5_z1, z1.dual, false);
  run_construction(rec.t4_z2, z2.dual, true);
  run_construction(rec.t5_z2, z2.dual, false);

  auto [t3_seconds, pinv_vectors] =
      time_median(config.warmup, config.repetitions,
                  [&]() { return detail::pinv_dual_matrix<S>(reduced); });
  rec.t3.ok = true;
  rec.t3.seconds = t3_seconds;
  rec.t3.error = duality_error(frame, pinv_vectors, erasure->complement());

  // Correctness embedded in the harness: both canonical constructions must
  // reproduce the canonical dual of the reduced frame.
  if (v1 && max_colwise_rel_diff<S>(*v1, pinv_vectors) > 1e-8)
    rec.warnings.push_back("canonical_mismatch_t1");
  if (v2 && max_colwise_rel_diff<S>(*v2, pinv_vectors) > 1e-8)
    rec.warnings.push_back("canonical_mismatch_t2");
  return rec;
}

}  // namespace detail

inline BenchRecord run_test(const BenchConfig& config) {
  require(config.r >= 1 && config.n >= config.r, Errc::InvalidArgument,
          "bench config needs N >= r >= 1");
  require(config.k >= 1 && config.k < config.n, Errc::InvalidArgument,
          "bench config needs 1 <= k < N");
  require(config.repetitions >= 1 && config.warmup >= 0, Errc::InvalidArgument,
          "bench config needs repetitions >= 1 and warmup >= 0");
  if (config.field == Field::Real) return detail::run_test_impl<double>(config);
  return detail::run_test_impl<Complex>(config);
}

inline std::vector<BenchRecord> run_suite(std::vector<BenchConfig> configs,
                                          std::ostream& csv) {
  csv << kBenchCsvHeader << '\n';
  std::vector<BenchRecord> records;
  records.reserve(configs.size());
  int next_id = 1;
  for (BenchConfig& config : configs) {
    if (config.test_id == 0) config.test_id = next_id;
    next_id = config.test_id + 1;
    try {
      records.push_back(run_test(config));
    } catch (const Error& e) {
      if (e.code() != Errc::MrcRetryExhausted) throw;
      BenchRecord failed;
      failed.config = config;
      failed.threads = Eigen::nbThreads();
      failed.setup_failure = "mrc_retry_exhausted";
      records.push_back(std::move(failed));
    }
    csv << records.back().csv_row() << '\n';
    csv.flush();
  }
  return records;
}

inline std::vector<BenchRecord> run_suite(const std::vector<BenchConfig>& configs,
                                          const std::string& csv_path) {
  std::ofstream os(csv_path);
  require(os.good(), Errc::IoFailure, "cannot open '" + csv_path + "' for writing");
  auto records = run_suite(configs, os);
  require(os.good(), Errc::IoFailure, "failed writing '" + csv_path + "'");
  return records;
}

inline BenchConfig bench_config_from_json(const nlohmann::json& j) {
  BenchConfig config;
  auto pick = [&](const char* a, const char* b) -> nlohmann::json {
    if (j.contains(a)) return j.at(a);
    if (j.contains(b)) return j.at(b);
    fail(Errc::ParseError, std::string("bench config missing field '") + a + "'");
  };
  config.n = pick("n", "N").get<Index>();
  config.r = pick("r", "R").get<Index>();
  config.k = pick("k", "K").get<Index>();
  config.test_id = j.value("test_id", 0);
  config.seed = j.value("seed", std::uint64_t{1});
  config.repetitions = j.value("reps", 5);
  config.warmup = j.value("warmup", 1);
  config.field = parse_field(j.value("field", "real"));
  config.spread = j.value("spread", 1.0);
  config.tols.rank_tol = j.value("rank_tol", config.tols.rank_tol);
  config.tols.dual_tol = j.value("dual_tol", config.tols.dual_tol);
  config.tols.denom_tol = j.value("denom_tol", config.tols.denom_tol);
  config.tols.cond_limit = j.value("cond_limit", config.tols.cond_limit);
  return config;
}

inline std::vector<BenchConfig> parse_bench_configs(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::ParseError, std::string("bench config: ") + e.what());
  }
  if (j.is_object() && j.contains("configs")) j = j.at("configs");
  require(j.is_array(), Errc::ParseError,
          "bench config must be a JSON array or {\"configs\": [...]}");
  std::vector<BenchConfig> configs;
  try {
    for (const auto& item : j) configs.push_back(bench_config_from_json(item));
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::ParseError, std::string("bench config: ") + e.what());
  }
  return configs;
}

}  // namespace framedual

// framedual CLI: frame generation, dual computation, erasure/reconstruction
// runs, construction equivalence reports, and the benchmark suite. Talks to
// the library exclusively through the C API.
//
// Exit codes: 0 success, 2 usage/validation, 3 I/O or parse failure,
// 4 MRC violation, 5 construction failure.

#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "framedual.h"

namespace {

using nlohmann::json;

struct CliExit {
  int code;
  std::string message;
};

int exit_code_for(fd_status status) {
  switch (status) {
    case FD_OK: return 0;
    case FD_ERR_IO:
    case FD_ERR_PARSE: return 3;
    case FD_ERR_MRC_VIOLATED:
    case FD_ERR_MRC_RETRY_EXHAUSTED: return 4;
    case FD_ERR_SINGULAR_GRAM:
    case FD_ERR_SINGULAR_OPERATOR:
    case FD_ERR_DENOMINATOR_VANISHES: return 5;
    default: return 2;
  }
}

void check(fd_status status) {
  if (status != FD_OK)
    throw CliExit{exit_code_for(status), std::string(fd_status_name(status)) +
                                             ": " + fd_last_error()};
}

struct FrameHandle {
  fd_frame* ptr = nullptr;
  ~FrameHandle() { fd_frame_destroy(ptr); }
};
struct DualHandle {
  fd_dual* ptr = nullptr;
  ~DualHandle() { fd_dual_destroy(ptr); }
};
struct ErasureHandle {
  fd_erasure* ptr = nullptr;
  ~ErasureHandle() { fd_erasure_destroy(ptr); }
};
struct ReducedHandle {
  fd_reduced* ptr = nullptr;
  ~ReducedHandle() { fd_reduced_destroy(ptr); }
};
struct Buffer {
  double* ptr = nullptr;
  ~Buffer() { fd_buffer_free(ptr); }
};
struct CString {
  char* ptr = nullptr;
  ~CString() { fd_string_free(ptr); }
};

struct Globals {
  std::uint64_t seed = 1;
  std::string field = "real";
  int threads = 0;
  fd_tolerances tols{};
};

fd_field parse_field_flag(const std::string& name) {
  if (name == "real") return FD_FIELD_REAL;
  if (name == "complex") return FD_FIELD_COMPLEX;
  throw CliExit{2, "unknown field '" + name + "' (expected real or complex)"};
}

fd_method parse_method_flag(const std::string& name) {
  if (name == "iter") return FD_METHOD_ITERATIVE;
  if (name == "gram") return FD_METHOD_GRAM;
  if (name == "op") return FD_METHOD_OPERATOR;
  throw CliExit{2, "unknown method '" + name + "' (expected iter, gram or op)"};
}

std::vector<std::int64_t> parse_index_list(const std::string& text) {
  std::vector<std::int64_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      size_t pos = 0;
      long long v = std::stoll(item, &pos);
      if (pos != item.size()) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      throw CliExit{2, "bad erasure index '" + item + "'"};
    }
  }
  if (out.empty()) throw CliExit{2, "empty erasure list"};
  return out;
}

size_t buffer_len(fd_field field, std::int64_t rows, std::int64_t cols) {
  const size_t base = static_cast<size_t>(rows) * static_cast<size_t>(cols);
  return field == FD_FIELD_COMPLEX ? 2 * base : base;
}

// Loads a frame file plus a dual file and attaches them; shared by the
// verify/reduce/transmit commands.
void load_pair(const std::string& frame_path, const std::string& dual_path,
               const Globals& g, FrameHandle& frame, DualHandle& dual) {
  check(fd_frame_load(frame_path.c_str(), g.tols.rank_tol, &frame.ptr));
  fd_field ffield, dfield;
  std::int64_t fr, fc, dr, dc;
  check(fd_frame_dims(frame.ptr, &ffield, &fr, &fc));
  Buffer data;
  check(fd_matrix_load(dual_path.c_str(), &dfield, &dr, &dc, &data.ptr));
  if (dfield != ffield)
    throw CliExit{2, "frame and dual use different scalar fields"};
  if (dr != fr || dc != fc)
    throw CliExit{2, "dual shape " + std::to_string(dr) + "x" + std::to_string(dc) +
                         " does not match frame " + std::to_string(fr) + "x" +
                         std::to_string(fc)};
  check(fd_dual_attach(frame.ptr, data.ptr, g.tols.dual_tol, &dual.ptr));
}

ErasureHandle make_erasure(const fd_frame* frame, const std::string& spec) {
  fd_field field;
  std::int64_t rows, cols;
  check(fd_frame_dims(frame, &field, &rows, &cols));
  auto indices = parse_index_list(spec);
  ErasureHandle erasure;
  check(fd_erasure_create(cols, indices.data(),
                          static_cast<std::int64_t>(indices.size()), &erasure.ptr));
  return erasure;
}

std::string default_dual_path(const std::string& frame_path) {
  std::filesystem::path p(frame_path);
  std::filesystem::path ext = p.extension();
  p.replace_extension();
  p += ".dual";
  p += ext;
  return p.string();
}

int cmd_gen(const Globals& g, std::int64_t n, std::int64_t r,
            const std::string& out, const std::string& dual_kind,
            std::string dual_out, double spread) {
  if (r < 1 || n < r)
    throw CliExit{2, "need N >= r >= 1 (got N=" + std::to_string(n) +
                         ", r=" + std::to_string(r) + ")"};
  FrameHandle frame;
  check(fd_frame_random(parse_field_flag(g.field), r, n, g.seed, g.tols.rank_tol,
                        &frame.ptr));
  check(fd_frame_save(frame.ptr, out.c_str()));
  json summary{{"frame", out}, {"rows", r}, {"cols", n}, {"field", g.field}};
  if (!dual_kind.empty()) {
    DualHandle canonical;
    check(fd_canonical_dual(frame.ptr, g.tols.cond_limit, &canonical.ptr));
    DualHandle chosen;
    fd_dual* save_ptr = canonical.ptr;
    if (dual_kind == "random") {
      check(fd_random_dual(canonical.ptr, g.seed, spread, g.tols.dual_tol,
                           &chosen.ptr));
      save_ptr = chosen.ptr;
    } else if (dual_kind != "canonical") {
      throw CliExit{2, "unknown dual kind '" + dual_kind +
                           "' (expected canonical or random)"};
    }
    if (dual_out.empty()) dual_out = default_dual_path(out);
    check(fd_dual_save(save_ptr, dual_out.c_str()));
    double residual = 0.0;
    check(fd_dual_info(save_ptr, nullptr, &residual, nullptr));
    summary["dual"] = dual_out;
    summary["dual_kind"] = dual_kind;
    summary["duality_error"] = residual;
  }
  std::cout << summary.dump(2) << '\n';
  return 0;
}

int cmd_info(const Globals& g, const std::string& path) {
  fd_field field;
  std::int64_t rows, cols;
  Buffer data;
  check(fd_matrix_load(path.c_str(), &field, &rows, &cols, &data.ptr));
  std::int64_t rank = 0;
  check(fd_numerical_rank(field, rows, cols, data.ptr, g.tols.rank_tol, &rank));
  json out{{"path", path},
           {"field", field == FD_FIELD_REAL ? "real" : "complex"},
           {"rows", rows},
           {"cols", cols},
           {"rank", rank}};
  fd_frame* frame = nullptr;
  if (fd_frame_create(field, rows, cols, data.ptr, g.tols.rank_tol, &frame) ==
      FD_OK) {
    FrameHandle holder{frame};
    double lower = 0.0, upper = 0.0;
    check(fd_frame_bounds(frame, &lower, &upper));
    out["is_frame"] = true;
    out["lower_bound"] = lower;
    out["upper_bound"] = upper;
  } else {
    out["is_frame"] = false;
  }
  std::cout << out.dump(2) << '\n';
  return 0;
}

int cmd_verify(const Globals& g, const std::string& frame_path,
               const std::string& dual_path) {
  FrameHandle frame;
  check(fd_frame_load(frame_path.c_str(), g.tols.rank_tol, &frame.ptr));
  fd_field ffield, dfield;
  std::int64_t fr, fc, dr, dc;
  check(fd_frame_dims(frame.ptr, &ffield, &fr, &fc));
  Buffer data;
  check(fd_matrix_load(dual_path.c_str(), &dfield, &dr, &dc, &data.ptr));
  if (dfield != ffield) throw CliExit{2, "frame and dual use different fields"};
  if (dr != fr || dc != fc) throw CliExit{2, "dual shape does not match frame"};
  double error = 0.0;
  check(fd_duality_error(frame.ptr, data.ptr, &error));
  const bool is_dual = error <= g.tols.dual_tol;
  json out{{"duality_error", error},
           {"tolerance", g.tols.dual_tol},
           {"is_dual", is_dual}};
  if (is_dual) {
    DualHandle dual;
    check(fd_dual_attach(frame.ptr, data.ptr, g.tols.dual_tol, &dual.ptr));
    int canonical = 0;
    check(fd_dual_info(dual.ptr, &canonical, nullptr, nullptr));
    out["is_canonical"] = canonical != 0;
  }
  std::cout << out.dump(2) << '\n';
  return is_dual ? 0 : 5;
}

int cmd_reduce(const Globals& g, const std::string& frame_path,
               const std::string& dual_path, const std::string& erase_spec,
               const std::string& method, const std::string& out) {
  FrameHandle frame;
  DualHandle dual;
  load_pair(frame_path, dual_path, g, frame, dual);
  ErasureHandle erasure = make_erasure(frame.ptr, erase_spec);

  int mrc_ok = 0;
  check(fd_mrc_check(frame.ptr, erasure.ptr, g.tols.rank_tol, &mrc_ok));
  if (!mrc_ok)
    throw CliExit{4,
                  "erasure set violates the minimal redundancy condition: the "
                  "surviving frame elements do not span the space"};

  if (method == "all") {
    CString report;
    check(fd_equivalence_json(dual.ptr, erasure.ptr, 1e-8, &g.tols, &report.ptr));
    std::ofstream os(out);
    if (!os.good()) throw CliExit{3, "cannot open '" + out + "' for writing"};
    os << report.ptr << '\n';
    if (!os.good()) throw CliExit{3, "failed writing '" + out + "'"};
    std::cout << report.ptr << '\n';
    return 0;
  }

  ReducedHandle reduced;
  check(fd_reduce(dual.ptr, erasure.ptr, parse_method_flag(method), &g.tols,
                  &reduced.ptr));
  const std::string sidecar = out + ".json";
  check(fd_reduced_save(reduced.ptr, out.c_str(), sidecar.c_str()));
  double residual = 0.0;
  check(fd_reduced_info(reduced.ptr, nullptr, nullptr, nullptr, &residual));
  json summary{{"out", out},
               {"sidecar", sidecar},
               {"method", method},
               {"duality_residual", residual}};
  std::cout << summary.dump(2) << '\n';
  return 0;
}

int cmd_transmit(const Globals& g, const std::string& frame_path,
                 const std::string& dual_path, const std::string& erase_spec,
                 std::int64_t random_erase_k, const std::string& method,
                 const std::string& signal_path, bool random_signal,
                 int trials) {
  FrameHandle frame;
  DualHandle dual;
  load_pair(frame_path, dual_path, g, frame, dual);
  fd_field field;
  std::int64_t rows, cols;
  check(fd_frame_dims(frame.ptr, &field, &rows, &cols));
  if (erase_spec.empty() == (random_erase_k == 0))
    throw CliExit{2, "need exactly one of --erase or --random-erase"};
  if (signal_path.empty() == !random_signal)
    throw CliExit{2, "need exactly one of --signal or --random-signal"};
  if (trials < 1) throw CliExit{2, "--trials must be positive"};
  if (trials > 1 && (!random_signal && random_erase_k == 0))
    throw CliExit{2, "--trials needs a random signal or random erasures"};

  std::vector<double> signal(buffer_len(field, rows, 1));
  if (!signal_path.empty()) {
    fd_field sfield;
    std::int64_t sr, sc;
    Buffer data;
    check(fd_matrix_load(signal_path.c_str(), &sfield, &sr, &sc, &data.ptr));
    if (sfield != field) throw CliExit{2, "signal field does not match frame"};
    if (sr != rows || sc != 1)
      throw CliExit{2, "signal must be a " + std::to_string(rows) +
                           "x1 matrix, got " + std::to_string(sr) + "x" +
                           std::to_string(sc)};
    std::copy(data.ptr, data.ptr + signal.size(), signal.begin());
  }

  const fd_method m = parse_method_flag(method);
  int worst = 0;
  for (int trial = 0; trial < trials; ++trial) {
    if (random_signal)
      check(fd_random_signal(field, rows, g.seed + static_cast<std::uint64_t>(trial),
                             signal.data()));
    ErasureHandle erasure;
    if (random_erase_k > 0) {
      check(fd_erasure_random(cols, random_erase_k,
                              g.seed + static_cast<std::uint64_t>(trial),
                              &erasure.ptr));
    } else {
      erasure = make_erasure(frame.ptr, erase_spec);
    }
    CString report;
    const fd_status status =
        fd_transmit_json(dual.ptr, erasure.ptr, signal.data(), m, &g.tols,
                         &report.ptr);
    if (status != FD_OK && !report.ptr) check(status);  // argument-level failure
    if (trials == 1) {
      std::cout << report.ptr << '\n';
    } else {
      // batch mode: one compact JSON object per line
      std::cout << json::parse(report.ptr).dump() << '\n';
    }
    worst = std::max(worst, exit_code_for(status));
  }
  return worst;
}

int cmd_bench(const Globals& g, const std::string& config_path, std::int64_t n,
              std::int64_t r, std::int64_t k, int reps, int warmup,
              double spread, const std::string& out) {
  std::string config_text;
  if (!config_path.empty()) {
    std::ifstream is(config_path);
    if (!is.good()) throw CliExit{3, "cannot open '" + config_path + "'"};
    std::stringstream ss;
    ss << is.rdbuf();
    config_text = ss.str();
  } else {
    if (n <= 0 || r <= 0 || k <= 0)
      throw CliExit{2, "inline bench needs --n, --r and --k (or use --config)"};
    json config{{"n", n},       {"r", r},           {"k", k},
                {"seed", g.seed}, {"reps", reps},   {"warmup", warmup},
                {"field", g.field}, {"spread", spread},
                {"rank_tol", g.tols.rank_tol}, {"dual_tol", g.tols.dual_tol},
                {"denom_tol", g.tols.denom_tol}, {"cond_limit", g.tols.cond_limit}};
    config_text = json::array({config}).dump();
  }
  const bool to_stdout = out == "-";
  CString text;
  check(fd_bench_run(config_text.c_str(), to_stdout ? nullptr : out.c_str(),
                     to_stdout ? &text.ptr : nullptr));
  if (to_stdout) std::cout << text.ptr;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"finite-frame dual constructions compensating for erasures"};
  app.require_subcommand(1);

  Globals g;
  fd_tolerances_default(&g.tols);
  app.add_option("--seed", g.seed, "random seed")->envname("FRAME_ERASURE_SEED");
  app.add_option("--field", g.field, "scalar field: real or complex")
      ->check(CLI::IsMember({"real", "complex"}));
  app.add_option("--threads", g.threads, "kernel thread count");
  app.add_option("--tol-rank", g.tols.rank_tol, "relative numerical-rank cutoff");
  app.add_option("--tol-dual", g.tols.dual_tol, "duality residual tolerance");
  app.add_option("--tol-denom", g.tols.denom_tol,
                 "iterative denominator tolerance");
  app.add_option("--cond-limit", g.tols.cond_limit, "condition warning limit");

  auto* gen = app.add_subcommand("gen", "generate a random frame (and a dual)");
  std::int64_t gen_n = 0, gen_r = 0;
  std::string gen_out, gen_dual, gen_dual_out;
  double gen_spread = 1.0;
  gen->add_option("--n", gen_n, "number of frame elements")->required();
  gen->add_option("--r", gen_r, "space dimension")->required();
  gen->add_option("--out", gen_out, "output FRM1 path")->required();
  gen->add_option("--dual", gen_dual, "also write a dual: canonical or random");
  gen->add_option("--dual-out", gen_dual_out, "dual output path");
  gen->add_option("--spread", gen_spread, "random dual spread");

  auto* info = app.add_subcommand("info", "describe an FRM1 file");
  std::string info_in;
  info->add_option("--in", info_in, "FRM1 path")->required();

  auto* verify = app.add_subcommand("verify", "check a dual against a frame");
  std::string verify_frame, verify_dual;
  verify->add_option("--frame", verify_frame, "frame FRM1 path")->required();
  verify->add_option("--dual", verify_dual, "dual FRM1 path")->required();

  auto* reduce = app.add_subcommand(
      "reduce", "construct a dual of the frame surviving an erasure");
  std::string red_frame, red_dual, red_erase, red_method = "gram", red_out;
  reduce->add_option("--frame", red_frame, "frame FRM1 path")->required();
  reduce->add_option("--dual", red_dual, "dual FRM1 path")->required();
  reduce->add_option("--erase", red_erase, "erased indices, e.g. 1,4,7")
      ->required();
  reduce->add_option("--method", red_method, "iter, gram, op or all");
  reduce->add_option("--out", red_out, "output path")->required();

  auto* transmit = app.add_subcommand(
      "transmit", "encode, erase, reconstruct and report as JSON");
  std::string tr_frame, tr_dual, tr_erase, tr_method = "gram", tr_signal;
  std::int64_t tr_random_erase = 0;
  bool tr_random_signal = false;
  int tr_trials = 1;
  transmit->add_option("--frame", tr_frame, "frame FRM1 path")->required();
  transmit->add_option("--dual", tr_dual, "dual FRM1 path")->required();
  transmit->add_option("--erase", tr_erase, "erased indices, e.g. 1,4,7");
  transmit->add_option("--random-erase", tr_random_erase,
                       "erase a random subset of this size");
  transmit->add_option("--method", tr_method, "iter, gram or op");
  transmit->add_option("--signal", tr_signal, "signal FRM1 path (r x 1)");
  transmit->add_flag("--random-signal", tr_random_signal, "use a seeded signal");
  transmit->add_option("--trials", tr_trials, "number of transmissions (JSONL)");

  auto* bench = app.add_subcommand("bench", "run the timing protocol, emit CSV");
  std::string bench_config, bench_out;
  std::int64_t bench_n = 0, bench_r = 0, bench_k = 0;
  int bench_reps = 5, bench_warmup = 1;
  double bench_spread = 1.0;
  bench->add_option("--config", bench_config, "JSON config path");
  bench->add_option("--n", bench_n, "number of frame elements");
  bench->add_option("--r", bench_r, "space dimension");
  bench->add_option("--k", bench_k, "erasure cardinality");
  bench->add_option("--reps", bench_reps, "timed repetitions per method");
  bench->add_option("--warmup", bench_warmup, "untimed warmup runs");
  bench->add_option("--spread", bench_spread, "random dual spread");
  bench->add_option("--out", bench_out, "CSV output path, or - for stdout")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == static_cast<int>(CLI::ExitCodes::Success))
      return app.exit(e);
    std::ostringstream dummy;
    app.exit(e, dummy, dummy);
    std::cerr << e.what() << '\n';
    return 2;
  }

  try {
    if (g.threads > 0) fd_set_threads(g.threads);
    if (gen->parsed())
      return cmd_gen(g, gen_n, gen_r, gen_out, gen_dual, gen_dual_out, gen_spread);
    if (info->parsed()) return cmd_info(g, info_in);
    if (verify->parsed()) return cmd_verify(g, verify_frame, verify_dual);
    if (reduce->parsed())
      return cmd_reduce(g, red_frame, red_dual, red_erase, red_method, red_out);
    if (transmit->parsed())
      return cmd_transmit(g, tr_frame, tr_dual, tr_erase, tr_random_erase,
                          tr_method, tr_signal, tr_random_signal, tr_trials);
    if (bench->parsed())
      return cmd_bench(g, bench_config, bench_n, bench_r, bench_k, bench_reps,
                       bench_warmup, bench_spread, bench_out);
  } catch (const CliExit& e) {
    std::cerr << "framedual: " << e.message << '\n';
    return e.code;
  } catch (const std::exception& e) {
    std::cerr << "framedual: " << e.what() << '\n';
    return 2;
  }
  return 2;
}

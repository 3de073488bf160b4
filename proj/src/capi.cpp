#include "framedual.h"

#include <cstring>
#include <new>
#include <sstream>
#include <variant>

#include "framedual/bench.hpp"
#include "framedual/channel.hpp"
#include "framedual/frm_io.hpp"

namespace fd = framedual;

namespace {

thread_local std::string g_last_error;

fd_status map_errc(fd::Errc code) {
  switch (code) {
    case fd::Errc::BadShape: return FD_ERR_BAD_SHAPE;
    case fd::Errc::NotAFrame: return FD_ERR_NOT_A_FRAME;
    case fd::Errc::DimensionMismatch: return FD_ERR_DIMENSION_MISMATCH;
    case fd::Errc::BadIndex: return FD_ERR_BAD_INDEX;
    case fd::Errc::BadK: return FD_ERR_BAD_K;
    case fd::Errc::NotADual: return FD_ERR_NOT_A_DUAL;
    case fd::Errc::MrcViolated: return FD_ERR_MRC_VIOLATED;
    case fd::Errc::MrcRetryExhausted: return FD_ERR_MRC_RETRY_EXHAUSTED;
    case fd::Errc::IoFailure: return FD_ERR_IO;
    case fd::Errc::ParseError: return FD_ERR_PARSE;
    case fd::Errc::InvalidArgument: return FD_ERR_INVALID_ARGUMENT;
  }
  return FD_ERR_INTERNAL;
}

template <class F>
fd_status guarded(F&& body) {
  try {
    return body();
  } catch (const fd::Error& e) {
    g_last_error = e.what();
    return map_errc(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return FD_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return FD_ERR_INTERNAL;
  }
}

fd_status bad_argument(const char* what) {
  g_last_error = what;
  return FD_ERR_INVALID_ARGUMENT;
}

fd::Field to_field(fd_field f) {
  return f == FD_FIELD_REAL ? fd::Field::Real : fd::Field::Complex;
}

fd_field from_field(fd::Field f) {
  return f == fd::Field::Real ? FD_FIELD_REAL : FD_FIELD_COMPLEX;
}

fd::Tolerances to_tols(const fd_tolerances* tols) {
  if (!tols) return fd::Tolerances{};
  return fd::Tolerances{tols->rank_tol, tols->dual_tol, tols->denom_tol,
                        tols->cond_limit};
}

fd::Method to_method(fd_method m) {
  switch (m) {
    case FD_METHOD_ITERATIVE: return fd::Method::Iterative;
    case FD_METHOD_GRAM: return fd::Method::GramSolve;
    case FD_METHOD_OPERATOR: return fd::Method::OperatorInverse;
  }
  fd::fail(fd::Errc::InvalidArgument, "unknown construction method");
}

size_t buffer_len(fd::Field field, int64_t rows, int64_t cols) {
  const size_t base = static_cast<size_t>(rows) * static_cast<size_t>(cols);
  return field == fd::Field::Complex ? 2 * base : base;
}

template <class S>
fd::MatrixX<S> matrix_from_buffer(int64_t rows, int64_t cols, const double* data) {
  return Eigen::Map<const fd::MatrixX<S>>(reinterpret_cast<const S*>(data), rows,
                                          cols);
}

template <class S>
void matrix_to_buffer(const fd::MatrixX<S>& m, double* out) {
  Eigen::Map<fd::MatrixX<S>>(reinterpret_cast<S*>(out), m.rows(), m.cols()) = m;
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

fd_status map_reduce_status(fd::ReduceStatus s) {
  switch (s) {
    case fd::ReduceStatus::Ok: return FD_OK;
    case fd::ReduceStatus::SingularGram: return FD_ERR_SINGULAR_GRAM;
    case fd::ReduceStatus::SingularOperator: return FD_ERR_SINGULAR_OPERATOR;
    case fd::ReduceStatus::DenominatorVanishes: return FD_ERR_DENOMINATOR_VANISHES;
  }
  return FD_ERR_INTERNAL;
}

}  // namespace

struct fd_frame {
  std::variant<fd::Frame<double>, fd::Frame<fd::Complex>> value;
};

struct fd_dual {
  std::variant<fd::DualPair<double>, fd::DualPair<fd::Complex>> value;
};

struct fd_erasure {
  fd::ErasureSet value;
};

struct fd_reduced {
  std::variant<fd::ReducedDual<double>, fd::ReducedDual<fd::Complex>> value;
  std::vector<std::int64_t> erased_one_based;
};

extern "C" {

void fd_tolerances_default(fd_tolerances* tols) {
  if (!tols) return;
  fd::Tolerances d{};
  *tols = fd_tolerances{d.rank_tol, d.dual_tol, d.denom_tol, d.cond_limit};
}

const char* fd_version(void) { return "0.1.0"; }

const char* fd_status_name(fd_status status) {
  switch (status) {
    case FD_OK: return "ok";
    case FD_ERR_BAD_SHAPE: return "bad_shape";
    case FD_ERR_NOT_A_FRAME: return "not_a_frame";
    case FD_ERR_DIMENSION_MISMATCH: return "dimension_mismatch";
    case FD_ERR_BAD_INDEX: return "bad_index";
    case FD_ERR_BAD_K: return "bad_k";
    case FD_ERR_NOT_A_DUAL: return "not_a_dual";
    case FD_ERR_MRC_VIOLATED: return "mrc_violated";
    case FD_ERR_MRC_RETRY_EXHAUSTED: return "mrc_retry_exhausted";
    case FD_ERR_IO: return "io_failure";
    case FD_ERR_PARSE: return "parse_error";
    case FD_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case FD_ERR_SINGULAR_GRAM: return "singular_gram";
    case FD_ERR_SINGULAR_OPERATOR: return "singular_operator";
    case FD_ERR_DENOMINATOR_VANISHES: return "denominator_vanishes";
    case FD_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* fd_last_error(void) { return g_last_error.c_str(); }

void fd_string_free(char* s) { std::free(s); }
void fd_buffer_free(double* buffer) { std::free(buffer); }

int fd_set_threads(int n) {
  if (n >= 1) Eigen::setNbThreads(n);
  return Eigen::nbThreads();
}

int fd_get_threads(void) { return Eigen::nbThreads(); }

fd_status fd_matrix_load(const char* path, fd_field* field, int64_t* rows,
                         int64_t* cols, double** data) {
  if (!path || !field || !rows || !cols || !data)
    return bad_argument("fd_matrix_load: null argument");
  return guarded([&]() {
    fd::TypedMatrix m = fd::read_frm1_file(path);
    return std::visit(
        [&](const auto& mat) {
          using S = typename std::decay_t<decltype(mat)>::Scalar;
          *field = from_field(fd::field_of_v<S>);
          *rows = mat.rows();
          *cols = mat.cols();
          const size_t len = buffer_len(fd::field_of_v<S>, mat.rows(), mat.cols());
          double* buf = static_cast<double*>(std::malloc(len * sizeof(double)));
          if (!buf) throw std::bad_alloc();
          matrix_to_buffer<S>(mat, buf);
          *data = buf;
          return FD_OK;
        },
        m);
  });
}

fd_status fd_matrix_save(const char* path, fd_field field, int64_t rows,
                         int64_t cols, const double* data) {
  if (!path || !data || rows < 1 || cols < 1)
    return bad_argument("fd_matrix_save: null argument or empty matrix");
  return guarded([&]() {
    if (to_field(field) == fd::Field::Real)
      fd::write_frm1_file(path, matrix_from_buffer<double>(rows, cols, data));
    else
      fd::write_frm1_file(path, matrix_from_buffer<fd::Complex>(rows, cols, data));
    return FD_OK;
  });
}

fd_status fd_numerical_rank(fd_field field, int64_t rows, int64_t cols,
                            const double* data, double rank_tol, int64_t* rank) {
  if (!data || !rank || rows < 1 || cols < 1)
    return bad_argument("fd_numerical_rank: null argument or empty matrix");
  return guarded([&]() {
    if (to_field(field) == fd::Field::Real)
      *rank = fd::numerical_rank<double>(
          matrix_from_buffer<double>(rows, cols, data), rank_tol);
    else
      *rank = fd::numerical_rank<fd::Complex>(
          matrix_from_buffer<fd::Complex>(rows, cols, data), rank_tol);
    return FD_OK;
  });
}

fd_status fd_frame_create(fd_field field, int64_t rows, int64_t cols,
                          const double* data, double rank_tol, fd_frame** out) {
  if (!data || !out) return bad_argument("fd_frame_create: null argument");
  return guarded([&]() {
    if (to_field(field) == fd::Field::Real)
      *out = new fd_frame{fd::make_frame<double>(
          matrix_from_buffer<double>(rows, cols, data), rank_tol)};
    else
      *out = new fd_frame{fd::make_frame<fd::Complex>(
          matrix_from_buffer<fd::Complex>(rows, cols, data), rank_tol)};
    return FD_OK;
  });
}

fd_status fd_frame_random(fd_field field, int64_t rows, int64_t cols,
                          uint64_t seed, double rank_tol, fd_frame** out) {
  if (!out) return bad_argument("fd_frame_random: null argument");
  return guarded([&]() {
    if (to_field(field) == fd::Field::Real)
      *out = new fd_frame{fd::random_frame<double>(rows, cols, seed, rank_tol)};
    else
      *out = new fd_frame{fd::random_frame<fd::Complex>(rows, cols, seed, rank_tol)};
    return FD_OK;
  });
}

fd_status fd_frame_load(const char* path, double rank_tol, fd_frame** out) {
  if (!path || !out) return bad_argument("fd_frame_load: null argument");
  return guarded([&]() {
    fd::TypedMatrix m = fd::read_frm1_file(path);
    std::visit(
        [&](auto& mat) {
          using S = typename std::decay_t<decltype(mat)>::Scalar;
          *out = new fd_frame{fd::make_frame<S>(std::move(mat), rank_tol)};
        },
        m);
    return FD_OK;
  });
}

fd_status fd_frame_save(const fd_frame* frame, const char* path) {
  if (!frame || !path) return bad_argument("fd_frame_save: null argument");
  return guarded([&]() {
    std::visit([&](const auto& f) { fd::write_frm1_file(path, f.elements()); },
               frame->value);
    return FD_OK;
  });
}

fd_status fd_frame_dims(const fd_frame* frame, fd_field* field, int64_t* rows,
                        int64_t* cols) {
  if (!frame || !field || !rows || !cols)
    return bad_argument("fd_frame_dims: null argument");
  std::visit(
      [&](const auto& f) {
        *field = from_field(f.field());
        *rows = f.dim();
        *cols = f.count();
      },
      frame->value);
  return FD_OK;
}

fd_status fd_frame_data(const fd_frame* frame, double* out, size_t out_len) {
  if (!frame || !out) return bad_argument("fd_frame_data: null argument");
  return guarded([&]() {
    return std::visit(
        [&](const auto& f) {
          using S = typename std::decay_t<decltype(f.elements()(0, 0))>;
          if (out_len != buffer_len(f.field(), f.dim(), f.count()))
            return bad_argument("fd_frame_data: wrong buffer length");
          matrix_to_buffer<S>(f.elements(), out);
          return FD_OK;
        },
        frame->value);
  });
}

fd_status fd_frame_bounds(const fd_frame* frame, double* lower, double* upper) {
  if (!frame || !lower || !upper)
    return bad_argument("fd_frame_bounds: null argument");
  return guarded([&]() {
    std::visit(
        [&](const auto& f) {
          fd::FrameBounds b = fd::frame_bounds(f);
          *lower = b.lower;
          *upper = b.upper;
        },
        frame->value);
    return FD_OK;
  });
}

void fd_frame_destroy(fd_frame* frame) { delete frame; }

fd_status fd_canonical_dual(const fd_frame* frame, double cond_limit,
                            fd_dual** out) {
  if (!frame || !out) return bad_argument("fd_canonical_dual: null argument");
  return guarded([&]() {
    std::visit(
        [&](const auto& f) { *out = new fd_dual{fd::canonical_dual(f, cond_limit)}; },
        frame->value);
    return FD_OK;
  });
}

fd_status fd_pinv_dual(const fd_frame* frame, fd_dual** out) {
  if (!frame || !out) return bad_argument("fd_pinv_dual: null argument");
  return guarded([&]() {
    std::visit([&](const auto& f) { *out = new fd_dual{fd::pinv_dual(f)}; },
               frame->value);
    return FD_OK;
  });
}

fd_status fd_random_dual(const fd_dual* canonical, uint64_t seed, double spread,
                         double dual_tol, fd_dual** out) {
  if (!canonical || !out) return bad_argument("fd_random_dual: null argument");
  return guarded([&]() {
    std::visit(
        [&](const auto& pair) {
          *out = new fd_dual{fd::random_dual(pair, seed, spread, dual_tol)};
        },
        canonical->value);
    return FD_OK;
  });
}

fd_status fd_dual_attach(const fd_frame* frame, const double* data,
                         double dual_tol, fd_dual** out) {
  if (!frame || !data || !out) return bad_argument("fd_dual_attach: null argument");
  return guarded([&]() {
    std::visit(
        [&](const auto& f) {
          using S = typename std::decay_t<decltype(f.elements()(0, 0))>;
          *out = new fd_dual{fd::attach_dual<S>(
              f, matrix_from_buffer<S>(f.dim(), f.count(), data), dual_tol)};
        },
        frame->value);
    return FD_OK;
  });
}

fd_status fd_dual_info(const fd_dual* dual, int* is_canonical, double* residual,
                       double* condition_estimate) {
  if (!dual) return bad_argument("fd_dual_info: null argument");
  std::visit(
      [&](const auto& pair) {
        if (is_canonical) *is_canonical = pair.is_canonical ? 1 : 0;
        if (residual) *residual = pair.duality_residual;
        if (condition_estimate) *condition_estimate = pair.condition_estimate;
      },
      dual->value);
  return FD_OK;
}

fd_status fd_dual_data(const fd_dual* dual, double* out, size_t out_len) {
  if (!dual || !out) return bad_argument("fd_dual_data: null argument");
  return guarded([&]() {
    return std::visit(
        [&](const auto& pair) {
          using S = typename std::decay_t<decltype(pair.dual(0, 0))>;
          if (out_len !=
              buffer_len(pair.frame.field(), pair.dual.rows(), pair.dual.cols()))
            return bad_argument("fd_dual_data: wrong buffer length");
          matrix_to_buffer<S>(pair.dual, out);
          return FD_OK;
        },
        dual->value);
  });
}

fd_status fd_dual_save(const fd_dual* dual, const char* path) {
  if (!dual || !path) return bad_argument("fd_dual_save: null argument");
  return guarded([&]() {
    std::visit([&](const auto& pair) { fd::write_frm1_file(path, pair.dual); },
               dual->value);
    return FD_OK;
  });
}

fd_status fd_duality_error(const fd_frame* frame, const double* dual_data,
                           double* out) {
  if (!frame || !dual_data || !out)
    return bad_argument("fd_duality_error: null argument");
  return guarded([&]() {
    std::visit(
        [&](const auto& f) {
          using S = typename std::decay_t<decltype(f.elements()(0, 0))>;
          fd::MatrixX<S> z = matrix_from_buffer<S>(f.dim(), f.count(), dual_data);
          *out = fd::duality_error<S>(f, z);
        },
        frame->value);
    return FD_OK;
  });
}

void fd_dual_destroy(fd_dual* dual) { delete dual; }

fd_status fd_erasure_create(int64_t total, const int64_t* one_based, int64_t k,
                            fd_erasure** out) {
  if (!one_based || !out || k < 1)
    return bad_argument("fd_erasure_create: null argument or empty set");
  return guarded([&]() {
    std::vector<std::int64_t> ones(one_based, one_based + k);
    *out = new fd_erasure{fd::ErasureSet::from_one_based(total, ones)};
    return FD_OK;
  });
}

fd_status fd_erasure_random(int64_t total, int64_t k, uint64_t seed,
                            fd_erasure** out) {
  if (!out) return bad_argument("fd_erasure_random: null argument");
  return guarded([&]() {
    *out = new fd_erasure{fd::random_erasure(total, k, seed)};
    return FD_OK;
  });
}

fd_status fd_erasure_info(const fd_erasure* erasure, int64_t* total, int64_t* k) {
  if (!erasure) return bad_argument("fd_erasure_info: null argument");
  if (total) *total = erasure->value.total();
  if (k) *k = erasure->value.k();
  return FD_OK;
}

fd_status fd_erasure_indices(const fd_erasure* erasure, int64_t* out,
                             size_t out_len) {
  if (!erasure || !out) return bad_argument("fd_erasure_indices: null argument");
  auto ones = erasure->value.erased_one_based();
  if (out_len != ones.size())
    return bad_argument("fd_erasure_indices: wrong buffer length");
  std::copy(ones.begin(), ones.end(), out);
  return FD_OK;
}

void fd_erasure_destroy(fd_erasure* erasure) { delete erasure; }

fd_status fd_mrc_check(const fd_frame* frame, const fd_erasure* erasure,
                       double rank_tol, int* ok) {
  if (!frame || !erasure || !ok) return bad_argument("fd_mrc_check: null argument");
  return guarded([&]() {
    std::visit(
        [&](const auto& f) {
          *ok = fd::mrc_check(f, erasure->value, rank_tol) ? 1 : 0;
        },
        frame->value);
    return FD_OK;
  });
}

fd_status fd_reduce(const fd_dual* dual, const fd_erasure* erasure,
                    fd_method method, const fd_tolerances* tols,
                    fd_reduced** out) {
  if (!dual || !erasure || !out) return bad_argument("fd_reduce: null argument");
  return guarded([&]() {
    return std::visit(
        [&](const auto& pair) {
          auto result =
              fd::reduce(pair, erasure->value, to_method(method), to_tols(tols));
          if (!result.ok()) {
            g_last_error = result.describe();
            return map_reduce_status(result.status);
          }
          *out = new fd_reduced{std::move(*result.dual),
                                erasure->value.erased_one_based()};
          return FD_OK;
        },
        dual->value);
  });
}

fd_status fd_reduced_info(const fd_reduced* reduced, fd_method* method,
                          int64_t* rows, int64_t* cols, double* residual) {
  if (!reduced) return bad_argument("fd_reduced_info: null argument");
  std::visit(
      [&](const auto& rd) {
        if (method)
          *method = rd.method == fd::Method::Iterative     ? FD_METHOD_ITERATIVE
                    : rd.method == fd::Method::GramSolve   ? FD_METHOD_GRAM
                                                           : FD_METHOD_OPERATOR;
        if (rows) *rows = rd.vectors.rows();
        if (cols) *cols = rd.vectors.cols();
        if (residual) *residual = rd.duality_residual;
      },
      reduced->value);
  return FD_OK;
}

fd_status fd_reduced_data(const fd_reduced* reduced, double* out, size_t out_len) {
  if (!reduced || !out) return bad_argument("fd_reduced_data: null argument");
  return guarded([&]() {
    return std::visit(
        [&](const auto& rd) {
          using S = typename std::decay_t<decltype(rd.vectors(0, 0))>;
          if (out_len != buffer_len(fd::field_of_v<S>, rd.vectors.rows(),
                                    rd.vectors.cols()))
            return bad_argument("fd_reduced_data: wrong buffer length");
          matrix_to_buffer<S>(rd.vectors, out);
          return FD_OK;
        },
        reduced->value);
  });
}

fd_status fd_reduced_save(const fd_reduced* reduced, const char* frm_path,
                          const char* sidecar_json_path) {
  if (!reduced || !frm_path) return bad_argument("fd_reduced_save: null argument");
  return guarded([&]() {
    std::visit(
        [&](const auto& rd) {
          fd::write_frm1_file(frm_path, rd.vectors);
          if (sidecar_json_path) {
            using S = typename std::decay_t<decltype(rd.vectors(0, 0))>;
            nlohmann::json steps = nlohmann::json::array();
            for (const S& d : rd.steps) steps.push_back(fd::scalar_to_json(d));
            nlohmann::json j{{"method", fd::method_name(rd.method)},
                             {"erased_indices", reduced->erased_one_based},
                             {"duality_residual", rd.duality_residual},
                             {"steps", std::move(steps)}};
            std::ofstream os(sidecar_json_path);
            fd::require(os.good(), fd::Errc::IoFailure,
                        std::string("cannot open '") + sidecar_json_path + "'");
            os << j.dump(2) << '\n';
            fd::require(os.good(), fd::Errc::IoFailure,
                        std::string("failed writing '") + sidecar_json_path + "'");
          }
        },
        reduced->value);
    return FD_OK;
  });
}

void fd_reduced_destroy(fd_reduced* reduced) { delete reduced; }

fd_status fd_equivalence_json(const fd_dual* dual, const fd_erasure* erasure,
                              double tol, const fd_tolerances* tols,
                              char** json_out) {
  if (!dual || !erasure || !json_out)
    return bad_argument("fd_equivalence_json: null argument");
  return guarded([&]() {
    std::visit(
        [&](const auto& pair) {
          auto report = fd::equivalence_check(pair, erasure->value, tol, to_tols(tols));
          *json_out = dup_string(fd::equivalence_report_json(report).dump(2));
        },
        dual->value);
    return FD_OK;
  });
}

fd_status fd_random_signal(fd_field field, int64_t dim, uint64_t seed,
                           double* out) {
  if (!out || dim < 1) return bad_argument("fd_random_signal: null or empty");
  fd::Rng rng = fd::Rng::stream(seed, 0x7369676eULL);
  if (to_field(field) == fd::Field::Real) {
    for (int64_t i = 0; i < dim; ++i) out[i] = rng.normal();
  } else {
    for (int64_t i = 0; i < 2 * dim; ++i) out[i] = rng.normal();
  }
  return FD_OK;
}

fd_status fd_transmit_json(const fd_dual* dual, const fd_erasure* erasure,
                           const double* signal, fd_method method,
                           const fd_tolerances* tols, char** json_out) {
  if (!dual || !erasure || !signal || !json_out)
    return bad_argument("fd_transmit_json: null argument");
  return guarded([&]() {
    return std::visit(
        [&](const auto& pair) {
          using S = typename std::decay_t<decltype(pair.dual(0, 0))>;
          Eigen::Map<const fd::VectorX<S>> h(reinterpret_cast<const S*>(signal),
                                             pair.frame.dim());
          fd::TransmissionReport report = fd::transmit<S>(
              pair, erasure->value, h, to_method(method), to_tols(tols));
          *json_out = dup_string(report.to_json().dump(2));
          switch (report.status) {
            case fd::TransmitStatus::Recovered: return FD_OK;
            case fd::TransmitStatus::MrcViolated:
              g_last_error = "erasure violates the minimal redundancy condition";
              return FD_ERR_MRC_VIOLATED;
            case fd::TransmitStatus::ConstructionFailed:
              g_last_error = report.failure_detail;
              return map_reduce_status(report.failure_kind);
          }
          return FD_ERR_INTERNAL;
        },
        dual->value);
  });
}

fd_status fd_bench_run(const char* config_json, const char* csv_path,
                       char** csv_text_out) {
  if (!config_json) return bad_argument("fd_bench_run: null config");
  return guarded([&]() {
    auto configs = fd::parse_bench_configs(config_json);
    std::ostringstream text;
    fd::run_suite(configs, text);
    if (csv_path) {
      std::ofstream os(csv_path);
      fd::require(os.good(), fd::Errc::IoFailure,
                  std::string("cannot open '") + csv_path + "' for writing");
      os << text.str();
      fd::require(os.good(), fd::Errc::IoFailure,
                  std::string("failed writing '") + csv_path + "'");
    }
    if (csv_text_out) *csv_text_out = dup_string(text.str());
    return FD_OK;
  });
}

}  // extern "C"

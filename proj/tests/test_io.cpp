#include "doctest.h"

#include <sstream>

#include "framedual/frm_io.hpp"
#include "helpers.hpp"

using namespace framedual;
using testutil::thrown_code;

TEST_CASE("FRM1 writes the documented layout") {
  MatrixX<double> m(2, 3);
  m << 1, 2, 3, 4, 5, 0.5;
  std::ostringstream os;
  write_frm1(os, m);
  CHECK(os.str() == "FRM1 real 2 3\n1 2 3\n4 5 0.5\n");

  MatrixX<Complex> c(1, 2);
  c << Complex(1, 2), Complex(-0.5, -0.25);
  std::ostringstream osc;
  write_frm1(osc, c);
  CHECK(osc.str() == "FRM1 complex 1 2\n1+2i -0.5-0.25i\n");
}

TEST_CASE("FRM1 round trip is bit exact for real matrices") {
  Rng rng(1);
  MatrixX<double> m(4, 5);
  for (Index j = 0; j < m.cols(); ++j)
    for (Index i = 0; i < m.rows(); ++i)
      m(i, j) = rng.normal() * std::pow(10.0, rng.below(600) - 300);
  m(0, 0) = 0.0;
  m(1, 0) = -0.0;
  m(2, 0) = 1.7976931348623157e308;
  m(3, 0) = 5e-324;  // denormal
  std::ostringstream os;
  write_frm1(os, m);
  std::istringstream is(os.str());
  auto back = std::get<MatrixX<double>>(read_frm1(is));
  REQUIRE(back.rows() == m.rows());
  REQUIRE(back.cols() == m.cols());
  CHECK(back == m);
  // signed zero survives
  CHECK(std::signbit(back(1, 0)));
}

TEST_CASE("FRM1 round trip is bit exact for complex matrices") {
  Rng rng(2);
  MatrixX<Complex> m(3, 4);
  for (Index j = 0; j < m.cols(); ++j)
    for (Index i = 0; i < m.rows(); ++i)
      m(i, j) = Complex(rng.normal() * std::pow(10.0, rng.below(40) - 20),
                        rng.normal() * std::pow(10.0, rng.below(40) - 20));
  std::ostringstream os;
  write_frm1(os, m);
  std::istringstream is(os.str());
  auto back = std::get<MatrixX<Complex>>(read_frm1(is));
  CHECK(back == m);
}

TEST_CASE("FRM1 parses exponent-heavy complex tokens") {
  std::istringstream is("FRM1 complex 1 3\n1e-5+2e+7i -3+0i 0-0.5i\n");
  auto m = std::get<MatrixX<Complex>>(read_frm1(is));
  CHECK(m(0, 0) == Complex(1e-5, 2e7));
  CHECK(m(0, 1) == Complex(-3, 0));
  CHECK(m(0, 2) == Complex(0, -0.5));
}

TEST_CASE("FRM1 rejects malformed input") {
  auto code = [](const std::string& text) {
    return thrown_code([&] {
      std::istringstream is(text);
      read_frm1(is);
    });
  };
  CHECK(code("") == Errc::ParseError);
  CHECK(code("FRM2 real 1 1\n0\n") == Errc::ParseError);
  CHECK(code("FRM1 rational 1 1\n0\n") == Errc::ParseError);
  CHECK(code("FRM1 real 0 2\n") == Errc::ParseError);
  CHECK(code("FRM1 real 2 2\n1 2\n") == Errc::ParseError);           // missing row
  CHECK(code("FRM1 real 1 3\n1 2\n") == Errc::ParseError);           // short row
  CHECK(code("FRM1 real 1 1\n1 2\n") == Errc::ParseError);           // long row
  CHECK(code("FRM1 real 1 1\nbogus\n") == Errc::ParseError);         // bad entry
  CHECK(code("FRM1 real 1 1\ninf\n") == Errc::ParseError);           // nonfinite
  CHECK(code("FRM1 complex 1 1\n1 + 2i\n") == Errc::ParseError);     // spaces
  CHECK(code("FRM1 complex 1 1\n1+2j\n") == Errc::ParseError);
  CHECK(code("FRM1 complex 1 1\n7\n") == Errc::ParseError);          // missing imag
}

TEST_CASE("file round trip through the filesystem") {
  const std::string path = "frm_roundtrip_test.frm";
  MatrixX<double> m(2, 2);
  m << 0.1, -2.5e-17, 3.14159265358979312, 4;
  write_frm1_file(path, m);
  auto back = std::get<MatrixX<double>>(read_frm1_file(path));
  CHECK(back == m);
  std::remove(path.c_str());

  CHECK(thrown_code([] { read_frm1_file("does_not_exist.frm"); }) ==
        Errc::IoFailure);
}

TEST_CASE("reduced dual sidecar lists method, indices and denominators") {
  auto f = make_frame<double>(testutil::e112<double>());
  auto canon = canonical_dual(f);
  ErasureSet erasure(3, {0});
  auto result = reduced_dual_iterative(canon, erasure);
  REQUIRE(result.ok());
  nlohmann::json j = reduced_sidecar_json(*result.dual, erasure);
  CHECK(j["method"] == "iterative");
  CHECK(j["erased_indices"] == nlohmann::json::array({1}));
  CHECK(j["steps"].size() == 1);
  CHECK(j["steps"][0].get<double>() == doctest::Approx(0.5));
  CHECK(j["duality_residual"].get<double>() <= 1e-14);

  auto gram = reduced_dual_gram(canon, erasure);
  nlohmann::json jg = reduced_sidecar_json(*gram.dual, erasure);
  CHECK(jg["method"] == "gram");
  CHECK(jg["steps"].empty());
}

TEST_CASE("complex denominators serialize in entry syntax") {
  MatrixX<Complex> x = MatrixX<Complex>::Zero(2, 3);
  x(0, 0) = Complex(0, 1);
  x(0, 1) = Complex(1, 0);
  x(1, 2) = Complex(1, 0);
  auto f = make_frame<Complex>(std::move(x));
  auto canon = canonical_dual(f);
  ErasureSet erasure(3, {0});
  auto result = reduced_dual_iterative(canon, erasure);
  REQUIRE(result.ok());
  nlohmann::json j = reduced_sidecar_json(*result.dual, erasure);
  CHECK(j["steps"][0].is_string());
  Complex parsed;
  REQUIRE(framedual::detail::parse_complex_token(
      j["steps"][0].get<std::string>(), parsed));
  CHECK(std::abs(parsed - result.dual->steps[0]) == 0.0);
}

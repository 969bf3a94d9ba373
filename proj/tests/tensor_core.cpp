#include "qexch/matrix_io.hpp"
#include "test_util.hpp"

using namespace qexch;
using qexch::test::random_matrix;

TEST_SUITE("tensor-core") {
  TEST_CASE("exact scalar field operations") {
    ExactScalar a = ExactScalar::parse("3/4+1/2i"), b = ExactScalar::parse("-2/5");
    CHECK((a * a.inverse()).is_one());
    CHECK((a + b) - b == a);
    CHECK(a * b == b * a);
    CHECK(ExactScalar::i() * ExactScalar::i() == ExactScalar(-1));
    CHECK(ExactScalar::parse(a.to_string()) == a);
    CHECK(ExactScalar::parse(b.to_string()) == b);
    CHECK_THROWS_AS(ExactScalar().inverse(), DivisionByZero);
  }

  TEST_CASE("scalar and matrix literals round trip bit-exactly") {
    Sampler s(5);
    Matrix m = random_matrix(IndexSet::range(1, 2, 3), s);
    auto j = matrix_to_json(m);
    Matrix back = matrix_from_json(j);
    CHECK(back == m);
    CHECK(dump_json(matrix_to_json(back)) == dump_json(j));
    ExactScalar big(mpq_class("123456789012345678901234567890/7"), mpq_class(-1, 3));
    CHECK(scalar_from_json(scalar_to_json(big)) == big);
    CHECK_THROWS_AS(matrix_from_json(nlohmann::json{{"legs", legs_to_json(IndexSet::range(1, 1, 2))},
                                                    {"entries", nlohmann::json::array()}}),
                    StructuralError);
  }

  TEST_CASE("kron matches the index formula") {
    Sampler s(1);
    Matrix x = random_matrix(IndexSet::range(1, 1, 2), s), y = random_matrix(IndexSet::range(2, 1, 3), s);
    Matrix k = kron(x, y);
    for (std::size_t i1 = 0; i1 < 2; ++i1)
      for (std::size_t i2 = 0; i2 < 3; ++i2)
        for (std::size_t j1 = 0; j1 < 2; ++j1)
          for (std::size_t j2 = 0; j2 < 3; ++j2) CHECK(k(i1 * 3 + i2, j1 * 3 + j2) == x(i1, j1) * y(i2, j2));
  }

  TEST_CASE("partial transpose and partial trace match brute-force loops") {
    Sampler s(2);
    const std::size_t n = 3;
    Matrix x = random_matrix(IndexSet::range(1, 2, 3), s);
    Matrix pt = partial_transpose(x, {1});
    Matrix tr = partial_trace(x, {2});
    for (std::size_t a1 = 0; a1 < n; ++a1)
      for (std::size_t a2 = 0; a2 < n; ++a2)
        for (std::size_t b1 = 0; b1 < n; ++b1)
          for (std::size_t b2 = 0; b2 < n; ++b2) CHECK(pt(a1 * n + a2, b1 * n + b2) == x(b1 * n + a2, a1 * n + b2));
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b) {
        ExactScalar acc;
        for (std::size_t c = 0; c < n; ++c) acc += x(a * n + c, b * n + c);
        CHECK(tr(a, b) == acc);
      }
    CHECK(partial_transpose(partial_transpose(x, {2}), {2}) == x);
  }

  TEST_CASE("swap operator exchanges tensor factors") {
    Sampler s(3);
    IndexSet legs = IndexSet::range(1, 2, 2);
    Matrix x = random_matrix(IndexSet::range(1, 1, 2), s), y = random_matrix(IndexSet::range(2, 1, 2), s);
    Matrix p = swap_operator<ExactScalar>(legs, 1, 2);
    Matrix xy = kron(x, y);
    Matrix yx = kron(y.with_legs(IndexSet::range(1, 1, 2)), x.with_legs(IndexSet::range(2, 1, 2)));
    CHECK(p * xy * p == yx);
    CHECK(p * p == Matrix::identity(legs));
  }

  TEST_CASE("exact inverse and singular pivots") {
    Sampler s(4);
    Matrix x = random_matrix(IndexSet::range(1, 2, 2), s);
    CHECK(x * inverse(x) == Matrix::identity(x.legs()));
    Matrix z(IndexSet::range(1, 1, 2));
    z(0, 0) = ExactScalar(1);
    CHECK_THROWS_AS(inverse(z), SingularMatrix);
  }

  TEST_CASE("leg mismatches are rejected") {
    Matrix a = Matrix::identity(IndexSet::range(1, 1, 2)), b = Matrix::identity(IndexSet::range(2, 1, 2));
    CHECK_THROWS_AS(a * b, LegError);
    CHECK_THROWS_AS(IndexSet::range(1, 2, 2).concat(IndexSet::range(2, 1, 2)), LegError);
  }
}

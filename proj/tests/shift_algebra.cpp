#include "qexch/trace.hpp"
#include "test_util.hpp"

using namespace qexch;

namespace {

DifferenceOperator random_operator(Sampler& s, int n, const ExactScalar& gamma) {
  std::vector<ShiftTerm> terms;
  for (int t = 0; t < 3; ++t) {
    ShiftVec mu(static_cast<std::size_t>(n), 0);
    mu[static_cast<std::size_t>(t % n)] = t - 1;
    ExactScalar c0 = s.rational(), c1 = s.rational();
    terms.push_back({[c0, c1](const LambdaPoint& l) { return c0 + c1 * l.coords[0]; }, mu});
  }
  return DifferenceOperator::from_terms(n, gamma, terms);
}

}  // namespace

TEST_SUITE("shift-algebra") {
  TEST_CASE("exp_D has the weight shifts on its diagonal") {
    auto e = exp_D(IndexSet::range(1, 1, 2), 2, ExactScalar(1), +1);
    auto at = e.at(qexch::test::point({ExactScalar::rational(1, 3), ExactScalar(2)}));
    CHECK(at[0] == ShiftExpansion{{{1, 0}, ExactScalar(1)}});
    CHECK(at[3] == ShiftExpansion{{{0, 1}, ExactScalar(1)}});
    CHECK(at[1].empty());
    Sampler s(1);
    IndexSet m = IndexSet::range(1, 2, 3);
    CHECK(shift_matrix_equal(exp_D(m, 3, 1, +1) * exp_D(m, 3, 1, -1), ShiftMatrix::identity(m, 3, 1), s, 3).equal);
  }

  TEST_CASE("difference operator composition is associative") {
    Sampler s(2);
    auto p = random_operator(s, 2, 1), q = random_operator(s, 2, 1), r = random_operator(s, 2, 1);
    CHECK(diffop_equal((p * q) * r, p * (q * r), s, 5).equal);
    CHECK(diffop_equal(p * q, q * p, s, 5).equal == false);
  }

  TEST_CASE("diffop_equal reports a witness for a perturbed coefficient") {
    Sampler s(3);
    auto p = random_operator(s, 2, 1);
    auto q = p + DifferenceOperator::constant(2, 1, ExactScalar(1));
    auto r = diffop_equal(p, q, s, 3);
    CHECK_FALSE(r.equal);
    REQUIRE(r.witness);
    CHECK(r.witness->shift == ShiftVec{0, 0});
    CHECK(r.witness->rhs - r.witness->lhs == ExactScalar(1));
  }

  TEST_CASE("entry-wise shift matches the projector expansion") {
    // X_1(lambda + gamma h_3) = sum_k X_1(lambda + gamma e_k) (x) E_kk on leg 3
    Sampler s(4);
    const int n = 3;
    DynPtr x = random_dynamical(s, n, 1, ExactScalar::rational(1, 2), false);
    IndexSet legs = IndexSet::range(1, 1, n).concat(IndexSet::range(3, 1, n));
    LambdaPoint l = s.lambda(n, ExactScalar::rational(1, 2));
    Matrix lhs = evaluate(Word::factor(x, {1}).shifted({3}), legs, l);
    Matrix rhs(legs);
    for (int k = 0; k < n; ++k) {
      std::vector<int> mu(n, 0);
      mu[static_cast<std::size_t>(k)] = 1;
      Matrix xk = x->eval(l.shifted(mu, ExactScalar::rational(1, 2))).with_legs(IndexSet::range(1, 1, n));
      rhs = rhs + kron(xk, elementary<ExactScalar>({3, n}, k, k));
    }
    CHECK(lhs == rhs);
  }

  TEST_CASE("SL then inverse SL is the identity transformation") {
    Sampler s(5);
    DynPtr x = random_dynamical(s, 2, 2, 1, false);
    DynPtr back = sl_sc(sl_sc(x, {0, 1}, ShiftMode::SL, +1), {0, 1}, ShiftMode::SL, -1);
    for (int t = 0; t < 3; ++t) {
      LambdaPoint l = s.lambda(2, 1);
      CHECK(back->eval(l) == x->eval(l));
    }
    Matrix c = qexch::test::random_matrix(IndexSet::range(0, 1, 2), s);
    DynPtr k = constant_matrix("K", c, x->params());
    CHECK(sl_sc(k, {0}, ShiftMode::SC, +1)->eval(s.lambda(2, 1)) == c);
  }

  TEST_CASE("SC shift equals conjugation by exp_D for leg-diagonal matrices") {
    Sampler s(6);
    for (int t = 0; t < 3; ++t) {
      auto r = check_sc_conjugation(random_dynamical(s, 3, 1, 1, true), s, 4);
      CHECK_MESSAGE(r.pass, r.witness);
    }
  }

  TEST_CASE("lemma identities on trivial and random inputs") {
    Sampler s(7);
    DynParams p;
    p.n = 2;
    DynPtr id = constant_matrix("Id", Matrix::identity(IndexSet::range(0, 2, 2)), p);
    DynPtr x = random_dynamical(s, 2, 2, 1, false);
    CHECK(check_trace_cyclic(id, x, s, 3).pass);
    CHECK(check_dyn_transpose(id, id, s, 3).pass);
    CHECK(check_dyn_transpose(x, random_dynamical(s, 2, 2, 1, false), s, 3).pass);
    CHECK(check_push_through(random_dynamical(s, 2, 2, 1, true), s, 3).pass);
    CHECK(check_trace_cyclic(random_dynamical(s, 2, 2, 1, true), x, s, 3).pass);
    // a lambda-independent matrix is its own push-through
    Matrix c = qexch::test::random_matrix(IndexSet::range(0, 1, 2), s);
    for (std::size_t a = 0; a < 2; ++a)
      for (std::size_t b = 0; b < 2; ++b)
        if (a != b) c(a, b) = ExactScalar();
    DynPtr k = constant_matrix("K", c, p);
    CHECK(push_through(k)->eval(s.lambda(2, 1)) == c);
  }

  TEST_CASE("push-through rejects matrices without total zero weight") {
    Sampler s(8);
    CHECK_THROWS_AS(push_through(random_dynamical(s, 2, 2, 1, false)), std::invalid_argument);
  }

  TEST_CASE("operator dump lists shift vectors with coefficients per sample") {
    auto h = DifferenceOperator::shift(2, 1, {1, 0}) + DifferenceOperator::shift(2, 1, {0, 1});
    auto j = dump_operator(h, {qexch::test::point({ExactScalar(1), ExactScalar(3)})});
    REQUIRE(j.size() == 2);
    CHECK(j[0]["shift"] == nlohmann::json({0, 1}));
    CHECK(j[0]["coeff_at"][0]["value"] == nlohmann::json({1, 1, 0, 1}));
  }
}

#include "test_util.hpp"

using namespace qexch;

TEST_SUITE("trace-lab") {
  TEST_CASE("identity data trace to the dimension") {
    auto e = make_identity(Regime::Nondynamical, 3);
    auto h = build_hamiltonian(e.q, trace_source(e.q, e.solution, IndexSet::range(1, 1, 3)));
    CHECK(scalar_value(h) == ExactScalar(3));
  }

  TEST_CASE("identity data give the sum of unit shifts in the semi-dynamical regime") {
    auto e = make_identity(Regime::Semidynamical, 2);
    auto h = build_hamiltonian(e.q, trace_source(e.q, e.solution, IndexSet::range(1, 1, 2)));
    auto expected = DifferenceOperator::shift(2, 1, {1, 0}) + DifferenceOperator::shift(2, 1, {0, 1});
    Sampler s(1);
    CHECK(diffop_equal(h.op, expected, s, 3).equal);
  }

  TEST_CASE("trace routes agree and traces decouple without dressing") {
    for (const std::string name : {"rs", "fully-rs"}) {
      CAPTURE(name);
      auto e = catalog_entry(name, 2);
      Sampler s(2);
      IndexSet m = IndexSet::range(1, 2, 2);
      CHECK(check_trace_routes(e.q, trace_source(e.q, e.solution, m), s, 3).status == Status::Pass);
      CHECK(check_decoupling(e.q, e.solution, m, s, 3).status == Status::Pass);
    }
    auto y = catalog_entry("twisted-yangian", 2);
    Sampler s(3);
    CHECK(check_decoupling(y.q, y.solution, IndexSet::range(1, 2, 2), s, 3).status == Status::Pass);
  }

  TEST_CASE("dressed traces commute and do not decouple for RS") {
    auto e = catalog_entry("rs", 2);
    Sampler s(4);
    TraceOptions o{true, false, {DressMode::Left, false}};
    auto h2 = build_hamiltonian(e.q, trace_source(e.q, e.solution, IndexSet::range(1, 2, 2), o));
    auto h1 = build_hamiltonian(e.q, trace_source(e.q, e.solution, IndexSet::range(101, 1, 2), o));
    auto r = commute(h2, h1, "H_2, H_1'", s, 5);
    CHECK(r.equal);
    CHECK(r.max_residual == "0");
    CHECK(commute(h2, h2, "H_2, H_2", s, 2).equal);
    CHECK(check_nontrivial(e.q, e.solution, IndexSet::range(1, 2, 2), o, s, 3).status == Status::Pass);
  }

  TEST_CASE("a corrupted K gives a nonzero commutator with a witness") {
    auto e = catalog_entry("rs", 2);
    Matrix k = Matrix::identity(IndexSet::range(0, 1, 2));
    k(0, 1) = ExactScalar(1);
    e.solution.K = constant_matrix("K", k, e.q.params);
    Sampler s(5);
    TraceOptions o{true, false, {DressMode::Left, false}};
    auto h2 = build_hamiltonian(e.q, trace_source(e.q, e.solution, IndexSet::range(1, 2, 2), o));
    auto h1 = build_hamiltonian(e.q, trace_source(e.q, e.solution, IndexSet::range(101, 1, 2), o));
    auto r = commute(h2, h1, "H_2, H_1'", s, 5);
    CHECK_FALSE(r.equal);
    CHECK(r.max_residual.find("shift") != std::string::npos);
    CHECK(commutation_check(r).status == Status::Fail);
  }

  TEST_CASE("both fusion procedures give the same dressed trace") {
    for (const std::string name : {"yangian", "twisted-yangian", "rs"}) {
      CAPTURE(name);
      auto e = catalog_entry(name, 2);
      Sampler s(6);
      CHECK(check_identification(e.q, e.solution, IndexSet::range(1, 2, 2), {}, s, 3).status == Status::Pass);
    }
  }

  TEST_CASE("dual screen") {
    Sampler s(7);
    auto rs = dual_candidate_screen(catalog_entry("rs", 2).q, "constant-diagonal", s, 3);
    CHECK(rs["outcome"] == "every constant diagonal K solves");
    CHECK(dual_candidate_screen(catalog_entry("rs", 2).q, "identity", s, 3)["outcome"] == "solves");
    Matrix zero(IndexSet::range(0, 1, 2));
    CHECK(dual_candidate_screen(catalog_entry("rs", 2).q, "file", s, 3, zero)["outcome"] == "excluded");
    CHECK(dual_candidate_screen(catalog_entry("fully-rs", 2).q, "identity", s, 3)["outcome"] == "fails");
  }

  TEST_CASE("traces need a dual solution") {
    auto e = catalog_entry("rs", 2);
    e.solution.K = nullptr;
    CHECK_THROWS_AS(trace_source(e.q, e.solution, IndexSet::range(1, 1, 2)), StructuralError);
  }
}

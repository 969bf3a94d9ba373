#include "test_util.hpp"

using namespace qexch;
using qexch::test::all_pass;
using qexch::test::any_fail;

TEST_SUITE("fusion-engine") {
  TEST_CASE("single legs reproduce the base matrices") {
    auto e = catalog_entry("rs", 2);
    Fuser f(e.q);
    IndexSet legs = IndexSet::range(1, 1, 2).concat(IndexSet::range(101, 1, 2));
    Sampler s(1);
    LambdaPoint l = s.lambda(2, 1);
    for (Role r : {Role::A, Role::B, Role::C, Role::D})
      CHECK(evaluate(f.structure(r, {1}, {101}), legs, l) ==
            evaluate(Word::factor(role_matrix(e.q, r), {1, 101}), legs, l));
    CHECK(evaluate(fuse_T(f, e.solution.T, {1}), IndexSet::range(1, 1, 2), l) ==
          e.solution.T->eval(l).with_legs(IndexSet::range(1, 1, 2)));
  }

  TEST_CASE("non-dynamical fused A is the ordered product of embedded factors") {
    auto e = catalog_entry("yangian", 2);
    Fuser f(e.q);
    Sampler s(2);
    auto u = s.spectral(3);
    IndexSet target = IndexSet::range(1, 2, 2).concat(IndexSet::range(101, 1, 2)).with_spectral(u);
    LambdaPoint l = s.lambda(2, 1);
    auto placed = [&](LegId a, const ExactScalar& ua) {
      IndexSet on({{a, 2}, {101, 2}});
      return embed(e.q.A->eval(l, {ua, u[2]}).with_legs(on), target.without_spectral());
    };
    Matrix oracle = placed(1, u[0]) * placed(2, u[1]);
    CHECK(evaluate(f.structure(Role::A, {1, 2}, {101}), target, l).with_legs(target.without_spectral()) == oracle);
  }

  TEST_CASE("requests are memoized") {
    Fuser f(catalog_entry("rs", 2).q);
    f.structure(Role::B, {1, 2}, {101, 102});
    auto size = f.memo_size();
    f.structure(Role::B, {1, 2}, {101, 102});
    CHECK(f.memo_size() == size);
  }

  TEST_CASE("recursive and closed fused solutions agree in every regime") {
    for (const std::string name : {"yangian", "rs", "fully-rs"}) {
      CAPTURE(name);
      auto e = catalog_entry(name, 2);
      Sampler s(3);
      CHECK(check_T_closed_form(e.q, e.solution.T, IndexSet::range(1, 3, 2), s, 2).status == Status::Pass);
    }
  }

  TEST_CASE("fused structure and solutions on (2, 2)") {
    for (const std::string name : {"kulish-sklyanin", "rs", "fully-rs"}) {
      CAPTURE(name);
      auto e = catalog_entry(name, 2);
      Sampler s(4);
      IndexSet m = IndexSet::range(1, 2, 2), np = IndexSet::range(101, 2, 2);
      CHECK(all_pass(check_split_agreement(e.q, m, np, s, 2)));
      CHECK(all_pass(check_fused_solutions(e.q, e.solution, m, np, s, 2)));
      CHECK(all_pass(check_kernel(e.q, m, np, s, 2)));
      CHECK(all_pass(check_second_fusion(e.q, e.solution, m, np, s, 2)));
      CHECK(all_pass(check_dual_of_fused(e.q, m, IndexSet::range(101, 1, 2), s, 2)));
    }
  }

  TEST_CASE("second fusion closed product shifts whole blocks on three legs") {
    for (int n : {2, 3}) {
      CAPTURE(n);
      auto e = catalog_entry("rs", n);
      Sampler s(8);
      CHECK(all_pass(check_second_fusion(e.q, e.solution, IndexSet::range(1, 3, n), IndexSet::range(101, 1, n), s, 2)));
    }
  }

  TEST_CASE("fused Yang-Baxter system on (2, 1, 1)") {
    for (const std::string name : {"twisted-yangian", "rs", "fully-rs"}) {
      CAPTURE(name);
      auto e = catalog_entry(name, 2);
      Sampler s(5);
      CHECK(all_pass(verify_fused_yb(e.q, IndexSet::range(1, 2, 2), IndexSet::range(101, 1, 2),
                                     IndexSet::range(201, 1, 2), s, 2)));
    }
  }

  TEST_CASE("a wrong solution fails the fused exchange relation") {
    auto e = catalog_entry("rs", 2);
    Matrix t = Matrix::identity(IndexSet::range(0, 1, 2));
    t(1, 0) = ExactScalar(2);
    e.solution.T = constant_matrix("T", t, e.q.params);
    e.solution.K = nullptr;
    Sampler s(6);
    CHECK(any_fail(check_fused_solutions(e.q, e.solution, IndexSet::range(1, 2, 2), IndexSet::range(101, 1, 2), s, 2)));
  }

  TEST_CASE("requests above the budget are refused") {
    auto e = catalog_entry("rs", 3);
    Sampler s(7);
    CHECK_THROWS_AS(verify_fused_yb(e.q, IndexSet::range(1, 3, 3), IndexSet::range(101, 2, 3),
                                    IndexSet::range(201, 2, 3), s, 1, 729),
                    BudgetExceeded);
  }

  TEST_CASE("provenance records the recursion tree") {
    Fuser f(catalog_entry("rs", 2).q);
    auto p = f.provenance(Role::B, {1, 2}, {101});
    CHECK(p["matrix"] == "B");
    CHECK(p.contains("first"));
    CHECK(p.contains("rest"));
  }
}

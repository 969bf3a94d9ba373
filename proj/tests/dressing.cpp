#include "test_util.hpp"

using namespace qexch;
using qexch::test::all_pass;

TEST_SUITE("dressing") {
  TEST_CASE("single legs have trivial dressing") {
    auto e = catalog_entry("rs", 2);
    auto p = build_dressing(e.q, {1});
    Sampler s(1);
    LambdaPoint l = s.lambda(2, 1);
    IndexSet m = IndexSet::range(1, 1, 2);
    CHECK(evaluate(p.Q, m, l) == Matrix::identity(m));
    CHECK(evaluate(p.S, m, l) == Matrix::identity(m));
  }

  TEST_CASE("trivial structure matrices give permutation dressings") {
    Sampler s(2);
    for (int m = 2; m <= 3; ++m) CHECK(all_pass(check_classical_dressing(2, m, s)));
  }

  TEST_CASE("dressing constraints and dressed solutions hold up to |M| = 3") {
    for (const std::string name : {"rs", "fully-rs"}) {
      CAPTURE(name);
      auto e = catalog_entry(name, 2);
      Sampler s(3);
      IndexSet m = IndexSet::range(1, 3, 2), np = IndexSet::range(101, 1, 2);
      CHECK(all_pass(check_dressing_constraints(e.q, m, np, {}, s, 2)));
      CHECK(all_pass(check_dressed_solutions(e.q, e.solution, IndexSet::range(1, 2, 2), np, {}, s, 2)));
    }
  }

  TEST_CASE("spectral dressings need formal mode for |M| >= 2") {
    auto e = catalog_entry("yangian", 2);
    IndexSet m = IndexSet::range(1, 2, 2), np = IndexSet::range(101, 1, 2);
    Sampler s(4);
    auto plain = check_dressing_constraints(e.q, m, np, {}, s, 2);
    for (const auto& c : plain) CHECK(c.status == Status::Skipped);
    DressOptions formal{DressMode::Full, true};
    CHECK(all_pass(check_dressing_constraints(e.q, m, np, formal, s, 2)));
    CHECK(all_pass(check_second_dressing(e.q, e.solution, m, np, formal, s, 2)));
  }

  TEST_CASE("dress modes parse") {
    CHECK(parse_dress_mode("left") == DressMode::Left);
    CHECK(dress_mode_name(DressMode::Right) == "right");
    CHECK_THROWS_AS(parse_dress_mode("middle"), StructuralError);
  }
}

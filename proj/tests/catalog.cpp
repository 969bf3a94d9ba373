#include "qexch/matrix_io.hpp"
#include "test_util.hpp"

using namespace qexch;
using qexch::test::all_pass;
using qexch::test::any_fail;

namespace {

// Explicit-matrix bundle of the non-dynamical identity entry.
nlohmann::json explicit_bundle() {
  auto e = catalog_entry("identity", 2);
  e.q.metadata.erase("catalog");
  return bundle_to_json(e);
}

}  // namespace

TEST_SUITE("catalog") {
  TEST_CASE("every catalog entry passes its regime conditions and Yang-Baxter system at n = 2") {
    for (const auto& name : catalog_names()) {
      CAPTURE(name);
      auto e = catalog_entry(name, 2);
      Sampler s(11);
      CHECK(all_pass(check_regime(e.q, s, 3)));
      CHECK(all_pass(verify_yb(e.q, s, 3)));
      CHECK(check_base_exchange(e.q, e.solution.T, s, 3, "T", "exchange relation").status == Status::Pass);
      if (e.solution.K)
        CHECK(check_base_exchange(dual_structure(e.q), e.solution.K, s, 3, "K", "dual exchange relation").status ==
              Status::Pass);
    }
  }

  TEST_CASE("identity entries exist in every regime") {
    for (Regime r : {Regime::Nondynamical, Regime::Semidynamical, Regime::Fullydynamical}) {
      auto e = make_identity(r, 3);
      CHECK(e.q.regime == r);
      Sampler s(1);
      CHECK(all_pass(verify_yb(e.q, s, 2)));
    }
  }

  TEST_CASE("a corrupted structure matrix breaks the Yang-Baxter system") {
    auto e = catalog_entry("rs", 2);
    Sampler s(12);
    e.q.A = dyn_map(e.q.A, "A corrupted", [](const Matrix& m) {
      Matrix out = m;
      out(0, 1) += ExactScalar(1);
      return out;
    });
    CHECK(any_fail(verify_yb(e.q, s, 3)));
  }

  TEST_CASE("a wrong solution fails the exchange relation") {
    auto e = catalog_entry("rs", 2);
    Sampler s(13);
    DynParams p = e.q.params;
    Matrix t = Matrix::identity(IndexSet::range(0, 1, 2));
    t(0, 1) = ExactScalar(3);
    CHECK(check_base_exchange(e.q, constant_matrix("T", t, p), s, 3, "T", "exchange relation").status == Status::Fail);
  }

  TEST_CASE("bundles round trip and are revalidated on load") {
    auto j = explicit_bundle();
    auto load = load_bundle(j, false, 7, 3);
    CHECK_FALSE(load.forced);
    CHECK(dump_json(bundle_to_json(load.entry)) == dump_json(j));
    auto cat = load_bundle(bundle_to_json(catalog_entry("rs", 2)), false, 7, 3);
    CHECK(cat.entry.q.name == "rs");
  }

  TEST_CASE("a corrupted bundle is refused unless forced") {
    auto j = explicit_bundle();
    j["matrices"]["A"]["entries"][1] = nlohmann::json({5, 1, 0, 1});
    CHECK_THROWS_AS(load_bundle(j, false, 7, 3), StructuralError);
    auto forced = load_bundle(j, true, 7, 3);
    CHECK(forced.forced);
    CHECK(any_fail(forced.validation));
    nlohmann::json missing = explicit_bundle();
    missing["matrices"].erase("B");
    CHECK_THROWS_AS(load_bundle(missing, true, 7, 3), StructuralError);
    CHECK_THROWS_AS(load_bundle(nlohmann::json::array(), false, 7, 3), StructuralError);
  }

  TEST_CASE("a catalog bundle can drop the dual solution") {
    nlohmann::json j = {{"regime", "semidynamical"}, {"n", 2}, {"catalog", "rs"}, {"K", nullptr}};
    auto b = load_bundle(j, false, 1, 2);
    CHECK(b.entry.solution.T);
    CHECK_FALSE(b.entry.solution.K);
    j.erase("K");
    CHECK(load_bundle(j, false, 1, 2).entry.solution.K);
  }

  TEST_CASE("unknown names and regimes are structural errors") {
    CHECK_THROWS_AS(catalog_entry("nope", 2), StructuralError);
    CHECK_THROWS_AS(parse_regime("sideways"), StructuralError);
  }
}

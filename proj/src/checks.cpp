#include "qexch/checks.hpp"

namespace qexch {

std::string status_name(Status s) {
  switch (s) {
    case Status::Pass: return "pass";
    case Status::Fail: return "fail";
    case Status::Skipped: return "skipped";
    case Status::Info: return "info";
  }
  return "unknown";
}

nlohmann::json check_to_json(const Check& c) {
  nlohmann::json j = {{"name", c.name}, {"anchor", c.anchor}, {"status", status_name(c.status)},
                      {"samples", c.samples}};
  if (!c.witness.empty()) j["witness"] = c.witness;
  if (!c.detail.is_null()) j["detail"] = c.detail;
  return j;
}

IndexSet SamplePoint::attach(const IndexSet& legs) const {
  if (spectral.empty()) return legs;
  return legs.with_spectral(spectral);
}

std::string SamplePoint::to_string() const {
  std::string s = "lambda " + lambda.to_string();
  if (!spectral.empty()) {
    s += ", u (";
    for (std::size_t i = 0; i < spectral.size(); ++i) s += (i ? ", " : "") + spectral[i].to_string();
    s += ")";
  }
  return s;
}

SamplePoint draw_point(const SampleSpec& spec, Sampler& sampler, std::size_t legs) {
  SamplePoint p;
  p.lambda = sampler.lambda(spec.n, spec.gamma);
  if (spec.spectral) {
    if (spec.equal_spectral) {
      p.spectral.assign(legs, sampler.rational());
    } else {
      p.spectral = sampler.spectral(legs);
    }
  }
  return p;
}

Check run_pointwise(std::string name, std::string anchor, const SampleSpec& spec, Sampler& sampler, int k,
                    std::size_t legs, const PointBody& body, int retry_budget) {
  Check c;
  c.name = std::move(name);
  c.anchor = std::move(anchor);
  int retries = 0;
  while (c.samples < k) {
    SamplePoint p = draw_point(spec, sampler, legs);
    std::optional<std::string> w;
    try {
      w = body(p);
    } catch (const PoleError& e) {
      if (++retries > retry_budget) {
        c.status = Status::Fail;
        c.witness = std::string("pole at every retry: ") + e.what();
        return c;
      }
      continue;
    }
    ++c.samples;
    if (w) {
      c.status = Status::Fail;
      c.witness = *w + " at " + p.to_string();
      return c;
    }
  }
  return c;
}

Check word_identity(std::string name, std::string anchor, const Word& lhs, const Word& rhs, const IndexSet& legs,
                    const SampleSpec& spec, Sampler& sampler, int k) {
  return run_pointwise(std::move(name), std::move(anchor), spec, sampler, k, legs.size(),
                       [&](const SamplePoint& p) -> std::optional<std::string> {
                         auto m = compare_words(lhs, rhs, p.attach(legs), p.lambda);
                         if (m) return m->to_string();
                         return std::nullopt;
                       });
}

Check word_proportional(std::string name, std::string anchor, const Word& lhs, const Word& rhs, const IndexSet& legs,
                        const SampleSpec& spec, Sampler& sampler, int k, const ScalarFn& c) {
  std::optional<ExactScalar> common;
  auto check = run_pointwise(std::move(name), std::move(anchor), spec, sampler, k, legs.size(),
                             [&](const SamplePoint& p) -> std::optional<std::string> {
                               IndexSet target = p.attach(legs);
                               Matrix l = evaluate(lhs, target, p.lambda);
                               Matrix r = evaluate(rhs, target, p.lambda);
                               if (c) {
                                 Matrix scaled = scalar_mul(c(p), r);
                                 auto w = first_difference(l, scaled);
                                 if (w) return w->to_string();
                                 return std::nullopt;
                               }
                               auto ratio = proportionality(l, r);
                               if (!ratio) return std::string("not proportional");
                               if (common && *common != *ratio)
                                 return "ratio " + ratio->to_string() + " differs from " + common->to_string();
                               common = ratio;
                               return std::nullopt;
                             });
  if (!c && common && check.status == Status::Pass) check.detail = {{"ratio", common->to_string()}};
  return check;
}

}  // namespace qexch

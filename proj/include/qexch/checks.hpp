#pragma once

#include <functional>
#include <optional>
#include <string>

#include "json.hpp"
#include "qexch/word.hpp"

namespace qexch {

enum class Status { Pass, Fail, Skipped, Info };
std::string status_name(Status s);

struct Check {
  std::string name;
  std::string anchor;
  Status status = Status::Pass;
  std::string witness;
  int samples = 0;
  nlohmann::json detail = nullptr;
};

nlohmann::json check_to_json(const Check& c);

struct SampleSpec {
  int n = 2;
  ExactScalar gamma{1};
  bool spectral = false;
  bool equal_spectral = false;  // all legs share one spectral value
};

struct SamplePoint {
  LambdaPoint lambda;
  Spectral spectral;
  // legs with this point's spectral values attached (unchanged when not spectral)
  IndexSet attach(const IndexSet& legs) const;
  std::string to_string() const;
};

SamplePoint draw_point(const SampleSpec& spec, Sampler& sampler, std::size_t legs);

// Runs `body` at k sample points, resampling on poles; body returns a witness on failure.
using PointBody = std::function<std::optional<std::string>(const SamplePoint&)>;
Check run_pointwise(std::string name, std::string anchor, const SampleSpec& spec, Sampler& sampler, int k,
                    std::size_t legs, const PointBody& body, int retry_budget = 200);

// lhs == rhs as words on `legs`.
Check word_identity(std::string name, std::string anchor, const Word& lhs, const Word& rhs, const IndexSet& legs,
                    const SampleSpec& spec, Sampler& sampler, int k);

// lhs == c(point) * rhs for a scalar function c; c == nullopt means "any common scalar".
using ScalarFn = std::function<ExactScalar(const SamplePoint&)>;
Check word_proportional(std::string name, std::string anchor, const Word& lhs, const Word& rhs, const IndexSet& legs,
                        const SampleSpec& spec, Sampler& sampler, int k, const ScalarFn& c = {});

}  // namespace qexch

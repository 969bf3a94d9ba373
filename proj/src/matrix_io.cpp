#include "qexch/matrix_io.hpp"

#include <fstream>
#include <sstream>

namespace qexch {

namespace {

nlohmann::json integer_to_json(const mpz_class& z) {
  if (z.fits_slong_p()) return z.get_si();
  return z.get_str();
}

mpz_class integer_from_json(const nlohmann::json& j) {
  if (j.is_number_integer()) return mpz_class(std::to_string(j.get<long long>()));
  if (j.is_string()) {
    mpz_class z;
    if (z.set_str(j.get<std::string>(), 10) != 0) throw StructuralError("bad integer literal " + j.dump());
    return z;
  }
  throw StructuralError("expected integer, got " + j.dump());
}

}  // namespace

nlohmann::json scalar_to_json(const ExactScalar& s) {
  return nlohmann::json::array({integer_to_json(s.re().get_num()), integer_to_json(s.re().get_den()),
                                integer_to_json(s.im().get_num()), integer_to_json(s.im().get_den())});
}

ExactScalar scalar_from_json(const nlohmann::json& j) {
  if (j.is_string()) return ExactScalar::parse(j.get<std::string>());
  if (j.is_number_integer()) return ExactScalar(mpq_class(integer_from_json(j)));
  if (!j.is_array() || j.size() != 4) throw StructuralError("scalar must be [re_num, re_den, im_num, im_den]");
  mpz_class rd = integer_from_json(j[1]), id = integer_from_json(j[3]);
  if (sgn(rd) == 0 || sgn(id) == 0) throw StructuralError("zero denominator in scalar literal");
  mpq_class re(integer_from_json(j[0]), rd), im(integer_from_json(j[2]), id);
  return ExactScalar(re, im);
}

nlohmann::json legs_to_json(const IndexSet& legs) {
  auto out = nlohmann::json::array();
  for (std::size_t k = 0; k < legs.size(); ++k) {
    nlohmann::json l = {{"id", legs[k].id}, {"dim", legs[k].dim}};
    if (legs.spectral(k)) l["spectral"] = scalar_to_json(*legs.spectral(k));
    out.push_back(l);
  }
  return out;
}

IndexSet legs_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw StructuralError("legs must be an array");
  std::vector<LegLabel> labels;
  std::vector<std::optional<ExactScalar>> sp;
  for (const auto& l : j) {
    if (!l.contains("id") || !l.contains("dim")) throw StructuralError("leg entry needs id and dim");
    labels.push_back({l.at("id").get<int>(), l.at("dim").get<int>()});
    if (l.contains("spectral")) sp.emplace_back(scalar_from_json(l.at("spectral")));
    else sp.emplace_back(std::nullopt);
  }
  try {
    return IndexSet(std::move(labels), std::move(sp));
  } catch (const LegError& e) {
    throw StructuralError(e.what());
  }
}

nlohmann::json matrix_to_json(const Matrix& m) {
  auto entries = nlohmann::json::array();
  for (std::size_t r = 0; r < m.dim(); ++r)
    for (std::size_t c = 0; c < m.dim(); ++c) entries.push_back(scalar_to_json(m(r, c)));
  return {{"legs", legs_to_json(m.legs())}, {"entries", entries}};
}

Matrix matrix_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("legs") || !j.contains("entries"))
    throw StructuralError("matrix literal needs legs and entries");
  IndexSet legs = legs_from_json(j.at("legs"));
  Matrix m(legs);
  const auto& e = j.at("entries");
  if (!e.is_array() || e.size() != m.dim() * m.dim())
    throw StructuralError("matrix literal has " + std::to_string(e.size()) + " entries, expected " +
                          std::to_string(m.dim() * m.dim()));
  std::size_t k = 0;
  for (std::size_t r = 0; r < m.dim(); ++r)
    for (std::size_t c = 0; c < m.dim(); ++c) m(r, c) = scalar_from_json(e[k++]);
  return m;
}

std::string dump_json(const nlohmann::json& j) { return j.dump(2) + "\n"; }

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw StructuralError("cannot open " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw StructuralError(path + ": " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw StructuralError("cannot write " + path);
  out << text;
}

}  // namespace qexch

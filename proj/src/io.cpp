/** @file io.cpp
 * MpsxFile parsing and writing.
 */
#include "mpsx/io.hpp"

#include <cmath>

#include "json.hpp"

namespace mpsx {

namespace {

using nlohmann::json;

cplx entry(const json& e) {
  if (e.is_number()) return e.get<double>();
  if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
    throw Error(ErrorKind::InvalidInput, "matrix entries must be [re, im] pairs");
  const cplx v(e[0].get<double>(), e[1].get<double>());
  if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw Error(ErrorKind::InvalidInput, "non-finite entry");
  return v;
}

CMatrix matrix(const json& a, int D, const std::string& what) {
  if (!a.is_array() || static_cast<int>(a.size()) != D * D)
    throw Error(ErrorKind::InvalidInput, what + " must hold D^2 = " + std::to_string(D * D) + " entries");
  CMatrix m(D, D);
  for (int i = 0; i < D; ++i)
    for (int j = 0; j < D; ++j) m(i, j) = entry(a[i * D + j]);
  return m;
}

json matrix_json(const CMatrix& m) {
  json a = json::array();
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) a.push_back({m(i, j).real(), m(i, j).imag()});
  return a;
}

}  // namespace

MpsX mpsx_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::InvalidInput, std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("d") || !doc.contains("D") || !doc.contains("matrices"))
    throw Error(ErrorKind::InvalidInput, "MPS-X file needs d, D and matrices");
  if (!doc["d"].is_number_integer() || !doc["D"].is_number_integer())
    throw Error(ErrorKind::InvalidInput, "d and D must be integers");
  const int d = doc["d"].get<int>();
  const int D = doc["D"].get<int>();
  if (d < 1 || D < 1) throw Error(ErrorKind::InvalidInput, "d and D must be positive");
  const json& mats = doc["matrices"];
  if (!mats.is_array() || static_cast<int>(mats.size()) != d)
    throw Error(ErrorKind::InvalidInput, "matrices must hold d = " + std::to_string(d) + " entries");
  std::vector<CMatrix> letters;
  for (int x = 0; x < d; ++x) letters.push_back(matrix(mats[x], D, "matrix " + std::to_string(x)));
  CMatrix X = CMatrix::Identity(D, D);
  if (doc.contains("boundary")) {
    const json& b = doc["boundary"];
    if (b.is_string()) {
      if (b.get<std::string>() != "identity") throw Error(ErrorKind::InvalidInput, "unknown boundary keyword");
    } else {
      X = matrix(b, D, "boundary");
    }
  }
  return MpsX(MatrixSet(letters), X);
}

std::string mpsx_to_json(const MpsX& m, int indent) {
  json doc;
  doc["d"] = m.d();
  doc["D"] = m.D();
  doc["matrices"] = json::array();
  for (int x = 0; x < m.d(); ++x) doc["matrices"].push_back(matrix_json(m.tensor[x]));
  if (m.X == CMatrix::Identity(m.D(), m.D()))
    doc["boundary"] = "identity";
  else
    doc["boundary"] = matrix_json(m.X);
  return doc.dump(indent);
}

}  // namespace mpsx

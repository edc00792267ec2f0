#include "kr/io.hpp"

#include <cstdint>
#include <cstdio>
#include <set>

#include "kr/error.hpp"

namespace kr {
namespace {

void expect_keys(const Json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw ValidationError(where + ": expected an object");
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) throw ValidationError(where + ": unknown key '" + key + "'");
  }
}

const Json& require(const Json& obj, const std::string& key, const std::string& where) {
  if (!obj.contains(key)) throw ValidationError(where + ": missing '" + key + "'");
  return obj.at(key);
}

double number(const Json& j, const std::string& where) {
  if (!j.is_number()) throw ValidationError(where + ": expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ValidationError(where + ": non-finite number");
  return v;
}

int integer(const Json& j, const std::string& where) {
  if (!j.is_number_integer()) throw ValidationError(where + ": expected an integer");
  return j.get<int>();
}

const Json& array(const Json& j, const std::string& where) {
  if (!j.is_array()) throw ValidationError(where + ": expected an array");
  return j;
}

// Parses vectors and keeps track of the document dimension.
class VecReader {
 public:
  Vec operator()(const Json& j, const std::string& where) {
    if (!j.is_array() || (j.size() != 2 && j.size() != 3)) {
      throw ValidationError(where + ": expected an array of 2 or 3 numbers");
    }
    const int d = static_cast<int>(j.size());
    if (dim_ == 0) dim_ = d;
    if (d != dim_) {
      throw ValidationError(where + ": dimension " + std::to_string(d) + " differs from " +
                            std::to_string(dim_));
    }
    Vec v = Vec::zero(d);
    for (int i = 0; i < d; ++i) v[i] = number(j[static_cast<std::size_t>(i)], where);
    return v;
  }
  int dim() const { return dim_ == 0 ? 2 : dim_; }

 private:
  int dim_ = 0;
};

TestFunction parse_test_function(const Json& j, VecReader& vec, int dim, const std::string& where) {
  const Json& kind = require(j, "kind", where);
  if (!kind.is_string()) throw ValidationError(where + ": 'kind' must be a string");
  const auto k = kind.get<std::string>();
  if (k == "coordinate") {
    expect_keys(j, {"kind", "axis"}, where);
    const int axis = integer(require(j, "axis", where), where + ".axis");
    if (axis < 0 || axis >= dim) throw ValidationError(where + ": axis out of range");
    return TestFunction::coordinate(dim, axis);
  }
  if (k == "polynomial") {
    expect_keys(j, {"kind", "terms"}, where);
    std::vector<Monomial> terms;
    for (const auto& t : array(require(j, "terms", where), where + ".terms")) {
      expect_keys(t, {"coef", "exponents"}, where + ".terms");
      Monomial m;
      m.coef = number(require(t, "coef", where), where + ".coef");
      const auto& e = array(require(t, "exponents", where), where + ".exponents");
      if (static_cast<int>(e.size()) != dim) {
        throw ValidationError(where + ": exponents need one entry per axis");
      }
      for (int i = 0; i < dim; ++i) {
        const int p = integer(e[static_cast<std::size_t>(i)], where + ".exponents");
        if (p < 0) throw ValidationError(where + ": negative exponent");
        m.exponents[static_cast<std::size_t>(i)] = p;
      }
      terms.push_back(m);
    }
    return TestFunction::polynomial(dim, std::move(terms));
  }
  if (k == "bump") {
    expect_keys(j, {"kind", "center", "radius", "amplitude"}, where);
    const Point c = vec(require(j, "center", where), where + ".center");
    const double r = number(require(j, "radius", where), where + ".radius");
    if (!(r > 0.0)) throw ValidationError(where + ": radius must be positive");
    const double a = j.contains("amplitude") ? number(j.at("amplitude"), where) : 1.0;
    return TestFunction::radial_bump(c, r, a);
  }
  throw ValidationError(where + ": unknown test function kind '" + k + "'");
}

}  // namespace

Distribution ProblemDocument::distribution() const {
  std::vector<Atom> all;
  if (atoms) all = atoms->atoms();
  if (dipoles) {
    for (const auto& d : dipoles->pairs) {
      all.push_back({d.p, 1.0});
      all.push_back({d.n, -1.0});
    }
  }
  return {SignedAtomMeasure(std::move(all)), field};
}

ProblemDocument parse_document(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    std::size_t line = 1, col = 1;
    const std::size_t end = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t k = 0; k < end; ++k) {
      if (text[k] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ValidationError("malformed JSON at line " + std::to_string(line) + ", column " +
                          std::to_string(col));
  }
  expect_keys(j,
              {"version", "domain", "atoms", "dipoles", "segments", "vector_atoms", "cells", "plan",
               "test_functions", "options"},
              "document");
  ProblemDocument doc;
  doc.version = integer(require(j, "version", "document"), "version");
  if (doc.version != 1) throw ValidationError("unsupported document version " + std::to_string(doc.version));

  VecReader vec;
  if (j.contains("domain")) {
    const auto& d = j.at("domain");
    expect_keys(d, {"lower", "upper"}, "domain");
    doc.domain = {vec(require(d, "lower", "domain"), "domain.lower"),
                  vec(require(d, "upper", "domain"), "domain.upper")};
    for (int i = 0; i < doc.domain.dim(); ++i) {
      if (!(doc.domain.upper[i] > doc.domain.lower[i])) throw ValidationError("domain: empty box");
    }
    doc.domain_given = true;
  }
  if (j.contains("atoms")) {
    std::vector<Atom> atoms;
    std::size_t k = 0;
    for (const auto& a : array(j.at("atoms"), "atoms")) {
      const std::string w = "atoms[" + std::to_string(k++) + "]";
      expect_keys(a, {"point", "mass"}, w);
      atoms.push_back({vec(require(a, "point", w), w + ".point"),
                       number(require(a, "mass", w), w + ".mass")});
    }
    doc.atoms = SignedAtomMeasure(std::move(atoms));
  }
  if (j.contains("dipoles")) {
    const auto& d = j.at("dipoles");
    expect_keys(d, {"pairs", "tail"}, "dipoles");
    DipoleChain chain;
    std::size_t k = 0;
    for (const auto& p : array(require(d, "pairs", "dipoles"), "dipoles.pairs")) {
      const std::string w = "dipoles.pairs[" + std::to_string(k++) + "]";
      expect_keys(p, {"p", "n"}, w);
      chain.pairs.push_back({vec(require(p, "p", w), w + ".p"), vec(require(p, "n", w), w + ".n")});
    }
    if (d.contains("tail")) {
      const auto& t = d.at("tail");
      expect_keys(t, {"ratio", "first_term"}, "dipoles.tail");
      ChainTail tail{number(require(t, "ratio", "dipoles.tail"), "dipoles.tail.ratio"),
                     number(require(t, "first_term", "dipoles.tail"), "dipoles.tail.first_term")};
      if (!(tail.ratio > 0.0 && tail.ratio < 1.0)) {
        throw ValidationError("dipoles.tail: ratio must lie in (0, 1)");
      }
      if (!(tail.first_term > 0.0)) throw ValidationError("dipoles.tail: first_term must be positive");
      chain.tail = tail;
    }
    doc.dipoles = std::move(chain);
  }
  if (j.contains("segments")) {
    std::size_t k = 0;
    for (const auto& s : array(j.at("segments"), "segments")) {
      const std::string w = "segments[" + std::to_string(k++) + "]";
      expect_keys(s, {"a", "b", "density"}, w);
      doc.field.segments.push_back({vec(require(s, "a", w), w + ".a"), vec(require(s, "b", w), w + ".b"),
                                    vec(require(s, "density", w), w + ".density")});
    }
  }
  if (j.contains("vector_atoms")) {
    std::size_t k = 0;
    for (const auto& a : array(j.at("vector_atoms"), "vector_atoms")) {
      const std::string w = "vector_atoms[" + std::to_string(k++) + "]";
      expect_keys(a, {"point", "vector"}, w);
      doc.field.atoms.push_back(
          {vec(require(a, "point", w), w + ".point"), vec(require(a, "vector", w), w + ".vector")});
    }
  }
  if (j.contains("plan")) {
    GeneralizedPlan sigma;
    std::size_t k = 0;
    for (const auto& a : array(j.at("plan"), "plan")) {
      const std::string w = "plan[" + std::to_string(k++) + "]";
      expect_keys(a, {"base", "dir", "t", "mass"}, w);
      sigma.atoms.push_back({vec(require(a, "base", w), w + ".base"), vec(require(a, "dir", w), w + ".dir"),
                             number(require(a, "t", w), w + ".t"),
                             number(require(a, "mass", w), w + ".mass")});
    }
    sigma.validate();
    doc.plan = std::move(sigma);
  }

  // The default domain needs all point geometry, cells need the domain.
  const Distribution f = doc.distribution();
  std::vector<Point> pts = geometry_points(f);
  if (doc.plan) {
    for (const auto& a : doc.plan->atoms) {
      pts.push_back(a.base);
      pts.push_back(a.base + a.t * a.dir);
    }
  }
  if (!doc.domain_given) {
    doc.domain = bounding_domain(pts);
    if (doc.domain.dim() != vec.dim()) doc.domain = bounding_domain(std::vector<Point>{Vec::zero(vec.dim())});
  } else {
    const double slack = 1e-9 * doc.domain.diameter();
    for (const auto& p : pts) {
      if (!doc.domain.contains(p, slack)) {
        throw ValidationError("point " + to_string(p) + " lies outside the domain");
      }
    }
  }
  if (j.contains("cells")) {
    const auto& c = j.at("cells");
    expect_keys(c, {"counts", "vectors"}, "cells");
    if (!doc.domain_given) throw ValidationError("cells: a domain is required");
    const auto& counts = array(require(c, "counts", "cells"), "cells.counts");
    if (static_cast<int>(counts.size()) != doc.dim()) {
      throw ValidationError("cells: counts need one entry per axis");
    }
    Grid g{doc.domain, {1, 1, 1}};
    for (int i = 0; i < doc.dim(); ++i) {
      const int n = integer(counts[static_cast<std::size_t>(i)], "cells.counts");
      if (n < 1) throw ValidationError("cells: counts must be >= 1");
      g.counts[static_cast<std::size_t>(i)] = n;
    }
    CellField field{g, {}};
    const auto& vs = array(require(c, "vectors", "cells"), "cells.vectors");
    if (vs.size() != g.num_cells()) {
      throw ValidationError("cells: expected " + std::to_string(g.num_cells()) + " vectors, got " +
                            std::to_string(vs.size()));
    }
    for (const auto& v : vs) field.vectors.push_back(vec(v, "cells.vectors"));
    doc.field.cells = std::move(field);
  }
  doc.field.validate();
  if (j.contains("test_functions")) {
    std::size_t k = 0;
    for (const auto& t : array(j.at("test_functions"), "test_functions")) {
      doc.test_functions.push_back(
          parse_test_function(t, vec, doc.dim(), "test_functions[" + std::to_string(k++) + "]"));
    }
  }
  if (j.contains("options")) {
    if (!j.at("options").is_object()) throw ValidationError("options: expected an object");
    doc.options = j.at("options");
  }
  return doc;
}

std::string digest(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Json to_json(const Vec& v) {
  Json a = Json::array();
  for (int i = 0; i < v.dim; ++i) a.push_back(v[i]);
  return a;
}

Json to_json(const SignedAtomMeasure& m) {
  Json a = Json::array();
  for (const auto& atom : m.atoms()) a.push_back({{"point", to_json(atom.point)}, {"mass", atom.mass}});
  return a;
}

Json to_json(const StructuredVectorMeasure& nu) {
  Json j = Json::object();
  Json atoms = Json::array(), segs = Json::array();
  for (const auto& a : nu.atoms) atoms.push_back({{"point", to_json(a.point)}, {"vector", to_json(a.vector)}});
  for (const auto& s : nu.segments) {
    segs.push_back({{"a", to_json(s.a)}, {"b", to_json(s.b)}, {"density", to_json(s.density)}});
  }
  j["vector_atoms"] = atoms;
  j["segments"] = segs;
  if (nu.cells) {
    Json counts = Json::array(), vs = Json::array();
    for (int i = 0; i < nu.cells->grid.dim(); ++i) counts.push_back(nu.cells->grid.counts[static_cast<std::size_t>(i)]);
    for (const auto& v : nu.cells->vectors) vs.push_back(to_json(v));
    j["cells"] = {{"counts", counts}, {"vectors", vs}};
  }
  return j;
}

Json to_json(const GeneralizedPlan& sigma) {
  Json a = Json::array();
  for (const auto& p : sigma.atoms) {
    a.push_back({{"base", to_json(p.base)}, {"dir", to_json(p.dir)}, {"t", p.t}, {"mass", p.mass}});
  }
  return a;
}

Json to_json(const MatchingEdge& e) {
  return {{"source", to_json(e.source)},
          {"target", to_json(e.target)},
          {"mass", e.mass},
          {"source_index", e.source_index},
          {"target_index", e.target_index}};
}

}  // namespace kr

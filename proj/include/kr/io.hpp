#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "kr/genplan.hpp"
#include "kr/matchnorm.hpp"
#include "kr/measures.hpp"

namespace kr {

using Json = nlohmann::ordered_json;

/// Parsed problem document, schema version 1:
///
///   {"version": 1,
///    "domain": {"lower": [x, y], "upper": [x, y]},
///    "atoms": [{"point": [x, y], "mass": m}, ...],
///    "dipoles": {"pairs": [{"p": [..], "n": [..]}], "tail": {"ratio": r, "first_term": c}},
///    "segments": [{"a": [..], "b": [..], "density": [..]}],
///    "vector_atoms": [{"point": [..], "vector": [..]}],
///    "cells": {"counts": [nx, ny], "vectors": [[..], ...]},
///    "plan": [{"base": [..], "dir": [..], "t": t, "mass": m}],
///    "test_functions": [{"kind": "coordinate", "axis": 0},
///                       {"kind": "polynomial", "terms": [{"coef": c, "exponents": [..]}]},
///                       {"kind": "bump", "center": [..], "radius": r, "amplitude": a}],
///    "options": {...}}
///
/// Every section but `version` is optional; unknown keys are rejected. The
/// domain defaults to the bounding box of the geometry padded by 5%.
struct ProblemDocument {
  int version = 1;
  Domain domain;
  bool domain_given = false;
  std::optional<SignedAtomMeasure> atoms;
  std::optional<DipoleChain> dipoles;
  StructuredVectorMeasure field;  // segments, vector_atoms, cells
  std::optional<GeneralizedPlan> plan;
  std::vector<TestFunction> test_functions;
  Json options = Json::object();

  int dim() const { return domain.dim(); }
  /// atoms (plus listed unit dipoles) - div(field).
  Distribution distribution() const;
};

/// Parses and validates a document. Malformed JSON and schema violations
/// throw ValidationError; syntax errors carry the line and column.
ProblemDocument parse_document(const std::string& text);

/// 64-bit FNV-1a of the raw bytes, as 16 hex digits.
std::string digest(const std::string& bytes);

Json to_json(const Vec& v);
Json to_json(const SignedAtomMeasure& m);
Json to_json(const StructuredVectorMeasure& nu);
Json to_json(const GeneralizedPlan& sigma);
Json to_json(const MatchingEdge& e);

}  // namespace kr

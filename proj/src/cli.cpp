#include "kr/cli.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "kr/beckmann.hpp"
#include "kr/density.hpp"
#include "kr/error.hpp"
#include "kr/format.hpp"
#include "kr/genplan.hpp"
#include "kr/instances.hpp"
#include "kr/io.hpp"
#include "kr/matchnorm.hpp"
#include "kr/sharpspace.hpp"

namespace kr::cli {
namespace {

struct Settings {
  std::string command;
  std::string document;
  std::string out;
  std::string grid;
  bool diagonals = false;
  std::string format;
  std::string convention = "max";
  double tol_abs = 1e-9;
  double tol_rel = 1e-7;
  std::uint64_t seed = 1;
  bool parallel = false;
  std::string filter;
  bool inject_fault = false;
};

// Result of a subcommand: a JSON report, or raw text for density exports.
struct Output {
  Json report;
  std::string raw;
  int code = kOk;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read document '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json new_report(const Settings& s, const std::string& text) {
  Json r;
  r["command"] = s.command;
  r["input"] = {{"path", s.document}, {"digest", digest(text)}};
  r["settings"] = {{"tol_abs", s.tol_abs}, {"tol_rel", s.tol_rel}};
  r["values"] = Json::object();
  r["certificates"] = Json::object();
  r["residuals"] = Json::object();
  r["warnings"] = Json::array();
  return r;
}

void check_options(const ProblemDocument& doc) {
  static const std::set<std::string> known{"epsilons", "profiles", "truncation_eps", "family_degree"};
  for (const auto& [key, value] : doc.options.items()) {
    if (!known.count(key)) throw ValidationError("options: unknown setting '" + key + "'");
  }
}

double option_number(const ProblemDocument& doc, const std::string& key, double fallback) {
  if (!doc.options.contains(key)) return fallback;
  const auto& v = doc.options.at(key);
  if (!v.is_number()) throw ValidationError("options." + key + ": expected a number");
  return v.get<double>();
}

// The atom measure of the document: atoms, listed dipoles and -div of the
// vector part when that is a measure.
SignedAtomMeasure atom_measure(const ProblemDocument& doc, Json& report) {
  const Distribution f = doc.distribution();
  SignedAtomMeasure m = f.measure_part;
  if (!doc.field.empty()) {
    const auto div = divergence_as_measure(doc.field);
    if (!div) {
      throw ValidationError(
          "this command needs an atom measure, but the vector part has atoms or normal "
          "segment components (try 'decompose')");
    }
    m = m + *div;
  }
  if (doc.dipoles && doc.dipoles->tail) {
    const double eps = option_number(doc, "truncation_eps", doc.dipoles->unlisted_bound());
    const auto chain = from_dipoles(*doc.dipoles, eps);
    report["values"]["truncation_error_bound"] = chain.error_bound;
    report["warnings"].push_back("the dipole tail is not represented; values are for the listed pairs");
  }
  if (m.empty()) throw ValidationError("the document has no atoms");
  return m;
}

Json potential_json(const std::vector<Point>& pts, const std::vector<double>& values) {
  Json a = Json::array();
  for (std::size_t k = 0; k < pts.size(); ++k) {
    a.push_back({{"point", to_json(pts[k])}, {"value", values[k]}});
  }
  return a;
}

bool within(double a, double b, const Settings& s) {
  return std::abs(a - b) <= s.tol_abs + s.tol_rel * std::max(std::abs(a), std::abs(b));
}

Output cmd_connect(const Settings& s, const ProblemDocument& doc, Json r) {
  const auto m = atom_measure(doc, r);
  const auto g = minimal_connection(m);
  const auto pos = m.positive_indices();
  const auto neg = m.negative_indices();
  const auto& atoms = m.atoms();
  Json edges = Json::array();
  for (const auto& e : g.edges) edges.push_back(to_json(e));
  double feas = 0.0, slack = 0.0, dual_value = 0.0;
  for (std::size_t i = 0; i < pos.size(); ++i) {
    dual_value += atoms[pos[i]].mass * g.source_potential[i];
    for (std::size_t j = 0; j < neg.size(); ++j) {
      feas = std::max(feas, g.source_potential[i] - g.target_potential[j] -
                                distance(atoms[pos[i]].point, atoms[neg[j]].point));
    }
  }
  for (std::size_t j = 0; j < neg.size(); ++j) dual_value += atoms[neg[j]].mass * g.target_potential[j];
  for (const auto& e : g.edges) {
    const auto i = static_cast<std::size_t>(std::find(pos.begin(), pos.end(), e.source_index) - pos.begin());
    const auto j = static_cast<std::size_t>(std::find(neg.begin(), neg.end(), e.target_index) - neg.begin());
    slack = std::max(slack, std::abs(g.source_potential[i] - g.target_potential[j] -
                                     distance(e.source, e.target)));
  }
  r["values"]["value"] = g.cost;
  r["values"]["atoms"] = atoms.size();
  r["certificates"]["edges"] = edges;
  r["certificates"]["source_potential"] = g.source_potential;
  r["certificates"]["target_potential"] = g.target_potential;
  r["residuals"]["dual_feasibility"] = feas;
  r["residuals"]["complementary_slackness"] = slack;
  r["residuals"]["duality_gap"] = std::abs(dual_value - g.cost);
  const bool ok = feas <= s.tol_abs && slack <= s.tol_abs + s.tol_rel * g.cost &&
                  within(dual_value, g.cost, s);
  return {r, "", ok ? kOk : kVerification};
}

Output cmd_dual(const Settings& s, const ProblemDocument& doc, Json r) {
  const auto m = atom_measure(doc, r);
  const auto d = dual_potential(m);
  const double w1 = minimal_connection(m).cost;
  r["values"]["value"] = d.value;
  r["values"]["pivots"] = d.pivots;
  r["certificates"]["potential"] = potential_json(d.potential.points, d.potential.values);
  r["certificates"]["lip_bound"] = d.potential.lip_bound;
  const double viol = std::max(0.0, d.potential.max_violation());
  r["residuals"]["max_violation"] = viol;
  r["residuals"]["matching_gap"] = std::abs(d.value - w1);
  const bool ok = viol <= s.tol_abs && within(d.value, w1, s);
  return {r, "", ok ? kOk : kVerification};
}

Output cmd_flatnorm(const Settings& s, const ProblemDocument& doc, Json r) {
  const auto m = atom_measure(doc, r);
  const auto conv = s.convention == "sum" ? FlatConvention::kSum : FlatConvention::kMax;
  const auto res = flat_norm(m, conv);
  const auto& atoms = m.atoms();
  const double L = res.lipschitz_budget;
  const double sup = conv == FlatConvention::kSum ? 1.0 - L : 1.0;
  double viol = 0.0, pairing = 0.0;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    pairing += atoms[i].mass * res.potential[i];
    viol = std::max(viol, std::abs(res.potential[i]) - sup);
    for (std::size_t j = 0; j < atoms.size(); ++j) {
      viol = std::max(viol, std::abs(res.potential[i] - res.potential[j]) -
                                L * distance(atoms[i].point, atoms[j].point));
    }
  }
  std::vector<Point> pts;
  for (const auto& a : atoms) pts.push_back(a.point);
  r["values"]["value"] = res.value;
  r["values"]["convention"] = s.convention;
  r["values"]["lipschitz_budget"] = L;
  r["certificates"]["potential"] = potential_json(pts, res.potential);
  r["residuals"]["constraint_violation"] = viol;
  r["residuals"]["pairing_gap"] = std::abs(pairing - res.value);
  const bool ok = viol <= s.tol_abs && within(pairing, res.value, s);
  return {r, "", ok ? kOk : kVerification};
}

Output cmd_beckmann(const Settings& s, const ProblemDocument& doc, Json r) {
  const auto m = atom_measure(doc, r);
  FlowNetwork net;
  if (s.grid.empty()) {
    if (s.diagonals) r["warnings"].push_back("--diagonals has no effect without --grid");
    net = complete_network(m);
  } else {
    int dim = 0;
    const auto res = parse_grid_spec(s.grid, dim);
    if (dim != doc.dim()) throw ValidationError("--grid has " + std::to_string(dim) + " axes, the document " + std::to_string(doc.dim()));
    net = grid_network(doc.domain, res, m, s.diagonals);
  }
  const auto flow = solve_beckmann(net);
  const double w1 = minimal_connection(m).cost;
  Json flows = Json::array();
  double slack = 0.0, feas = 0.0;
  for (std::size_t k = 0; k < net.edges.size(); ++k) {
    const auto& e = net.edges[k];
    const double du = flow.potential[static_cast<std::size_t>(e.i)] - flow.potential[static_cast<std::size_t>(e.j)];
    feas = std::max(feas, std::abs(du) - e.length);
    const double q = flow.edge_flows[k];
    if (q == 0.0) continue;
    flows.push_back({{"i", e.i}, {"j", e.j}, {"flow", q}});
    slack = std::max(slack, std::abs((q > 0.0 ? du : -du) - e.length));
  }
  const double balance = balance_residual(net, flow);
  r["values"]["cost"] = flow.cost;
  r["values"]["w1"] = w1;
  r["values"]["ratio"] = w1 > 0.0 ? Json(flow.cost / w1) : Json(nullptr);
  r["values"]["anisotropy_gap"] = flow.cost - w1;
  r["values"]["anisotropy_bound"] = net.anisotropy_bound;
  r["values"]["nodes"] = net.nodes.size();
  r["values"]["edges"] = net.edges.size();
  r["certificates"]["flows"] = flows;
  r["certificates"]["potentials"] = flow.potential;
  r["residuals"]["balance"] = balance;
  r["residuals"]["slackness"] = slack;
  r["residuals"]["feasibility"] = std::max(0.0, feas);
  const double scale = std::max(1.0, flow.cost);
  const bool ok = balance <= s.tol_abs * scale && slack <= s.tol_rel * scale && feas <= s.tol_abs * scale;
  return {r, "", ok ? kOk : kVerification};
}

Output cmd_plan_check(const Settings& s, const ProblemDocument& doc, Json r) {
  if (!doc.plan) throw ValidationError("plan-check needs a 'plan' section");
  const Distribution f = doc.distribution();
  std::vector<TestFunction> family = doc.test_functions;
  if (family.empty()) {
    const double deg = option_number(doc, "family_degree", 3.0);
    family = polynomial_family(doc.dim(), static_cast<int>(deg));
  }
  double scale = 0.0;
  for (const auto& phi : family) {
    const auto p = pair_checked(f, phi);
    scale = std::max(scale, std::abs(p.value));
    if (p.quadrature_degree_exceeded) {
      r["warnings"].push_back("quadrature is not exact for " + phi.describe());
    }
  }
  const double tol = s.tol_abs + s.tol_rel * scale;
  const auto rep = verify_projection(*doc.plan, f, family, tol);
  r["values"]["pass"] = rep.pass;
  r["values"]["max_residual"] = rep.max_residual;
  r["values"]["worst_test_function"] = family[rep.worst_index].describe();
  r["values"]["plan_mass"] = doc.plan->total_variation();
  r["residuals"]["per_test_function"] = rep.residuals;
  r["residuals"]["tolerance"] = tol;
  r["warnings"].push_back(rep.note);
  return {r, "", rep.pass ? kOk : kVerification};
}

Output cmd_density(const Settings& s, const ProblemDocument& doc, Json r) {
  if (s.grid.empty()) throw ValidationError("density needs --grid");
  int dim = 0;
  const auto counts = parse_grid_spec(s.grid, dim);
  if (dim != doc.dim()) throw ValidationError("--grid does not match the document dimension");
  const Grid grid = make_grid(doc.domain, counts);
  RasterOptions opts;
  opts.threads = s.parallel ? std::max(1u, std::thread::hardware_concurrency()) : 1u;
  const Distribution f = doc.distribution();
  GridDensity d;
  double reference = 0.0;
  std::string source;
  if (doc.plan) {
    const auto nu = to_vector_measure(*doc.plan);
    d = rasterize_vector_measure(nu, grid, opts);
    reference = nu.total_variation();
    source = "plan";
  } else if (!f.measure_part.empty()) {
    const auto g = minimal_connection(f.measure_part);
    d = rasterize_plan(g, grid, opts);
    reference = g.cost;
    source = "optimal plan";
  } else if (!doc.field.empty()) {
    d = rasterize_vector_measure(doc.field, grid, opts);
    reference = doc.field.total_variation();
    source = "vector measure";
  } else {
    throw ValidationError("density needs a plan, atoms or a vector part");
  }
  if (!s.format.empty()) {
    const auto fmt = s.format == "csv" ? ExportFormat::kCsv
                     : s.format == "svg" ? ExportFormat::kSvg
                                         : ExportFormat::kAscii;
    return {Json(), export_density(d, fmt), kOk};
  }
  const double gap = std::abs(d.total() - reference);
  r["values"]["total"] = d.total();
  r["values"]["max"] = d.max();
  r["values"]["reference"] = reference;
  r["values"]["source"] = source;
  Json cnt = Json::array();
  for (int i = 0; i < dim; ++i) cnt.push_back(counts[static_cast<std::size_t>(i)]);
  r["certificates"]["counts"] = cnt;
  r["certificates"]["mass"] = d.mass;
  r["residuals"]["mass_balance"] = gap;
  const bool ok = gap <= s.tol_abs + s.tol_rel * reference;
  return {r, "", ok ? kOk : kVerification};
}

Output cmd_decompose(const Settings& s, const ProblemDocument& doc, Json r) {
  if (doc.field.empty()) throw ValidationError("decompose needs segments, vector_atoms or cells");
  if (!doc.distribution().measure_part.empty()) {
    r["warnings"].push_back("atoms and dipoles are ignored; decompose splits the vector part");
  }
  const auto d = decompose(doc.field, s.tol_abs, s.tol_rel);
  r["values"]["normal_mass"] = d.normal_mass;
  r["values"]["certified"] = d.certified;
  r["values"]["w1_tangential"] = d.w1_tangential ? Json(*d.w1_tangential) : Json(nullptr);
  r["values"]["w1_total"] = d.w1_total ? Json(*d.w1_total) : Json(nullptr);
  r["values"]["witness_value"] = d.witness_value ? Json(*d.witness_value) : Json(nullptr);
  if (!d.f_tangential.measure_part.empty() || d.f_tangential.divergence_part.empty()) {
    r["certificates"]["f_T"] = {{"atoms", to_json(d.f_tangential.measure_part)}};
  } else {
    r["certificates"]["f_T"] = {{"divergence_of", to_json(d.f_tangential.divergence_part)}};
  }
  r["certificates"]["f_N"] = {{"divergence_of", to_json(d.f_normal.divergence_part)}};
  if (d.witness_value && d.w1_total) {
    r["residuals"]["witness_gap"] = *d.w1_total - *d.witness_value;
  }
  if (!d.certified) {
    r["warnings"].push_back("no dual witness certifies W1(f) = W1(f_T) + |nu_N| for this instance");
  }
  return {r, "", kOk};
}

Output cmd_modulus(const Settings& s, const ProblemDocument& doc, Json r) {
  if (!doc.dipoles) throw ValidationError("modulus needs a 'dipoles' section");
  if (!doc.options.contains("epsilons")) throw ValidationError("modulus needs options.epsilons");
  std::vector<double> eps;
  const auto& list = doc.options.at("epsilons");
  if (!list.is_array()) throw ValidationError("options.epsilons: expected an array");
  for (const auto& e : list) {
    if (!e.is_number()) throw ValidationError("options.epsilons: expected numbers");
    eps.push_back(e.get<double>());
  }
  const auto curve = modulus(*doc.dipoles, eps);
  const auto count = static_cast<std::size_t>(option_number(doc, "profiles", 1000.0));
  Rng rng(s.seed);
  std::vector<RidgeProfile> profiles;
  for (std::size_t k = 0; k < count; ++k) profiles.push_back(random_ridge(rng, doc.domain));
  if (s.format == "csv") {
    std::ostringstream os;
    os << "eps,c_eps,k,certified_tail\n";
    for (const auto& p : curve.samples) {
      os << format_double(p.eps) << ',' << format_double(p.c_eps) << ',' << p.k << ','
         << format_double(p.certified_tail) << '\n';
    }
    return {Json(), os.str(), kOk};
  }
  Json rows = Json::array();
  bool ok = true;
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& p : curve.samples) {
    const double slack = profiles.empty() ? 0.0 : modulus_slack(*doc.dipoles, p, profiles, doc.domain);
    worst = std::min(worst, slack);
    if (slack < -s.tol_abs) ok = false;
    rows.push_back({{"eps", p.eps}, {"c_eps", p.c_eps}, {"k", p.k},
                    {"certified_tail", p.certified_tail}, {"min_slack", slack}});
  }
  r["values"]["table"] = rows;
  r["values"]["unlisted_bound"] = doc.dipoles->unlisted_bound();
  r["certificates"]["profiles"] = count;
  r["certificates"]["seed"] = s.seed;
  r["residuals"]["min_slack"] = curve.samples.empty() ? Json(nullptr) : Json(worst);
  return {r, "", ok ? kOk : kVerification};
}

// ---------------------------------------------------------------------------
// selftest

struct Suite {
  std::string name;
  std::function<void(const Settings&, Json&)> run;
};

double golden(double v, const Settings& s) {
  return s.inject_fault ? std::bit_cast<double>(std::bit_cast<std::uint64_t>(v) ^ 1u) : v;
}

void record(Json& checks, const std::string& name, bool pass, double got, double want) {
  checks.push_back({{"check", name}, {"pass", pass}, {"got", got}, {"want", want}});
}

void suite_duality(const Settings& s, Json& checks) {
  const auto unit = SignedAtomMeasure::dipole({0.0, 0.0}, {1.0, 0.0});
  const double w = minimal_connection(unit).cost;
  record(checks, "unit dipole", w == golden(1.0, s), w, golden(1.0, s));
  Rng rng(s.seed);
  for (int k = 0; k < 20; ++k) {
    const auto f = random_balanced(rng, 2 + rng() % 19);
    const double a = minimal_connection(f).cost;
    const double b = dual_potential(f).value;
    const double c = solve_beckmann(complete_network(f)).cost;
    const double tol = 1e-7 * a;
    record(checks, "matching = dual #" + std::to_string(k), std::abs(a - b) <= tol, b, a);
    record(checks, "matching = flow #" + std::to_string(k), std::abs(a - c) <= tol, c, a);
  }
}

void suite_oracle(const Settings& s, Json& checks) {
  Rng rng(s.seed + 1);
  for (int k = 0; k < 50; ++k) {
    const auto f = random_unit_dipoles(rng, 1 + rng() % 7);
    const double a = minimal_connection(f).cost;
    const double b = brute_force_connection(f);
    record(checks, "matching = brute force #" + std::to_string(k), a == b, a, b);
  }
  const Domain sq{{0.0, 0.0}, {1.0, 1.0}};
  const auto diag = SignedAtomMeasure::dipole({0.25, 0.25}, {0.75, 0.75});
  const double c = solve_beckmann(grid_network(sq, {2, 2, 1}, diag)).cost;
  record(checks, "2x2 axis grid cost", std::abs(c - golden(1.0, s)) <= 1e-12, c, golden(1.0, s));
}

void suite_raster(const Settings& s, Json& checks) {
  Matching g;
  g.edges.push_back({{0.0, 0.0}, {1.0, 0.0}, 2.0, 0, 1});
  const Grid grid = make_grid({{0.0, 0.0}, {1.0, 1.0}}, {2, 1, 1});
  const auto d = rasterize_plan(g, grid);
  record(checks, "edge on 2x1 cell 0", d.mass[0] == golden(1.0, s), d.mass[0], golden(1.0, s));
  record(checks, "edge on 2x1 cell 1", d.mass[1] == golden(1.0, s), d.mass[1], golden(1.0, s));
  Rng rng(s.seed + 2);
  const Grid fine = make_grid({{0.0, 0.0}, {1.0, 1.0}}, {64, 64, 1});
  for (int k = 0; k < 10; ++k) {
    const auto f = random_balanced(rng, 2 + rng() % 29);
    const auto gm = minimal_connection(f);
    const auto one = rasterize_plan(gm, fine, {1});
    const auto many = rasterize_plan(gm, fine, {4});
    record(checks, "density total #" + std::to_string(k),
           std::abs(one.total() - gm.cost) <= 1e-12 * gm.cost, one.total(), gm.cost);
    record(checks, "thread independence #" + std::to_string(k), one.mass == many.mass, many.total(),
           one.total());
  }
}

void suite_sharp(const Settings& s, Json& checks) {
  Rng rng(s.seed + 3);
  for (int k = 0; k < 5; ++k) {
    const auto inst = random_certified(rng, 2 + rng() % 9, 1 + rng() % 3);
    const auto d = decompose(inst.nu);
    record(checks, "certified #" + std::to_string(k), d.certified, d.witness_value.value_or(0.0),
           d.w1_total.value_or(0.0));
    const double a = sigma_zero_distance(inst.gamma, inst.normal);
    const double b = distance_to_sharp(inst.nu);
    record(checks, "sigma_0 = distance #" + std::to_string(k), a == b, a, b);
  }
}

void suite_modulus(const Settings& s, Json& checks) {
  const auto chain = geometric_chain(20);
  for (int k = 1; k <= 10; ++k) {
    const auto c = modulus(chain, {std::ldexp(1.0, -k)}).samples.front().c_eps;
    record(checks, "C at 2^-" + std::to_string(k), c == golden(2.0 * k, s), c, golden(2.0 * k, s));
  }
}

Output cmd_selftest(const Settings& s) {
  const std::vector<Suite> suites{{"duality", suite_duality},
                                  {"oracle", suite_oracle},
                                  {"raster", suite_raster},
                                  {"sharp", suite_sharp},
                                  {"modulus", suite_modulus}};
  Json r;
  r["command"] = "selftest";
  r["seed"] = s.seed;
  Json out = Json::array();
  bool all = true;
  bool matched = false;
  for (const auto& suite : suites) {
    if (!s.filter.empty() && suite.name != s.filter) continue;
    matched = true;
    Json checks = Json::array();
    suite.run(s, checks);
    bool pass = true;
    Json failures = Json::array();
    for (const auto& c : checks) {
      if (!c["pass"].get<bool>()) {
        pass = false;
        failures.push_back(c);
      }
    }
    all = all && pass;
    out.push_back({{"suite", suite.name}, {"checks", checks.size()}, {"pass", pass}, {"failures", failures}});
  }
  if (!matched) throw ValidationError("--filter matches no suite: '" + s.filter + "'");
  r["suites"] = out;
  r["pass"] = all;
  return {r, "", all ? kOk : kVerification};
}

Output dispatch(const Settings& s) {
  if (s.command == "selftest") return cmd_selftest(s);
  const std::string text = read_file(s.document);
  const ProblemDocument doc = parse_document(text);
  check_options(doc);
  Json r = new_report(s, text);
  static const std::map<std::string, std::function<Output(const Settings&, const ProblemDocument&, Json)>>
      commands{{"connect", cmd_connect},   {"dual", cmd_dual},           {"flatnorm", cmd_flatnorm},
               {"beckmann", cmd_beckmann}, {"plan-check", cmd_plan_check}, {"density", cmd_density},
               {"decompose", cmd_decompose}, {"modulus", cmd_modulus}};
  return commands.at(s.command)(s, doc, std::move(r));
}

}  // namespace

std::array<int, 3> parse_grid_spec(const std::string& spec, int& dim) {
  std::array<int, 3> res{1, 1, 1};
  dim = 0;
  std::size_t start = 0;
  while (true) {
    const auto x = spec.find('x', start);
    const std::string part = spec.substr(start, x == std::string::npos ? std::string::npos : x - start);
    if (dim == 3 || part.empty() || part.find_first_not_of("0123456789") != std::string::npos ||
        part.size() > 6) {
      throw ValidationError("bad grid spec '" + spec + "' (expected RxC or RxCxD)");
    }
    res[static_cast<std::size_t>(dim++)] = std::stoi(part);
    if (x == std::string::npos) break;
    start = x + 1;
  }
  if (dim < 2) throw ValidationError("bad grid spec '" + spec + "' (expected RxC or RxCxD)");
  for (int i = 0; i < dim; ++i) {
    if (res[static_cast<std::size_t>(i)] < 1) throw ValidationError("grid counts must be >= 1");
  }
  return res;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Settings s;
  CLI::App app{"Kantorovich-Rubinstein norm toolkit", "krnorm"};
  app.require_subcommand(1);
  app.add_option("--out", s.out, "write the report to PATH");
  app.add_option("--tol-abs", s.tol_abs, "absolute tolerance")->check(CLI::NonNegativeNumber);
  app.add_option("--tol-rel", s.tol_rel, "relative tolerance")->check(CLI::NonNegativeNumber);
  app.add_option("--seed", s.seed, "seed for randomised checks");
  app.add_flag("--parallel", s.parallel, "parallel rasterisation (same result)");

  auto doc_cmd = [&](const std::string& name, const std::string& help) {
    auto* c = app.add_subcommand(name, help);
    c->add_option("document", s.document, "problem document (JSON)")->required();
    c->fallthrough();
    return c;
  };
  doc_cmd("connect", "W1 by minimal connection");
  doc_cmd("dual", "W1 by the dual potential LP");
  doc_cmd("flatnorm", "flat norm")
      ->add_option("--convention", s.convention, "max or sum")
      ->check(CLI::IsMember({"max", "sum"}));
  auto* beck = doc_cmd("beckmann", "minimal-divergence flow");
  beck->add_option("--grid", s.grid, "grid RxC[xD]");
  beck->add_flag("--diagonals", s.diagonals, "add diagonal neighbours");
  doc_cmd("plan-check", "check a generalized plan against the document distribution");
  auto* dens = doc_cmd("density", "transport density on a grid");
  dens->add_option("--grid", s.grid, "grid RxC[xD]");
  dens->add_option("--format", s.format, "csv, svg or ascii")->check(CLI::IsMember({"csv", "svg", "ascii"}));
  doc_cmd("decompose", "tangential/normal decomposition");
  doc_cmd("modulus", "modulus of a dipole chain")
      ->add_option("--format", s.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  auto* self = app.add_subcommand("selftest", "bundled consistency suites");
  self->add_option("--filter", s.filter, "run one suite");
  self->add_flag("--inject-fault", s.inject_fault)->group("");
  self->fallthrough();

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kValidation;
  }
  s.command = app.get_subcommands().front()->get_name();

  try {
    const Output o = dispatch(s);
    const std::string body = o.raw.empty() ? o.report.dump(2) + "\n" : o.raw;
    if (s.out.empty()) {
      out << body;
    } else {
      std::ofstream f(s.out, std::ios::binary);
      if (!f || !(f << body)) {
        err << "error: cannot write '" << s.out << "'\n";
        return kValidation;
      }
    }
    if (o.code == kVerification) err << "error: verification failed\n";
    return o.code;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const InfeasibleError& e) {
    err << "infeasible: " << e.what() << "\n";
    return kInfeasible;
  } catch (const VerificationError& e) {
    err << "verification failed: " << e.what() << "\n";
    return kVerification;
  }
}

}  // namespace kr::cli

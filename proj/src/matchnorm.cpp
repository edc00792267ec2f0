#include "kr/matchnorm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "kr/assignment.hpp"
#include "kr/error.hpp"
#include "kr/format.hpp"
#include "kr/min_cost_flow.hpp"
#include "kr/simplex.hpp"

namespace kr {
namespace {

void require_balanced(const SignedAtomMeasure& f, const char* op) {
  if (!f.balanced()) {
    throw ValidationError(std::string(op) + ": measure is unbalanced (total mass " +
                          format_double(f.total()) + ")");
  }
}

bool equal_masses(const SignedAtomMeasure& f) {
  const auto& atoms = f.atoms();
  if (atoms.empty()) return true;
  const double m0 = std::abs(atoms.front().mass);
  return std::all_of(atoms.begin(), atoms.end(), [&](const Atom& a) {
    return std::abs(std::abs(a.mass) - m0) <= 1e-12 * m0;
  });
}

double support_diameter(const SignedAtomMeasure& f) {
  double d = 0.0;
  const auto& atoms = f.atoms();
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    for (std::size_t j = i + 1; j < atoms.size(); ++j) {
      d = std::max(d, distance(atoms[i].point, atoms[j].point));
    }
  }
  return d;
}

}  // namespace

double Potential::max_violation() const {
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      worst = std::max(worst, std::abs(values[i] - values[j]) - distance(points[i], points[j]));
    }
  }
  return points.size() < 2 ? 0.0 : worst;
}

double matching_cost(const std::vector<MatchingEdge>& edges) {
  double c = 0.0;
  for (const auto& e : edges) c += e.mass * distance(e.source, e.target);
  return c;
}

Matching minimal_connection(const SignedAtomMeasure& f) {
  require_balanced(f, "minimal_connection");
  const auto& atoms = f.atoms();
  const auto pos = f.positive_indices();
  const auto neg = f.negative_indices();
  Matching m;
  if (pos.empty() || neg.empty()) return m;

  if (equal_masses(f) && pos.size() == neg.size()) {
    const int n = static_cast<int>(pos.size());
    std::vector<double> cost(pos.size() * neg.size());
    for (std::size_t i = 0; i < pos.size(); ++i) {
      for (std::size_t j = 0; j < neg.size(); ++j) {
        cost[i * neg.size() + j] = distance(atoms[pos[i]].point, atoms[neg[j]].point);
      }
    }
    const auto a = solve_assignment(cost, n);
    for (std::size_t i = 0; i < pos.size(); ++i) {
      const auto j = static_cast<std::size_t>(a.row_to_col[i]);
      m.edges.push_back({atoms[pos[i]].point, atoms[neg[j]].point, atoms[pos[i]].mass, pos[i],
                         neg[j]});
    }
    m.source_potential = a.row_potential;
    m.target_potential.resize(neg.size());
    for (std::size_t j = 0; j < neg.size(); ++j) m.target_potential[j] = -a.col_potential[j];
  } else {
    const int np = static_cast<int>(pos.size());
    MinCostFlow net(static_cast<int>(pos.size() + neg.size()));
    std::vector<double> supply;
    for (auto i : pos) supply.push_back(atoms[i].mass);
    for (auto j : neg) supply.push_back(atoms[j].mass);
    for (std::size_t i = 0; i < pos.size(); ++i) {
      for (std::size_t j = 0; j < neg.size(); ++j) {
        net.add_arc(static_cast<int>(i), np + static_cast<int>(j),
                    distance(atoms[pos[i]].point, atoms[neg[j]].point));
      }
    }
    const auto r = net.solve(supply);
    for (std::size_t i = 0; i < pos.size(); ++i) {
      for (std::size_t j = 0; j < neg.size(); ++j) {
        const double fl = r.arc_flow[i * neg.size() + j];
        if (fl > 0.0) {
          m.edges.push_back({atoms[pos[i]].point, atoms[neg[j]].point, fl, pos[i], neg[j]});
        }
      }
    }
    for (std::size_t i = 0; i < pos.size(); ++i) m.source_potential.push_back(-r.potential[i]);
    for (std::size_t j = 0; j < neg.size(); ++j) {
      m.target_potential.push_back(-r.potential[pos.size() + j]);
    }
  }
  std::sort(m.edges.begin(), m.edges.end(), [](const MatchingEdge& a, const MatchingEdge& b) {
    return std::tie(a.source_index, a.target_index) < std::tie(b.source_index, b.target_index);
  });
  m.cost = matching_cost(m.edges);
  return m;
}

DualResult dual_potential(const SignedAtomMeasure& f) {
  require_balanced(f, "dual_potential");
  const auto& atoms = f.atoms();
  const int n = static_cast<int>(atoms.size());
  DualResult out;
  for (const auto& a : atoms) out.potential.points.push_back(a.point);
  if (n == 0) return out;

  // Variables u_i >= 0 (the objective is shift invariant); the box bound only
  // rules out the unbounded shift direction left by rounding of sum m_i.
  DenseLP lp;
  lp.num_vars = n;
  for (const auto& a : atoms) lp.objective.push_back(a.mass);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      std::vector<double> row(static_cast<std::size_t>(n), 0.0);
      row[static_cast<std::size_t>(i)] = 1.0;
      row[static_cast<std::size_t>(j)] = -1.0;
      lp.add_row(std::move(row),
                 distance(atoms[static_cast<std::size_t>(i)].point,
                          atoms[static_cast<std::size_t>(j)].point));
    }
  }
  const double box = 2.0 * support_diameter(f) + 1.0;
  for (int i = 0; i < n; ++i) {
    std::vector<double> row(static_cast<std::size_t>(n), 0.0);
    row[static_cast<std::size_t>(i)] = 1.0;
    lp.add_row(std::move(row), box);
  }
  const auto sol = solve_lp(lp);
  out.pivots = sol.pivots;

  auto& u = out.potential.values;
  u = sol.x;
  const double lo = *std::min_element(u.begin(), u.end());
  for (auto& v : u) v -= lo;
  for (int i = 0; i < n; ++i) out.value += atoms[static_cast<std::size_t>(i)].mass * u[static_cast<std::size_t>(i)];
  double lip = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double d = distance(atoms[static_cast<std::size_t>(i)].point, atoms[static_cast<std::size_t>(j)].point);
      lip = std::max(lip, std::abs(u[static_cast<std::size_t>(i)] - u[static_cast<std::size_t>(j)]) / d);
    }
  }
  out.potential.lip_bound = lip;
  return out;
}

FlatNormResult flat_norm(const SignedAtomMeasure& f, FlatConvention convention) {
  const auto& atoms = f.atoms();
  const int n = static_cast<int>(atoms.size());
  FlatNormResult out;
  if (n == 0) return out;
  const bool sum_form = convention == FlatConvention::kSum;
  // Shifted variables w_i = u_i + 1 >= 0, plus the Lipschitz budget L in the
  // sum form.
  DenseLP lp;
  lp.num_vars = n + (sum_form ? 1 : 0);
  const auto width = static_cast<std::size_t>(lp.num_vars);
  lp.objective.assign(width, 0.0);
  double mass_total = 0.0;
  for (int i = 0; i < n; ++i) {
    lp.objective[static_cast<std::size_t>(i)] = atoms[static_cast<std::size_t>(i)].mass;
    mass_total += atoms[static_cast<std::size_t>(i)].mass;
  }
  const auto L = static_cast<std::size_t>(n);
  for (int i = 0; i < n; ++i) {
    std::vector<double> upper(width, 0.0);
    upper[static_cast<std::size_t>(i)] = 1.0;
    if (sum_form) {
      upper[L] = 1.0;  // u_i <= 1 - L
      std::vector<double> lower(width, 0.0);
      lower[static_cast<std::size_t>(i)] = -1.0;
      lower[L] = 1.0;  // -u_i <= 1 - L
      lp.add_row(std::move(lower), 0.0);
    }
    lp.add_row(std::move(upper), 2.0);
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      std::vector<double> row(width, 0.0);
      row[static_cast<std::size_t>(i)] = 1.0;
      row[static_cast<std::size_t>(j)] = -1.0;
      const double d = distance(atoms[static_cast<std::size_t>(i)].point,
                                atoms[static_cast<std::size_t>(j)].point);
      if (sum_form) {
        row[L] = -d;
        lp.add_row(std::move(row), 0.0);
      } else {
        lp.add_row(std::move(row), d);
      }
    }
  }
  const auto sol = solve_lp(lp);
  out.value = sol.value - mass_total;
  out.potential.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out.potential[static_cast<std::size_t>(i)] = sol.x[static_cast<std::size_t>(i)] - 1.0;
  out.lipschitz_budget = sum_form ? sol.x[L] : 1.0;
  return out;
}

double brute_force_connection(const SignedAtomMeasure& f) {
  const auto& atoms = f.atoms();
  const auto pos = f.positive_indices();
  const auto neg = f.negative_indices();
  for (const auto& a : atoms) {
    if (std::abs(a.mass) != 1.0) {
      throw ValidationError("brute_force_connection needs unit masses");
    }
  }
  if (pos.size() != neg.size()) throw ValidationError("brute_force_connection: unbalanced");
  if (pos.size() > 7) {
    throw ValidationError("brute_force_connection: more than 7 dipoles (" +
                          std::to_string(pos.size()) + ")");
  }
  std::vector<std::size_t> perm(neg.size());
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  if (pos.empty()) return 0.0;
  do {
    double c = 0.0;
    for (std::size_t i = 0; i < pos.size(); ++i) {
      c += 1.0 * distance(atoms[pos[i]].point, atoms[neg[perm[i]]].point);
    }
    best = std::min(best, c);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

}  // namespace kr

#include "instances.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace dbounds::synth {

namespace {

std::vector<ClassLabel> labels(std::size_t k) {
  static const char* names[] = {"a", "b", "c", "d", "e"};
  std::vector<ClassLabel> out;
  for (std::size_t i = 0; i < k; ++i) out.push_back({i, i < 5 ? names[i] : "k" + std::to_string(i)});
  return out;
}

std::vector<ProxyCell> cells_for(std::size_t n, const std::vector<double>& coords, const std::vector<double>& mass) {
  std::vector<ProxyCell> cells;
  for (std::size_t z = 0; z < n; ++z) {
    ProxyCell c;
    if (coords.empty()) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "c%05zu", z);
      c.key = {buf};
    } else {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.12g", coords[z]);
      c.key = {buf};
      c.numeric_coord = {coords[z]};
    }
    c.mass = mass[z];
    cells.push_back(std::move(c));
  }
  return cells;
}

}  // namespace

std::vector<double> dirichlet(std::mt19937_64& rng, std::size_t n, double concentration) {
  std::gamma_distribution<double> gamma(concentration, 1.0);
  std::vector<double> v(n);
  double sum = 0.0;
  for (auto& x : v) {
    x = gamma(rng) + 1e-300;
    sum += x;
  }
  for (auto& x : v) x /= sum;
  return v;
}

CombinedProblem FullJoint::problem(bool decision_only) const {
  const std::size_t n = num_cells();
  OutcomeMarginal outcome{decision_only ? OutcomeMode::DecisionOnly : OutcomeMode::Full, {}};
  ClassMarginal classes{num_classes, {}};
  for (std::size_t z = 0; z < n; ++z) {
    std::array<double, 4> row{};
    for (std::size_t alpha = 0; alpha < num_classes; ++alpha) {
      for (int o = 0; o < 4; ++o) row[o] += table[z][alpha * 4 + o];
    }
    if (decision_only) row = {row[0] + row[1], row[2] + row[3], 0.0, 0.0};
    outcome.probs.push_back(row);
    for (std::size_t alpha = 0; alpha < num_classes; ++alpha) {
      double s = 0.0;
      for (int o = 0; o < 4; ++o) s += table[z][alpha * 4 + o];
      classes.probs.push_back(s);
    }
  }
  std::vector<ProxyKind> kinds{coords.empty() ? ProxyKind::Categorical : ProxyKind::Numeric};
  return CombinedProblem::create(cells_for(n, coords, mass), outcome, classes, labels(num_classes), 0.0, kinds);
}

double FullJoint::true_dd(ClassPair pair) const {
  auto rate = [&](std::size_t alpha) {
    double hit = 0.0, all = 0.0;
    for (std::size_t z = 0; z < num_cells(); ++z) {
      for (int yhat = 0; yhat < 2; ++yhat) {
        for (int y = 0; y < 2; ++y) {
          const double p = mass[z] * at(z, alpha, yhat, y);
          all += p;
          if (yhat == 1) hit += p;
        }
      }
    }
    return hit / all;
  };
  return rate(pair.a) - rate(pair.b);
}

std::optional<double> FullJoint::true_rate_disparity(Measure m, ClassPair pair) const {
  auto rate = [&](std::size_t alpha) -> std::optional<double> {
    double hit = 0.0, all = 0.0;
    for (std::size_t z = 0; z < num_cells(); ++z) {
      for (int yhat = 0; yhat < 2; ++yhat) {
        for (int y = 0; y < 2; ++y) {
          // Predictive values condition on the decision instead of the outcome.
          const int cond = m.role_swap() ? yhat : y;
          const int event = m.role_swap() ? y : yhat;
          const int target = (m.kind == MeasureKind::TPRD || m.kind == MeasureKind::PPVD) ? 1 : 0;
          if (cond != target) continue;
          const double p = mass[z] * at(z, alpha, yhat, y);
          all += p;
          if (event == target) hit += p;
        }
      }
    }
    if (!(all > 1e-12)) return std::nullopt;
    return hit / all;
  };
  const auto ra = rate(pair.a);
  const auto rb = rate(pair.b);
  if (!ra || !rb) return std::nullopt;
  return *ra - *rb;
}

double FullJoint::true_weight(std::size_t z, int yhat, std::size_t alpha) const {
  double total = 0.0;
  for (std::size_t k = 0; k < num_classes; ++k) total += at(z, k, yhat, 0) + at(z, k, yhat, 1);
  if (total <= 0.0) return 0.0;
  return (at(z, alpha, yhat, 0) + at(z, alpha, yhat, 1)) / total;
}

double FullJoint::true_lipschitz() const {
  const double range = *std::max_element(coords.begin(), coords.end()) -
                       *std::min_element(coords.begin(), coords.end());
  std::vector<std::size_t> order(num_cells());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return coords[i] < coords[j]; });
  double L = 0.0;
  for (std::size_t m = 1; m < order.size(); ++m) {
    const std::size_t i = order[m - 1], j = order[m];
    const double d = (coords[j] - coords[i]) / range;
    for (int yhat = 0; yhat < 2; ++yhat) {
      for (std::size_t alpha = 0; alpha < num_classes; ++alpha) {
        L = std::max(L, std::abs(true_weight(i, yhat, alpha) - true_weight(j, yhat, alpha)) / d);
      }
    }
  }
  return L;
}

FullJoint random_joint(std::mt19937_64& rng, std::size_t num_classes, std::size_t num_cells, double sparsity) {
  FullJoint j;
  j.num_classes = num_classes;
  j.mass = dirichlet(rng, num_cells);
  std::bernoulli_distribution drop(sparsity);
  for (std::size_t z = 0; z < num_cells; ++z) {
    std::vector<double> t = dirichlet(rng, num_classes * 4, 0.7);
    if (sparsity > 0.0) {
      double sum = 0.0;
      for (auto& x : t) {
        if (drop(rng)) x = 0.0;
        sum += x;
      }
      if (sum <= 0.0) {
        t = dirichlet(rng, num_classes * 4, 0.7);
      } else {
        for (auto& x : t) x /= sum;
      }
    }
    j.table.push_back(std::move(t));
  }
  return j;
}

FullJoint class_degenerate_joint(std::mt19937_64& rng, std::size_t num_classes, std::size_t num_cells) {
  FullJoint j;
  j.num_classes = num_classes;
  j.mass = dirichlet(rng, num_cells);
  for (std::size_t z = 0; z < num_cells; ++z) {
    // Every class owns at least one cell so that all priors are positive.
    const std::size_t owner = z < num_classes ? z : std::uniform_int_distribution<std::size_t>(0, num_classes - 1)(rng);
    const std::vector<double> outcome = dirichlet(rng, 4);
    std::vector<double> t(num_classes * 4, 0.0);
    for (int o = 0; o < 4; ++o) t[owner * 4 + o] = outcome[o];
    j.table.push_back(std::move(t));
  }
  return j;
}

FullJoint outcome_degenerate_joint(std::mt19937_64& rng, std::size_t num_classes, std::size_t num_cells) {
  FullJoint j;
  j.num_classes = num_classes;
  j.mass = dirichlet(rng, num_cells);
  for (std::size_t z = 0; z < num_cells; ++z) {
    // Cycle through all four outcomes first so every rate is defined.
    const int o = z < 4 ? static_cast<int>(z) : std::uniform_int_distribution<int>(0, 3)(rng);
    const std::vector<double> cls = dirichlet(rng, num_classes);
    std::vector<double> t(num_classes * 4, 0.0);
    for (std::size_t alpha = 0; alpha < num_classes; ++alpha) t[alpha * 4 + o] = cls[alpha];
    j.table.push_back(std::move(t));
  }
  return j;
}

FullJoint smooth_joint(std::mt19937_64& rng, std::size_t num_cells) {
  FullJoint j;
  j.num_classes = 2;
  j.mass = dirichlet(rng, num_cells, 2.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double phase[2] = {6.28 * u(rng), 6.28 * u(rng)};
  const double freq[2] = {0.5 + 2.5 * u(rng), 0.5 + 2.5 * u(rng)};
  const double amp[2] = {0.2 + 0.25 * u(rng), 0.2 + 0.25 * u(rng)};
  for (std::size_t z = 0; z < num_cells; ++z) {
    j.coords.push_back(static_cast<double>(z));
    const double x = static_cast<double>(z) / static_cast<double>(std::max<std::size_t>(1, num_cells - 1));
    const double p1 = 0.15 + 0.7 * u(rng);
    std::vector<double> t(8, 0.0);
    for (int yhat = 0; yhat < 2; ++yhat) {
      const double w = 0.5 + amp[yhat] * std::sin(freq[yhat] * x + phase[yhat]);
      const double py = yhat == 1 ? p1 : 1.0 - p1;
      for (std::size_t alpha = 0; alpha < 2; ++alpha) {
        const double q = 0.1 + 0.8 * u(rng);  // P(Y=1 | alpha, yhat, z)
        const double cell = py * (alpha == 0 ? w : 1.0 - w);
        t[alpha * 4 + 2 * yhat + 1] = cell * q;
        t[alpha * 4 + 2 * yhat + 0] = cell * (1.0 - q);
      }
    }
    j.table.push_back(std::move(t));
  }
  return j;
}

CombinedProblem make_problem(const std::vector<double>& mass, const std::vector<std::vector<double>>& outcome,
                             const std::vector<std::vector<double>>& classes, const std::vector<double>& coords) {
  const std::size_t n = mass.size();
  const bool full = outcome.front().size() == 4;
  OutcomeMarginal om{full ? OutcomeMode::Full : OutcomeMode::DecisionOnly, {}};
  for (const auto& row : outcome) {
    std::array<double, 4> r{};
    for (std::size_t k = 0; k < row.size(); ++k) r[k] = row[k];
    om.probs.push_back(r);
  }
  const std::size_t K = classes.front().size();
  ClassMarginal cm{K, {}};
  for (const auto& row : classes) cm.probs.insert(cm.probs.end(), row.begin(), row.end());
  std::vector<ProxyKind> kinds{coords.empty() ? ProxyKind::Categorical : ProxyKind::Numeric};
  return CombinedProblem::create(cells_for(n, coords, mass), om, cm, labels(K), 0.0, kinds);
}

CombinedProblem binary_dd_instance() { return make_problem({1.0}, {{0.5, 0.5}}, {{0.9, 0.1}}); }

CombinedProblem uniform_tprd_instance() {
  return make_problem({1.0}, {{0.25, 0.25, 0.25, 0.25}}, {{0.5, 0.5}});
}

CombinedProblem two_cell_lipschitz_instance() {
  return make_problem({0.5, 0.5}, {{0.5, 0.5}, {0.5, 0.5}}, {{0.3, 0.7}, {0.7, 0.3}}, {0.0, 1.0});
}

CombinedProblem perfect_class_instance() {
  return make_problem({0.5, 0.5}, {{0.3, 0.7}, {0.7, 0.3}}, {{1.0, 0.0}, {0.0, 1.0}});
}

CombinedProblem perfect_outcome_instance() {
  // index 2*yhat + y: z1 has (1,1) surely, z2 has (0,1) surely
  return make_problem({0.5, 0.5}, {{0, 0, 0, 1.0}, {0, 1.0, 0, 0}}, {{0.6, 0.4}, {0.4, 0.6}});
}

}  // namespace dbounds::synth

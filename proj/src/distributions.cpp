#include "dbounds/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>

#include "dbounds/error.hpp"

namespace dbounds {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::MixedOutcomeAvailability: return "MixedOutcomeAvailability";
    case ErrorCode::NonBinaryOutcome: return "NonBinaryOutcome";
    case ErrorCode::ProbabilityRowNotNormalized: return "ProbabilityRowNotNormalized";
    case ErrorCode::UnknownClassColumn: return "UnknownClassColumn";
    case ErrorCode::UnknownClass: return "UnknownClass";
    case ErrorCode::MissingColumn: return "MissingColumn";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValueOutsideBins: return "ValueOutsideBins";
    case ErrorCode::NoCommonSupport: return "NoCommonSupport";
    case ErrorCode::SupportMismatch: return "SupportMismatch";
    case ErrorCode::InvalidProblem: return "InvalidProblem";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::EmptyReport: return "EmptyReport";
    case ErrorCode::ZeroClassPrior: return "ZeroClassPrior";
    case ErrorCode::WrongClassCount: return "WrongClassCount";
    case ErrorCode::ZeroDenominatorRisk: return "ZeroDenominatorRisk";
    case ErrorCode::ZeroDenominator: return "ZeroDenominator";
    case ErrorCode::MetricUnavailable: return "MetricUnavailable";
    case ErrorCode::InfeasibleConstraints: return "InfeasibleConstraints";
    case ErrorCode::EmptyGrid: return "EmptyGrid";
    case ErrorCode::AllGridPointsInfeasible: return "AllGridPointsInfeasible";
    case ErrorCode::DegenerateProfile: return "DegenerateProfile";
    case ErrorCode::SolverFailure: return "SolverFailure";
    case ErrorCode::TooManyPairs: return "TooManyPairs";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
    case ErrorCode::NoFeasiblePoint: return "NoFeasiblePoint";
  }
  return "Unknown";
}

namespace {

constexpr double kRenormalizeTol = 1e-6;
constexpr double kExactSumTol = 1e-12;

// Renormalizes `values` in place when their sum is within kRenormalizeTol of
// one. Returns false if the vector cannot be accepted.
bool normalize_probabilities(double* values, std::size_t n) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(values[i]) || values[i] < -1e-12) return false;
    values[i] = std::max(0.0, values[i]);
    sum += values[i];
  }
  if (std::abs(sum - 1.0) > kRenormalizeTol) return false;
  // Skipping sums already at one up to rounding keeps normalization idempotent.
  if (std::abs(sum - 1.0) <= kExactSumTol) return true;
  for (std::size_t i = 0; i < n; ++i) values[i] /= sum;
  return true;
}

std::string format_decimal(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

// Orders cells by categorical components first, then numeric coordinates.
bool cell_less(const ProxyCell& a, const ProxyCell& b, const std::vector<ProxyKind>& kinds) {
  for (std::size_t i = 0; i < a.key.size() && i < b.key.size(); ++i) {
    const bool numeric = i < kinds.size() && kinds[i] == ProxyKind::Numeric;
    if (!numeric && a.key[i] != b.key[i]) return a.key[i] < b.key[i];
  }
  if (a.numeric_coord != b.numeric_coord) return a.numeric_coord < b.numeric_coord;
  return a.key < b.key;
}

}  // namespace

// ---------------------------------------------------------------------------
// CombinedProblem

CombinedProblem CombinedProblem::create(std::vector<ProxyCell> cells, OutcomeMarginal outcome,
                                        ClassMarginal classes, std::vector<ClassLabel> labels,
                                        double dropped_mass, std::vector<ProxyKind> key_kinds) {
  const std::size_t n = cells.size();
  if (n == 0) throw Error(ErrorCode::InvalidProblem, "problem has no cells");
  if (labels.empty()) throw Error(ErrorCode::InvalidProblem, "problem has no classes");
  if (outcome.probs.size() != n) throw Error(ErrorCode::InvalidProblem, "outcome table length mismatch");
  if (classes.num_classes != labels.size() || classes.probs.size() != n * labels.size()) {
    throw Error(ErrorCode::InvalidProblem, "class table shape mismatch");
  }
  for (std::size_t k = 0; k < labels.size(); ++k) {
    if (labels[k].id != k) throw Error(ErrorCode::InvalidProblem, "class ids must be dense 0..K-1");
  }
  if (!(dropped_mass >= 0.0 && dropped_mass < 1.0)) {
    throw Error(ErrorCode::InvalidProblem, "dropped mass must lie in [0,1)");
  }
  double total = 0.0;
  for (const auto& c : cells) {
    if (!std::isfinite(c.mass) || c.mass < 0.0) throw Error(ErrorCode::InvalidProblem, "negative cell mass");
    total += c.mass;
  }
  if (!(total > 0.0)) throw Error(ErrorCode::InvalidProblem, "cell masses sum to zero");
  if (std::abs(total - 1.0) > kExactSumTol) {
    for (auto& c : cells) c.mass /= total;
  }

  const std::size_t width = outcome.mode == OutcomeMode::Full ? 4 : 2;
  for (std::size_t z = 0; z < n; ++z) {
    auto& row = outcome.probs[z];
    if (outcome.mode == OutcomeMode::DecisionOnly && (row[2] != 0.0 || row[3] != 0.0)) {
      throw Error(ErrorCode::InvalidProblem, "decision-only outcome rows use two entries");
    }
    if (!normalize_probabilities(row.data(), width)) {
      throw Error(ErrorCode::InvalidProblem, "outcome distribution of cell " + std::to_string(z) +
                                                 " is not a probability vector");
    }
    if (!normalize_probabilities(classes.probs.data() + z * labels.size(), labels.size())) {
      throw Error(ErrorCode::InvalidProblem, "class distribution of cell " + std::to_string(z) +
                                                 " is not a probability vector");
    }
  }
  if (!key_kinds.empty()) {
    for (const auto& c : cells) {
      if (c.key.size() != key_kinds.size()) throw Error(ErrorCode::InvalidProblem, "key width mismatch");
    }
  }
  CombinedProblem p;
  p.cells_ = std::move(cells);
  p.outcome_ = std::move(outcome);
  p.classes_ = std::move(classes);
  p.labels_ = std::move(labels);
  p.key_kinds_ = std::move(key_kinds);
  p.dropped_mass_ = dropped_mass;
  return p;
}

double CombinedProblem::p_yhat(std::size_t z, int yhat) const {
  const auto& row = outcome_.probs[z];
  if (outcome_.mode == OutcomeMode::DecisionOnly) return row[yhat];
  return row[2 * yhat] + row[2 * yhat + 1];
}

double CombinedProblem::p_y(std::size_t z, int y) const {
  if (outcome_.mode != OutcomeMode::Full) {
    throw Error(ErrorCode::MissingColumn, "true outcome y is not available in decision-only data");
  }
  const auto& row = outcome_.probs[z];
  return row[y] + row[2 + y];
}

double CombinedProblem::p_joint(std::size_t z, int yhat, int y) const {
  if (outcome_.mode != OutcomeMode::Full) {
    throw Error(ErrorCode::MissingColumn, "true outcome y is not available in decision-only data");
  }
  return outcome_.probs[z][2 * yhat + y];
}

std::size_t CombinedProblem::class_index(const std::string& name) const {
  for (const auto& l : labels_) {
    if (l.name == name) return l.id;
  }
  throw Error(ErrorCode::UnknownClass, "unknown class '" + name + "'");
}

bool CombinedProblem::has_numeric_coords() const {
  return std::all_of(cells_.begin(), cells_.end(),
                     [](const ProxyCell& c) { return !c.numeric_coord.empty(); });
}

// ---------------------------------------------------------------------------
// Schema

Schema Schema::from_json(const nlohmann::json& j) {
  Schema s;
  try {
    if (j.contains("proxies")) {
      for (const auto& p : j.at("proxies")) {
        ProxySpec spec;
        spec.column = p.at("column").get<std::string>();
        const std::string kind = p.value("kind", std::string("categorical"));
        if (kind == "numeric") spec.kind = ProxyKind::Numeric;
        else if (kind == "categorical") spec.kind = ProxyKind::Categorical;
        else throw Error(ErrorCode::ConfigError, "proxy kind must be numeric or categorical");
        if (p.contains("bins")) spec.bins = p.at("bins").get<std::vector<double>>();
        if (!spec.bins.empty() && spec.kind != ProxyKind::Numeric) {
          throw Error(ErrorCode::ConfigError, "bins require a numeric proxy: " + spec.column);
        }
        if (spec.bins.size() == 1 || !std::is_sorted(spec.bins.begin(), spec.bins.end()) ||
            std::adjacent_find(spec.bins.begin(), spec.bins.end()) != spec.bins.end()) {
          if (!spec.bins.empty()) {
            throw Error(ErrorCode::ConfigError, "bin edges must be strictly increasing: " + spec.column);
          }
        }
        s.proxies.push_back(std::move(spec));
      }
    }
    s.classes = j.at("classes").get<std::vector<std::string>>();
    s.reference_class = j.value("reference_class", s.classes.empty() ? std::string() : s.classes.front());
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ConfigError, std::string("schema: ") + e.what());
  }
  if (s.classes.size() < 2) throw Error(ErrorCode::ConfigError, "schema needs at least two classes");
  std::vector<std::string> sorted = s.classes;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw Error(ErrorCode::ConfigError, "duplicate class names in schema");
  }
  if (std::find(s.classes.begin(), s.classes.end(), s.reference_class) == s.classes.end()) {
    throw Error(ErrorCode::ConfigError, "reference class '" + s.reference_class + "' is not declared");
  }
  return s;
}

Schema Schema::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open schema " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ConfigError, "schema " + path + ": " + e.what());
  }
  return from_json(j);
}

std::vector<std::string> Schema::ordered_classes() const {
  std::vector<std::string> out{reference_class};
  for (const auto& c : classes) {
    if (c != reference_class) out.push_back(c);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Ingestion

namespace {

struct ProxyColumns {
  std::vector<std::size_t> index;
  std::vector<ProxySpec> specs;
  std::vector<ProxyKind> kinds;
};

ProxyColumns resolve_proxies(const CsvTable& table, const Schema& schema) {
  ProxyColumns out;
  if (schema.proxies.empty()) {
    for (std::size_t i = 0; i < table.header.size(); ++i) {
      if (table.header[i].rfind("z_", 0) == 0) {
        out.index.push_back(i);
        out.specs.push_back(ProxySpec{table.header[i], ProxyKind::Categorical, {}});
      }
    }
  } else {
    for (const auto& spec : schema.proxies) {
      auto idx = table.column(spec.column);
      if (!idx) throw Error(ErrorCode::MissingColumn, "missing proxy column '" + spec.column + "'");
      out.index.push_back(*idx);
      out.specs.push_back(spec);
    }
  }
  if (out.index.empty()) throw Error(ErrorCode::MissingColumn, "no proxy columns (z_<name>) found");
  for (const auto& s : out.specs) out.kinds.push_back(s.kind);
  return out;
}

// Maps one row's proxy values to a cell key and numeric coordinate.
ProxyCell make_cell(const std::vector<std::string>& row, const ProxyColumns& proxies, std::size_t row_number) {
  ProxyCell cell;
  for (std::size_t k = 0; k < proxies.index.size(); ++k) {
    const std::string& raw = row[proxies.index[k]];
    const ProxySpec& spec = proxies.specs[k];
    if (spec.kind == ProxyKind::Categorical) {
      cell.key.push_back(raw);
      continue;
    }
    auto value = parse_number(raw);
    if (!value) {
      throw Error(ErrorCode::ParseError, "row " + std::to_string(row_number) + ": '" + raw +
                                             "' in " + spec.column + " is not a number");
    }
    double coord = *value;
    if (!spec.bins.empty()) {
      const auto& e = spec.bins;
      if (coord < e.front() || coord > e.back()) {
        throw Error(ErrorCode::ValueOutsideBins, "row " + std::to_string(row_number) + ": " + raw +
                                                     " outside bins of " + spec.column);
      }
      auto it = std::upper_bound(e.begin(), e.end(), coord);
      std::size_t bin = static_cast<std::size_t>(it - e.begin());
      bin = std::min(bin, e.size() - 1);  // the last edge closes the last bin
      coord = 0.5 * (e[bin - 1] + e[bin]);
    }
    cell.key.push_back(format_decimal(coord));
    cell.numeric_coord.push_back(coord);
  }
  return cell;
}

template <typename Acc>
struct CellTable {
  explicit CellTable(std::vector<ProxyKind> k) : kinds(std::move(k)) {}
  std::vector<ProxyKind> kinds;
  std::map<std::vector<std::string>, std::size_t> lookup;
  std::vector<ProxyCell> cells;
  std::vector<Acc> acc;

  Acc& at(ProxyCell cell) {
    auto [it, inserted] = lookup.emplace(cell.key, cells.size());
    if (inserted) {
      cells.push_back(std::move(cell));
      acc.emplace_back();
    }
    return acc[it->second];
  }

  // Sorted permutation of the accumulated cells.
  std::vector<std::size_t> order() const {
    std::vector<std::size_t> idx(cells.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t a, std::size_t b) { return cell_less(cells[a], cells[b], kinds); });
    return idx;
  }
};

int parse_binary(const std::string& raw, const char* column, std::size_t row_number) {
  if (raw == "0") return 0;
  if (raw == "1") return 1;
  throw Error(ErrorCode::NonBinaryOutcome, std::string(column) + " value '" + raw + "' at row " +
                                               std::to_string(row_number) + " is not 0/1");
}

std::vector<ClassLabel> make_labels(const Schema& schema) {
  std::vector<ClassLabel> labels;
  for (const auto& name : schema.ordered_classes()) labels.push_back(ClassLabel{labels.size(), name});
  return labels;
}

}  // namespace

MainSide ingest_main(const CsvTable& table, const Schema& schema) {
  if (table.rows.empty()) throw Error(ErrorCode::EmptyInput, "main dataset has no rows");
  const auto yhat_col = table.column("yhat");
  if (!yhat_col) throw Error(ErrorCode::MissingColumn, "main dataset needs a 'yhat' column");
  const auto y_col = table.column("y");
  const ProxyColumns proxies = resolve_proxies(table, schema);

  std::size_t with_y = 0;
  if (y_col) {
    for (const auto& row : table.rows) with_y += row[*y_col].empty() ? 0 : 1;
    if (with_y != 0 && with_y != table.rows.size()) {
      throw Error(ErrorCode::MixedOutcomeAvailability,
                  "column 'y' is filled on " + std::to_string(with_y) + " of " +
                      std::to_string(table.rows.size()) + " rows");
    }
  }
  const bool full = with_y == table.rows.size();

  CellTable<std::array<double, 4>> cells(proxies.kinds);
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const int yhat = parse_binary(row[*yhat_col], "yhat", r + 1);
    auto& counts = cells.at(make_cell(row, proxies, r + 1));
    if (full) {
      const int y = parse_binary(row[*y_col], "y", r + 1);
      counts[2 * yhat + y] += 1.0;
    } else {
      counts[yhat] += 1.0;
    }
  }

  MainSide side;
  side.mode = full ? OutcomeMode::Full : OutcomeMode::DecisionOnly;
  side.key_kinds = proxies.kinds;
  side.rows = table.rows.size();
  const double n = static_cast<double>(table.rows.size());
  for (std::size_t i : cells.order()) {
    ProxyCell cell = cells.cells[i];
    const auto& counts = cells.acc[i];
    const double total = counts[0] + counts[1] + counts[2] + counts[3];
    cell.mass = total / n;
    std::array<double, 4> probs{};
    for (std::size_t k = 0; k < 4; ++k) probs[k] = counts[k] / total;
    side.cells.push_back(std::move(cell));
    side.probs.push_back(probs);
  }
  return side;
}

AuxSide ingest_aux(const CsvTable& table, const Schema& schema) {
  if (table.rows.empty()) throw Error(ErrorCode::EmptyInput, "auxiliary dataset has no rows");
  const ProxyColumns proxies = resolve_proxies(table, schema);
  const std::vector<ClassLabel> labels = make_labels(schema);
  const std::size_t K = labels.size();

  CellTable<std::vector<double>> cells(proxies.kinds);
  auto accumulator = [&](ProxyCell cell) -> std::vector<double>& {
    auto& acc = cells.at(std::move(cell));
    if (acc.empty()) acc.assign(K + 1, 0.0);  // K weighted class sums + total weight
    return acc;
  };

  const auto weight_col = table.column("weight");
  if (weight_col) {
    std::vector<std::size_t> class_cols(K);
    for (std::size_t k = 0; k < K; ++k) {
      auto idx = table.column("p_" + labels[k].name);
      if (!idx) {
        throw Error(ErrorCode::UnknownClassColumn, "missing probability column 'p_" + labels[k].name + "'");
      }
      class_cols[k] = *idx;
    }
    for (const auto& h : table.header) {
      if (h.rfind("p_", 0) == 0) {
        const std::string name = h.substr(2);
        if (std::none_of(labels.begin(), labels.end(), [&](const ClassLabel& l) { return l.name == name; })) {
          throw Error(ErrorCode::UnknownClassColumn, "column '" + h + "' names an undeclared class");
        }
      }
    }
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
      const auto& row = table.rows[r];
      auto weight = parse_number(row[*weight_col]);
      if (!weight || !(*weight > 0.0)) {
        throw Error(ErrorCode::ParseError, "row " + std::to_string(r + 1) + ": weight must be > 0");
      }
      std::vector<double> p(K);
      for (std::size_t k = 0; k < K; ++k) {
        auto v = parse_number(row[class_cols[k]]);
        if (!v || *v < 0.0 || *v > 1.0) {
          throw Error(ErrorCode::ParseError, "row " + std::to_string(r + 1) + ": invalid probability '" +
                                                 row[class_cols[k]] + "'");
        }
        p[k] = *v;
      }
      const double sum = std::accumulate(p.begin(), p.end(), 0.0);
      if (!normalize_probabilities(p.data(), K)) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.9g", sum);
        throw Error(ErrorCode::ProbabilityRowNotNormalized,
                    "row " + std::to_string(r + 1) + " class probabilities sum to " + buf);
      }
      auto& acc = accumulator(make_cell(row, proxies, r + 1));
      for (std::size_t k = 0; k < K; ++k) acc[k] += *weight * p[k];
      acc[K] += *weight;
    }
  } else {
    const auto a_col = table.column("a");
    if (!a_col) throw Error(ErrorCode::MissingColumn, "auxiliary dataset needs 'a' or 'weight' + 'p_<class>' columns");
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
      const auto& row = table.rows[r];
      const std::string& name = row[*a_col];
      auto it = std::find_if(labels.begin(), labels.end(), [&](const ClassLabel& l) { return l.name == name; });
      if (it == labels.end()) {
        throw Error(ErrorCode::UnknownClass, "row " + std::to_string(r + 1) + ": class '" + name + "' is not declared");
      }
      auto& acc = accumulator(make_cell(row, proxies, r + 1));
      acc[it->id] += 1.0;
      acc[K] += 1.0;
    }
  }

  AuxSide side;
  side.labels = labels;
  side.key_kinds = proxies.kinds;
  side.probs.num_classes = K;
  double total_weight = 0.0;
  for (const auto& acc : cells.acc) total_weight += acc[K];
  for (std::size_t i : cells.order()) {
    ProxyCell cell = cells.cells[i];
    const auto& acc = cells.acc[i];
    cell.mass = acc[K] / total_weight;
    side.cells.push_back(std::move(cell));
    for (std::size_t k = 0; k < K; ++k) side.probs.probs.push_back(acc[k] / acc[K]);
  }
  return side;
}

// ---------------------------------------------------------------------------
// Alignment

CombinedProblem align(const MainSide& main, const AuxSide& aux, AlignPolicy policy) {
  std::map<std::vector<std::string>, std::size_t> aux_index;
  for (std::size_t i = 0; i < aux.cells.size(); ++i) aux_index.emplace(aux.cells[i].key, i);

  std::vector<std::pair<std::size_t, std::size_t>> common;  // (main, aux)
  double kept = 0.0, total = 0.0;
  for (std::size_t i = 0; i < main.cells.size(); ++i) {
    total += main.cells[i].mass;
    auto it = aux_index.find(main.cells[i].key);
    if (it == aux_index.end()) continue;
    common.emplace_back(i, it->second);
    kept += main.cells[i].mass;
  }
  if (common.empty()) throw Error(ErrorCode::NoCommonSupport, "main and auxiliary data share no proxy cell");
  if (policy == AlignPolicy::ErrorOnMismatch &&
      (common.size() != main.cells.size() || common.size() != aux.cells.size())) {
    throw Error(ErrorCode::SupportMismatch,
                std::to_string(main.cells.size() - common.size()) + " main-only and " +
                    std::to_string(aux.cells.size() - common.size()) + " auxiliary-only cells");
  }
  if (!(kept > 0.0)) throw Error(ErrorCode::NoCommonSupport, "common cells carry no main-dataset mass");

  const std::size_t K = aux.labels.size();
  std::vector<ProxyCell> cells;
  OutcomeMarginal outcome{main.mode, {}};
  ClassMarginal classes{K, {}};
  std::vector<std::size_t> order(common.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return cell_less(main.cells[common[a].first], main.cells[common[b].first], main.key_kinds);
  });
  for (std::size_t o : order) {
    const auto [mi, ai] = common[o];
    ProxyCell cell = main.cells[mi];
    cell.mass = main.cells[mi].mass;  // renormalized by create()
    cells.push_back(std::move(cell));
    outcome.probs.push_back(main.probs[mi]);
    for (std::size_t k = 0; k < K; ++k) classes.probs.push_back(aux.probs.at(ai, k));
  }
  const double dropped = total > 0.0 ? std::max(0.0, 1.0 - kept / total) : 0.0;
  return CombinedProblem::create(std::move(cells), std::move(outcome), std::move(classes), aux.labels,
                                 dropped, main.key_kinds);
}

MainSide main_side(const CombinedProblem& problem) {
  MainSide side;
  side.mode = problem.mode();
  side.cells = problem.cells();
  side.probs = problem.outcome().probs;
  side.key_kinds = problem.key_kinds();
  return side;
}

AuxSide aux_side(const CombinedProblem& problem) {
  AuxSide side;
  side.cells = problem.cells();
  side.probs = problem.classes();
  side.labels = problem.class_labels();
  side.key_kinds = problem.key_kinds();
  return side;
}

// ---------------------------------------------------------------------------
// Derived quantities

std::vector<double> class_priors(const CombinedProblem& problem) {
  std::vector<double> priors(problem.num_classes(), 0.0);
  for (std::size_t z = 0; z < problem.num_cells(); ++z) {
    for (std::size_t k = 0; k < priors.size(); ++k) priors[k] += problem.mass(z) * problem.p_class(z, k);
  }
  return priors;
}

double negative_entropy(const CombinedProblem& problem, EntropyTarget target) {
  auto plogp = [](double p) { return p > 0.0 ? p * std::log(p) : 0.0; };
  double total = 0.0;
  for (std::size_t z = 0; z < problem.num_cells(); ++z) {
    double cell = 0.0;
    if (target == EntropyTarget::Class) {
      for (std::size_t k = 0; k < problem.num_classes(); ++k) cell += plogp(problem.p_class(z, k));
    } else {
      const auto& row = problem.outcome().probs[z];
      const std::size_t width = problem.mode() == OutcomeMode::Full ? 4 : 2;
      for (std::size_t k = 0; k < width; ++k) cell += plogp(row[k]);
    }
    total += problem.mass(z) * cell;
  }
  return std::min(0.0, total);
}

CombinedProblem swap_outcome_roles(const CombinedProblem& problem) {
  if (problem.mode() != OutcomeMode::Full) {
    throw Error(ErrorCode::MissingColumn, "swapping decision and outcome needs the 'y' column");
  }
  OutcomeMarginal swapped{OutcomeMode::Full, {}};
  for (const auto& row : problem.outcome().probs) {
    // new[2*yhat' + y'] with yhat' = y, y' = yhat
    swapped.probs.push_back({row[0], row[2], row[1], row[3]});
  }
  return CombinedProblem::create(problem.cells(), std::move(swapped), problem.classes(),
                                 problem.class_labels(), problem.dropped_mass(), problem.key_kinds());
}

std::string problem_digest(const CombinedProblem& problem) {
  std::uint64_t h = 1469598103934665603ULL;  // FNV-1a
  auto feed = [&h](std::string_view s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 1099511628211ULL;
    }
    h ^= 0xff;
    h *= 1099511628211ULL;
  };
  auto feed_number = [&feed](double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    feed(buf);
  };
  feed(problem.mode() == OutcomeMode::Full ? "full" : "decision");
  for (const auto& l : problem.class_labels()) feed(l.name);
  for (std::size_t z = 0; z < problem.num_cells(); ++z) {
    for (const auto& k : problem.cells()[z].key) feed(k);
    feed_number(problem.mass(z));
    for (double p : problem.outcome().probs[z]) feed_number(p);
    for (std::size_t k = 0; k < problem.num_classes(); ++k) feed_number(problem.p_class(z, k));
  }
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace dbounds

#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "json.hpp"

#include "dbounds/csv.hpp"

namespace dbounds {

/// Protected class label. Index 0 is the reference (advantaged) class.
struct ClassLabel {
  std::size_t id = 0;
  std::string name;

  friend bool operator==(const ClassLabel&, const ClassLabel&) = default;
};

enum class ProxyKind { Categorical, Numeric };

struct ProxySpec {
  std::string column;  // e.g. "z_income"
  ProxyKind kind = ProxyKind::Categorical;
  std::vector<double> bins;  // ascending edges; empty keeps raw numeric values
};

/// Column mapping shared by the main and auxiliary inputs.
struct Schema {
  std::vector<ProxySpec> proxies;  // empty: every z_* column, categorical
  std::vector<std::string> classes;
  std::string reference_class;

  static Schema from_json(const nlohmann::json& j);
  static Schema load(const std::string& path);

  /// Class names with the reference class first, others in declared order.
  std::vector<std::string> ordered_classes() const;
};

/// One proxy stratum z. `numeric_coord` holds the numeric key components in
/// key order (empty when all proxies are categorical).
struct ProxyCell {
  std::vector<std::string> key;
  std::vector<double> numeric_coord;
  double mass = 0.0;

  friend bool operator==(const ProxyCell&, const ProxyCell&) = default;
};

enum class OutcomeMode { DecisionOnly, Full };

/// Per-cell outcome distribution. Full mode stores P(Yhat=yhat, Y=y | z) at
/// index 2*yhat + y; DecisionOnly stores P(Yhat=yhat | z) at index yhat and
/// leaves the remaining entries zero.
struct OutcomeMarginal {
  OutcomeMode mode = OutcomeMode::DecisionOnly;
  std::vector<std::array<double, 4>> probs;

  friend bool operator==(const OutcomeMarginal&, const OutcomeMarginal&) = default;
};

/// Per-cell class distribution P(A=alpha | z), row-major [cell][class].
struct ClassMarginal {
  std::size_t num_classes = 0;
  std::vector<double> probs;

  double at(std::size_t cell, std::size_t alpha) const { return probs[cell * num_classes + alpha]; }

  friend bool operator==(const ClassMarginal&, const ClassMarginal&) = default;
};

/// Everything identifiable from the two datasets: aligned per-cell outcome
/// and class marginals plus the cell masses. Immutable once created.
class CombinedProblem {
 public:
  /// Validates and normalizes. Per-cell probability vectors within 1e-6 of
  /// summing to one are renormalized; larger deviations, negative entries or
  /// mismatched lengths raise Error(InvalidProblem). Masses are scaled to sum
  /// to one.
  static CombinedProblem create(std::vector<ProxyCell> cells, OutcomeMarginal outcome,
                                ClassMarginal classes, std::vector<ClassLabel> labels,
                                double dropped_mass = 0.0, std::vector<ProxyKind> key_kinds = {});

  std::size_t num_cells() const { return cells_.size(); }
  std::size_t num_classes() const { return labels_.size(); }
  OutcomeMode mode() const { return outcome_.mode; }

  const std::vector<ProxyCell>& cells() const { return cells_; }
  const OutcomeMarginal& outcome() const { return outcome_; }
  const ClassMarginal& classes() const { return classes_; }
  const std::vector<ClassLabel>& class_labels() const { return labels_; }
  const std::vector<ProxyKind>& key_kinds() const { return key_kinds_; }
  double dropped_mass() const { return dropped_mass_; }

  double mass(std::size_t z) const { return cells_[z].mass; }
  double p_class(std::size_t z, std::size_t alpha) const { return classes_.at(z, alpha); }
  /// P(Yhat=yhat | z) in either mode.
  double p_yhat(std::size_t z, int yhat) const;
  /// P(Y=y | z); Full mode only.
  double p_y(std::size_t z, int y) const;
  /// P(Yhat=yhat, Y=y | z); Full mode only.
  double p_joint(std::size_t z, int yhat, int y) const;

  /// Index of a class by name; throws Error(UnknownClass).
  std::size_t class_index(const std::string& name) const;
  bool has_numeric_coords() const;

  friend bool operator==(const CombinedProblem&, const CombinedProblem&) = default;

 private:
  CombinedProblem() = default;

  std::vector<ProxyCell> cells_;
  OutcomeMarginal outcome_;
  ClassMarginal classes_;
  std::vector<ClassLabel> labels_;
  std::vector<ProxyKind> key_kinds_;
  double dropped_mass_ = 0.0;
};

/// Empirical view of the main dataset, keyed by proxy cell.
struct MainSide {
  OutcomeMode mode = OutcomeMode::DecisionOnly;
  std::vector<ProxyCell> cells;  // masses are empirical P(Z=z)
  std::vector<std::array<double, 4>> probs;
  std::vector<ProxyKind> key_kinds;
  std::size_t rows = 0;
};

/// View of the auxiliary dataset, keyed by proxy cell.
struct AuxSide {
  std::vector<ProxyCell> cells;  // masses from counts or weights
  ClassMarginal probs;
  std::vector<ClassLabel> labels;
  std::vector<ProxyKind> key_kinds;
};

enum class AlignPolicy { IntersectRenormalize, ErrorOnMismatch };

MainSide ingest_main(const CsvTable& table, const Schema& schema);
AuxSide ingest_aux(const CsvTable& table, const Schema& schema);

/// Restricts both sides to their common cells, takes masses from the main
/// side and renormalizes them. Cells in the output are sorted (categorical
/// components lexicographically, numeric components by value).
CombinedProblem align(const MainSide& main, const AuxSide& aux,
                      AlignPolicy policy = AlignPolicy::IntersectRenormalize);

/// Splits a problem back into the two sides it was aligned from.
MainSide main_side(const CombinedProblem& problem);
AuxSide aux_side(const CombinedProblem& problem);

/// P(A=alpha) = sum_z P(z) P(alpha | z).
std::vector<double> class_priors(const CombinedProblem& problem);

enum class EntropyTarget { Class, Outcome };

/// E_Z[ sum_k P(k|Z) ln P(k|Z) ] with 0 ln 0 = 0; always <= 0. The outcome
/// target uses the 4-way table in Full mode and Yhat alone otherwise.
double negative_entropy(const CombinedProblem& problem, EntropyTarget target);

/// Exchanges the decision and true-outcome axes (Full mode only).
CombinedProblem swap_outcome_roles(const CombinedProblem& problem);

/// Stable hexadecimal digest of the problem's numeric content.
std::string problem_digest(const CombinedProblem& problem);

}  // namespace dbounds

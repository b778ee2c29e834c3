#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>

#include "ssgap/hamflow.hpp"

namespace ssgap::backlund {

enum class Kind { s0, s1, s2, s_minus, T2 };
inline constexpr std::array<Kind, 5> kAllKinds{Kind::s0, Kind::s1, Kind::s2, Kind::s_minus, Kind::T2};

/// What the literal t in the s0 and T2 rows stands for.
enum class TimeSymbol { t_means_s, t_means_sqrt_s };

std::string to_string(Kind k);
std::string to_string(TimeSymbol t);

struct TransformId {
  Kind kind = Kind::s0;
  TimeSymbol time_symbol = TimeSymbol::t_means_s;
};

/// A P_III' state together with its Hamiltonian value sH.
struct ExtendedState {
  double v1 = 0, v2 = 0, p = 0, q = 0, s = 1, sH = 0;

  /// Fills sH from the P_III' Hamiltonian.
  static ExtendedState make(double v1, double v2, double q, double p, double s);
  /// Throws DomainError unless sH matches the Hamiltonian to 1e-10 (relative to max(1, |sH|)).
  static ExtendedState checked(double v1, double v2, double p, double q, double s, double sH);

  /// |sH - sH'(v, q, p, s)| / max(1, |sH|).
  double hamiltonian_mismatch() const;
  hamflow::HamState ham_state() const;
};

/// Applies one table row. The result is not re-validated; see hamiltonian_mismatch.
/// Throws TransformSingularError on a vanishing denominator, DomainError for t = sqrt(s) with s <= 0.
ExtendedState apply(const TransformId& id, const ExtendedState& st);

/// Smallest |denominator| the row divides by at this state (infinity for s2).
double denominator_margin(const TransformId& id, const ExtendedState& st);

struct SolutionMapResult {
  double max_residual = 0.0;        ///< Hamilton equations of the image, scaled
  double max_column_mismatch = 0.0; ///< sH column vs Hamiltonian at the image
  std::size_t nodes = 0;
  std::size_t skipped = 0;          ///< near-singular or unusable nodes
};

/// Maps a P_III' trajectory pointwise and checks that the image solves the
/// P_III' equations with the image parameters, using central differences of
/// the mapped states at each node. Nodes whose denominator margin is below `min_margin`
/// are skipped and counted.
SolutionMapResult solution_map_check(const TransformId& id, const hamflow::FlowTrajectory& traj,
                                     double min_margin = 5e-2);

struct GroupReport {
  std::array<double, 4> involution{};  ///< s0, s1, s2, s_minus round trips
  double reflection_composite = 0.0;   ///< s_minus s2: v1 -> -v1, v2 fixed, s -> -s, sH -> sH - s
  /// sH column of each row against the Hamiltonian recomputed at the image, indexed like kAllKinds.
  std::array<double, 5> column{};
  double t2_shift = 0.0;  ///< Hamiltonian at the T2 image vs sH - qp
  std::size_t trials = 0;
  std::size_t redraws = 0;
};

/// Random nonsingular states from `seed`; all residuals are max over trials.
GroupReport group_relation_check(std::uint64_t seed, std::size_t trials,
                                 TimeSymbol time_symbol = TimeSymbol::t_means_s);

struct ConventionRow {
  Kind kind;
  std::array<double, 2> residual{};  ///< indexed by TimeSymbol
};

struct ConventionResolution {
  std::array<ConventionRow, 5> rows{};
  bool resolved = false;  ///< exactly one convention passes every row
  TimeSymbol winner = TimeSymbol::t_means_s;
  std::size_t redraws = 0;
};

/// Runs solution_map_check for every row under both conventions on `trials`
/// random P_III' trajectories with s in [1, 2], redrawing any with |q| or |p| > 50.
ConventionResolution resolve_time_symbol(std::uint64_t seed, std::size_t trials, double threshold = 1e-6);

}  // namespace ssgap::backlund

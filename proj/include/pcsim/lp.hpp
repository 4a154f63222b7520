#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "pcsim/errors.hpp"

namespace pcsim {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class VarKind : uint8_t { continuous, binary };

enum class ConstraintSense : uint8_t { le, eq, ge };

struct LpVariable {
    std::string name;
    double lower = 0.0;
    double upper = kInfinity;
    VarKind kind = VarKind::continuous;
};

struct LpConstraint {
    std::vector<std::pair<int, double>> terms; // (variable index, coefficient)
    ConstraintSense sense = ConstraintSense::le;
    double rhs = 0.0;
    std::string name;
};

/// Generic minimization problem: all solvers in this project consume this
/// representation and nothing else.
struct LinearProblem {
    std::vector<LpVariable> vars;
    std::vector<LpConstraint> cons;
    std::vector<double> objective; // one coefficient per variable

    int add_variable(std::string name, double lower, double upper,
                     VarKind kind = VarKind::continuous);
    int add_constraint(std::vector<std::pair<int, double>> terms,
                       ConstraintSense sense, double rhs, std::string name = "");
    void add_objective(int var, double coef);

    int num_vars() const { return static_cast<int>(vars.size()); }
    int num_cons() const { return static_cast<int>(cons.size()); }
    int num_binaries() const;

    /// Throws NumericalError on non-finite data, BuildError on structural
    /// violations (bad variable references, binary bounds outside [0,1]).
    void validate() const;
};

enum class NodeSelection : uint8_t { best_bound, depth_first };
enum class BranchRule : uint8_t { most_fractional };

struct SolverOptions {
    double rel_gap = 1e-5;  // 0.001%
    double time_limit = 1000.0; // seconds
    NodeSelection node_selection = NodeSelection::best_bound;
    BranchRule branch_rule = BranchRule::most_fractional;
    double feas_tol = 1e-7;
    double opt_tol = 1e-7;
    int bland_threshold = 50; // degenerate pivots before switching to Bland's rule
};

enum class SolveStatus : uint8_t {
    optimal,
    feasible_gap,
    time_limit,             // limit hit with an incumbent in hand
    infeasible,
    unbounded,
    time_limit_no_incumbent
};

const char* to_string(SolveStatus s);

struct Solution {
    SolveStatus status = SolveStatus::infeasible;
    std::vector<double> values;
    double objective = 0.0;
    double best_bound = -kInfinity;
    double gap = 0.0;
    long nodes_explored = 0;
    long simplex_iterations = 0;
    double wall_time = 0.0;
    SolverOptions options; // echo of the options used

    bool has_incumbent() const {
        return status == SolveStatus::optimal || status == SolveStatus::feasible_gap ||
               status == SolveStatus::time_limit;
    }
};

/// Solves the LP relaxation (binaries treated as continuous in [0,1]).
Solution solve_lp(const LinearProblem& problem, const SolverOptions& options = {});

/// Branch-and-bound over the declared binaries.
Solution solve_milp(const LinearProblem& problem, const SolverOptions& options = {});

struct ResidualReport {
    double max_constraint_violation = 0.0;
    double max_bound_violation = 0.0;
    double max_fractionality = 0.0;
    double recomputed_objective = 0.0;
    bool clean = false;
};

ResidualReport check_solution(const LinearProblem& problem, const Solution& solution,
                              double tol);

/// Plain-text dump (objective, constraints, bounds, binary section) for
/// auditing against external solvers. Grammar documented in the README.
void write_lp_text(const LinearProblem& problem, std::ostream& out);

} // namespace pcsim

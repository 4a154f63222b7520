#pragma once

// Internal machinery shared by solve_lp and solve_milp. Not installed.

#include <chrono>
#include <cstdint>
#include <vector>

#include "pcsim/lp.hpp"

namespace pcsim::detail {

using Clock = std::chrono::steady_clock;

enum class VarState : uint8_t { basic, at_lower, at_upper, free_zero };

// Rows are stored as equalities  A x + s = rhs  with one slack per row whose
// bounds encode the original sense: <=  ->  s in [0, inf),  =  ->  s in [0, 0],
// >=  ->  s in (-inf, 0].
struct StandardForm {
    int nrows = 0;
    int nstruct = 0;
    std::vector<int> col_start; // CSC over structural columns, size nstruct + 1
    std::vector<int> row_index;
    std::vector<double> value;
    std::vector<double> rhs;    // per row
    std::vector<double> obj;    // per column (slacks carry 0)
    std::vector<double> lower;  // per column, slacks included
    std::vector<double> upper;

    int ncols() const { return nstruct + nrows; }
    bool is_slack(int col) const { return col >= nstruct; }
    int slack_row(int col) const { return col - nstruct; }

    static StandardForm build(const LinearProblem& problem);
};

struct Basis {
    std::vector<int> basic;       // size nrows; column occupying each position
    std::vector<VarState> state;  // size ncols
};

enum class LpTermination : uint8_t { optimal, infeasible, unbounded, time_limit };

struct LpResult {
    LpTermination term = LpTermination::infeasible;
    double objective = 0.0;
    long iterations = 0;
    bool primal_feasible = false;
    std::vector<double> x;             // full column values (structurals first, then slacks)
    std::vector<double> reduced_costs; // per column, only at optimal termination
    std::vector<VarState> column_state;
};

class BoundedSimplex {
public:
    BoundedSimplex(const StandardForm& sf, const SolverOptions& options);

    // Working bounds override the standard-form bounds (used for branching).
    void set_bound(int col, double lower, double upper);
    void reset_bounds();

    LpResult solve(const Basis* warm, Clock::time_point deadline);
    // Re-solves after bound changes keeping the current basis and
    // factorization (the matrix never changes, so both stay valid).
    LpResult solve_continue(Clock::time_point deadline);

    const Basis& basis() const { return basis_; }

private:
    struct Eta {
        int pivot_pos;
        double pivot_val;
        std::vector<std::pair<int, double>> other; // (position, value), pivot excluded
    };

    void install_slack_basis();
    void install_basis(const Basis& warm);
    void normalize_nonbasic_states();
    LpResult run(Clock::time_point deadline);
    bool factorize();
    void recompute_basic_values();
    void ftran(std::vector<double>& v) const;
    void btran(std::vector<double>& v) const;
    void scatter_column(int col, std::vector<double>& v) const;
    double bound_value(int col, VarState s) const;
    double column_dot(int col, const std::vector<double>& y) const;
    double total_infeasibility() const;

    const StandardForm& sf_;
    SolverOptions opt_;
    std::vector<double> lower_, upper_; // working bounds
    Basis basis_;
    std::vector<double> xval_;   // per column
    std::vector<Eta> etas_;
    int etas_since_factor_ = 0;
    bool ready_ = false;         // basis installed and factorized
    std::vector<double> work_;   // dense row-space scratch
};

} // namespace pcsim::detail

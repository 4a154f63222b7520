#include <algorithm>
#include <cmath>
#include <set>

#include "pcsim/lp.hpp"
#include "simplex_core.hpp"

namespace pcsim {

namespace {

using detail::BoundedSimplex;
using detail::Clock;
using detail::LpResult;
using detail::LpTermination;
using detail::StandardForm;

constexpr double kIntTol = 1e-6;
constexpr int kHeuristicInterval = 25; // round-fix-resolve cadence, in nodes

struct Node {
    long id = 0;
    double bound = -kInfinity;
    int depth = 0;
    std::vector<std::pair<int, double>> fixes; // (variable, value)
};

struct NodeOrder {
    bool operator()(const Node& a, const Node& b) const {
        if (a.bound != b.bound) return a.bound < b.bound;
        return a.id < b.id;
    }
};

double relative_gap(double incumbent, double bound) {
    double diff = incumbent - bound;
    if (diff <= 1e-9) return 0.0;
    return diff / std::max(std::fabs(incumbent), 1e-10);
}

} // namespace

Solution solve_milp(const LinearProblem& problem, const SolverOptions& options) {
    problem.validate();
    const auto t0 = Clock::now();
    const auto deadline = t0 + std::chrono::duration_cast<Clock::duration>(
                                   std::chrono::duration<double>(options.time_limit));

    std::vector<int> binaries;
    for (int j = 0; j < problem.num_vars(); ++j)
        if (problem.vars[j].kind == VarKind::binary) binaries.push_back(j);

    if (binaries.empty()) return solve_lp(problem, options);

    StandardForm sf = StandardForm::build(problem);
    BoundedSimplex simplex(sf, options);

    Solution sol;
    sol.options = options;
    sol.best_bound = -kInfinity;
    sol.gap = kInfinity;

    bool have_incumbent = false;
    double incumbent_obj = kInfinity;
    std::vector<double> incumbent;

    std::set<Node, NodeOrder> open_best;
    std::vector<Node> open_stack;
    const bool depth_first = options.node_selection == NodeSelection::depth_first;
    long next_id = 0;
    long nodes_explored = 0;
    long total_iters = 0;
    bool timed_out = false;
    double pruned_bound = kInfinity; // weakest bound discarded by the gap rule

    auto push_node = [&](Node&& n) {
        if (depth_first)
            open_stack.push_back(std::move(n));
        else
            open_best.insert(std::move(n));
    };
    auto pop_node = [&]() {
        Node n;
        if (depth_first) {
            n = std::move(open_stack.back());
            open_stack.pop_back();
        } else {
            auto it = open_best.begin();
            n = *it;
            open_best.erase(it);
        }
        return n;
    };
    auto open_empty = [&] { return depth_first ? open_stack.empty() : open_best.empty(); };
    auto open_bound = [&]() -> double {
        if (depth_first) {
            double b = kInfinity;
            for (const auto& n : open_stack) b = std::min(b, n.bound);
            return b;
        }
        return open_best.empty() ? kInfinity : open_best.begin()->bound;
    };
    bool incumbent_improved = false;
    auto offer_incumbent = [&](double obj, const std::vector<double>& values) {
        if (!have_incumbent || obj < incumbent_obj - 1e-12) {
            have_incumbent = true;
            incumbent_obj = obj;
            incumbent.assign(values.begin(), values.begin() + sf.nstruct);
            incumbent_improved = true;
        }
    };
    auto apply_fixes = [&](const std::vector<std::pair<int, double>>& fixes) {
        simplex.reset_bounds();
        for (const auto& [var, val] : fixes) simplex.set_bound(var, val, val);
    };

    // Root reduced-cost fixing state (filled after the root LP solves).
    double root_obj = -kInfinity;
    std::vector<double> root_reduced;
    std::vector<detail::VarState> root_state;
    std::vector<std::pair<int, double>> global_fixes;
    std::vector<char> globally_fixed(problem.num_vars(), 0);
    double last_fixing_incumbent = kInfinity;

    // Inequality rows touching each binary, for direction-aware rounding.
    std::vector<std::vector<int>> binary_rows(problem.num_vars());
    std::vector<char> in_equality(problem.num_vars(), 0);
    for (int i = 0; i < problem.num_cons(); ++i) {
        const bool is_eq = problem.cons[i].sense == ConstraintSense::eq;
        for (const auto& [var, coef] : problem.cons[i].terms) {
            (void)coef;
            if (problem.vars[var].kind != VarKind::binary) continue;
            if (is_eq)
                in_equality[var] = 1;
            else
                binary_rows[var].push_back(i);
        }
    }
    auto direction_ok = [&](const std::vector<double>& x, int j, double v) {
        for (int i : binary_rows[j]) {
            const auto& c = problem.cons[i];
            double act = 0.0;
            for (const auto& [var, coef] : c.terms)
                act += coef * (var == j ? v : x[var]);
            if (c.sense == ConstraintSense::le && act > c.rhs + options.feas_tol) return false;
            if (c.sense == ConstraintSense::ge && act < c.rhs - options.feas_tol) return false;
        }
        return true;
    };
    // Preferred integral value per binary: the nearest integer unless only the
    // opposite direction keeps the binary's own inequality rows feasible.
    auto choose_rounding = [&](const std::vector<double>& x, int j) {
        double nearest =
            std::clamp(std::floor(x[j] + 0.5), problem.vars[j].lower, problem.vars[j].upper);
        double other = std::clamp(1.0 - nearest, problem.vars[j].lower, problem.vars[j].upper);
        if (!direction_ok(x, j, nearest) && direction_ok(x, j, other)) return other;
        return nearest;
    };
    // Cheap repair: round every binary, accept only if the untouched
    // continuous variables still satisfy everything.
    auto static_repair = [&](const std::vector<double>& x, std::vector<double>& repaired,
                             double& obj) {
        repaired.assign(x.begin(), x.begin() + sf.nstruct);
        for (int j : binaries) repaired[j] = choose_rounding(x, j);
        for (const auto& c : problem.cons) {
            double act = 0.0;
            for (const auto& [var, coef] : c.terms) act += coef * repaired[var];
            switch (c.sense) {
                case ConstraintSense::le:
                    if (act > c.rhs + options.feas_tol) return false;
                    break;
                case ConstraintSense::ge:
                    if (act < c.rhs - options.feas_tol) return false;
                    break;
                case ConstraintSense::eq:
                    if (std::fabs(act - c.rhs) > options.feas_tol) return false;
                    break;
            }
        }
        obj = 0.0;
        for (int j = 0; j < problem.num_vars(); ++j) obj += problem.objective[j] * repaired[j];
        return true;
    };

    // Round every binary (direction-aware), fix, and re-solve the continuous
    // remainder. Deterministic; often lands exactly on the LP bound.
    auto round_fix_resolve = [&](const std::vector<double>& x,
                                 const std::vector<std::pair<int, double>>& fixes) {
        simplex.reset_bounds();
        for (const auto& [var, val] : fixes) simplex.set_bound(var, val, val);
        for (int j : binaries) {
            double r = choose_rounding(x, j);
            simplex.set_bound(j, r, r);
        }
        LpResult lp = simplex.solve_continue(deadline);
        total_iters += lp.iterations;
        if (lp.term == LpTermination::optimal && lp.primal_feasible)
            offer_incumbent(lp.objective, lp.x);
    };

    // Diving heuristic: repeatedly fix the most fractional binary at its
    // rounded value and re-solve. One LP per fixed variable, so it stays
    // cheap with warm starts; tends to find much better incumbents than
    // all-at-once rounding when many commitments are fractional.
    auto dive = [&](const std::vector<std::pair<int, double>>& fixes) {
        simplex.reset_bounds();
        for (const auto& [var, val] : fixes) simplex.set_bound(var, val, val);
        for (const auto& [var, val] : global_fixes) simplex.set_bound(var, val, val);
        for (size_t pass = 0; pass <= binaries.size(); ++pass) {
            LpResult lp = simplex.solve_continue(deadline);
            total_iters += lp.iterations;
            if (lp.term != LpTermination::optimal) return;
            int worst = -1;
            double worst_frac = kIntTol;
            for (int j : binaries) {
                double frac = std::fabs(lp.x[j] - std::round(lp.x[j]));
                if (frac > worst_frac) {
                    worst_frac = frac;
                    worst = j;
                }
            }
            if (worst < 0) {
                if (lp.primal_feasible) offer_incumbent(lp.objective, lp.x);
                return;
            }
            double r = choose_rounding(lp.x, worst);
            simplex.set_bound(worst, r, r);
        }
    };

    // Root reduced-cost fixing: once an incumbent exists, a nonbasic binary
    // whose reduced cost alone pushes the root bound past the cutoff can be
    // fixed at its bound for the whole tree (standard, exact).
    auto refresh_global_fixes = [&]() {
        if (!have_incumbent || root_reduced.empty()) return;
        if (incumbent_obj >= last_fixing_incumbent - 1e-12) return;
        last_fixing_incumbent = incumbent_obj;
        double cutoff =
            incumbent_obj - options.rel_gap * std::max(std::fabs(incumbent_obj), 1e-10);
        for (int j : binaries) {
            if (globally_fixed[j]) continue;
            double d = root_reduced[j];
            if (root_state[j] == detail::VarState::at_lower && d > 0 &&
                root_obj + d > cutoff + 1e-12) {
                global_fixes.emplace_back(j, problem.vars[j].lower);
                globally_fixed[j] = 1;
            } else if (root_state[j] == detail::VarState::at_upper && d < 0 &&
                       root_obj - d > cutoff + 1e-12) {
                global_fixes.emplace_back(j, problem.vars[j].upper);
                globally_fixed[j] = 1;
            }
        }
    };

    push_node(Node{next_id++, -kInfinity, 0, {}});

    while (!open_empty()) {
        if (Clock::now() >= deadline) {
            timed_out = true;
            break;
        }
        Node node = pop_node();
        if (have_incumbent && relative_gap(incumbent_obj, node.bound) <= options.rel_gap) {
            pruned_bound = std::min(pruned_bound, node.bound);
            continue;
        }
        // A node whose branch decisions contradict a global fix sits provably
        // beyond the cutoff; drop it without solving.
        bool conflicts_fix = false;
        for (const auto& [var, val] : node.fixes)
            for (const auto& [gvar, gval] : global_fixes)
                if (var == gvar && val != gval) conflicts_fix = true;
        if (conflicts_fix) {
            double cutoff =
                incumbent_obj - options.rel_gap * std::max(std::fabs(incumbent_obj), 1e-10);
            pruned_bound = std::min(pruned_bound, std::max(node.bound, cutoff));
            continue;
        }

        apply_fixes(node.fixes);
        for (const auto& [var, val] : global_fixes) simplex.set_bound(var, val, val);
        LpResult lp = simplex.solve_continue(deadline);
        ++nodes_explored;
        total_iters += lp.iterations;

        if (lp.term == LpTermination::time_limit) {
            timed_out = true;
            pruned_bound = std::min(pruned_bound, node.bound);
            break;
        }
        if (lp.term == LpTermination::infeasible) continue;
        if (lp.term == LpTermination::unbounded) {
            if (node.depth == 0 && !have_incumbent) {
                sol.status = SolveStatus::unbounded;
                sol.nodes_explored = nodes_explored;
                sol.simplex_iterations = total_iters;
                sol.wall_time = std::chrono::duration<double>(Clock::now() - t0).count();
                return sol;
            }
            continue;
        }

        if (node.depth == 0 && lp.term == LpTermination::optimal) {
            root_obj = lp.objective;
            root_reduced = lp.reduced_costs;
            root_state = lp.column_state;
        }

        double node_obj = lp.objective;
        if (have_incumbent && relative_gap(incumbent_obj, node_obj) <= options.rel_gap) {
            pruned_bound = std::min(pruned_bound, node_obj);
            continue;
        }

        // Most-fractional branching. A zero-cost binary that appears in no
        // equality row and can be rounded feasibly on its own (a floating mode
        // indicator) never moves the bound, so it only branches as a last
        // resort; the rounding repair settles it instead.
        int branch_var = -1, fallback_var = -1;
        double branch_frac = kIntTol, fallback_frac = kIntTol;
        bool any_fractional = false;
        for (int j : binaries) {
            double frac = std::fabs(lp.x[j] - std::round(lp.x[j]));
            if (frac <= kIntTol) continue;
            any_fractional = true;
            bool floating = problem.objective[j] == 0.0 && !in_equality[j] &&
                            (direction_ok(lp.x, j, 0.0) || direction_ok(lp.x, j, 1.0));
            if (floating) {
                if (frac > fallback_frac) {
                    fallback_frac = frac;
                    fallback_var = j;
                }
            } else if (frac > branch_frac) {
                branch_frac = frac;
                branch_var = j;
            }
        }

        if (!any_fractional) {
            offer_incumbent(node_obj, lp.x);
            continue;
        }
        if (branch_var < 0) branch_var = fallback_var;

        std::vector<double> repaired;
        double repaired_obj = 0.0;
        if (static_repair(lp.x, repaired, repaired_obj)) {
            offer_incumbent(repaired_obj, repaired);
        } else if (node.depth == 0 || nodes_explored % kHeuristicInterval == 0 ||
                   branch_var == fallback_var) {
            std::vector<double> node_x = lp.x;
            round_fix_resolve(node_x, node.fixes);
            if (node.depth == 0 || nodes_explored % (8 * kHeuristicInterval) == 0)
                dive(node.fixes);
        }
        if (have_incumbent && relative_gap(incumbent_obj, node_obj) <= options.rel_gap) {
            pruned_bound = std::min(pruned_bound, node_obj);
            continue;
        }

        double nearest = std::round(lp.x[branch_var]);
        double first_val = nearest <= 0.5 ? 0.0 : 1.0;
        for (double val : {first_val, 1.0 - first_val}) {
            Node child;
            child.id = next_id++;
            child.bound = node_obj;
            child.depth = node.depth + 1;
            child.fixes = node.fixes;
            child.fixes.emplace_back(branch_var, val);
            push_node(std::move(child));
        }

        if (incumbent_improved) {
            refresh_global_fixes();
            incumbent_improved = false;
        }
    }

    double lower = std::min(open_bound(), pruned_bound);
    if (!std::isfinite(lower)) lower = have_incumbent ? incumbent_obj : kInfinity;
    sol.nodes_explored = nodes_explored;
    sol.simplex_iterations = total_iters;
    sol.wall_time = std::chrono::duration<double>(Clock::now() - t0).count();

    if (have_incumbent) {
        sol.values = incumbent;
        sol.objective = incumbent_obj;
        sol.best_bound = std::min(lower, incumbent_obj);
        sol.gap = relative_gap(incumbent_obj, sol.best_bound);
        if (timed_out)
            sol.status = SolveStatus::time_limit;
        else if (sol.gap <= 1e-9)
            sol.status = SolveStatus::optimal;
        else
            sol.status = SolveStatus::feasible_gap;
        return sol;
    }
    if (timed_out) {
        sol.status = SolveStatus::time_limit_no_incumbent;
        return sol;
    }
    sol.status = SolveStatus::infeasible;
    return sol;
}

} // namespace pcsim

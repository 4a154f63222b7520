#include "pcsim/lp.hpp"

#include <cmath>
#include <ostream>

#include "simplex_core.hpp"

namespace pcsim {

int LinearProblem::add_variable(std::string name, double lower, double upper, VarKind kind) {
    vars.push_back(LpVariable{std::move(name), lower, upper, kind});
    objective.push_back(0.0);
    return static_cast<int>(vars.size()) - 1;
}

int LinearProblem::add_constraint(std::vector<std::pair<int, double>> terms,
                                  ConstraintSense sense, double rhs, std::string name) {
    cons.push_back(LpConstraint{std::move(terms), sense, rhs, std::move(name)});
    return static_cast<int>(cons.size()) - 1;
}

void LinearProblem::add_objective(int var, double coef) {
    objective[var] += coef;
}

int LinearProblem::num_binaries() const {
    int n = 0;
    for (const auto& v : vars)
        if (v.kind == VarKind::binary) ++n;
    return n;
}

void LinearProblem::validate() const {
    const int n = num_vars();
    for (int j = 0; j < n; ++j) {
        const auto& v = vars[j];
        if (std::isnan(v.lower) || std::isnan(v.upper))
            throw NumericalError("variable '" + v.name + "' has NaN bound");
        if (v.lower > v.upper)
            throw BuildError("variable '" + v.name + "' has lower > upper");
        if (v.kind == VarKind::binary && (v.lower < 0.0 || v.upper > 1.0))
            throw BuildError("binary variable '" + v.name + "' has bounds outside [0,1]");
        if (!std::isfinite(objective[j]))
            throw NumericalError("objective coefficient of '" + v.name + "' is not finite");
    }
    for (size_t i = 0; i < cons.size(); ++i) {
        const auto& c = cons[i];
        if (!std::isfinite(c.rhs))
            throw NumericalError("constraint " + std::to_string(i) + " has non-finite rhs");
        for (const auto& [var, coef] : c.terms) {
            if (var < 0 || var >= n)
                throw BuildError("constraint " + std::to_string(i) +
                                 " references unknown variable " + std::to_string(var));
            if (!std::isfinite(coef))
                throw NumericalError("constraint " + std::to_string(i) +
                                     " has a non-finite coefficient");
        }
    }
}

const char* to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::optimal: return "optimal";
        case SolveStatus::feasible_gap: return "feasible_gap";
        case SolveStatus::time_limit: return "time_limit";
        case SolveStatus::infeasible: return "infeasible";
        case SolveStatus::unbounded: return "unbounded";
        case SolveStatus::time_limit_no_incumbent: return "time_limit_no_incumbent";
    }
    return "?";
}

Solution solve_lp(const LinearProblem& problem, const SolverOptions& options) {
    problem.validate();
    auto t0 = detail::Clock::now();
    auto deadline = t0 + std::chrono::duration_cast<detail::Clock::duration>(
                             std::chrono::duration<double>(options.time_limit));
    detail::StandardForm sf = detail::StandardForm::build(problem);
    detail::BoundedSimplex simplex(sf, options);
    detail::LpResult r = simplex.solve(nullptr, deadline);

    Solution sol;
    sol.options = options;
    sol.values.assign(r.x.begin(), r.x.begin() + sf.nstruct);
    sol.objective = r.objective;
    sol.simplex_iterations = r.iterations;
    sol.wall_time = std::chrono::duration<double>(detail::Clock::now() - t0).count();
    switch (r.term) {
        case detail::LpTermination::optimal:
            sol.status = SolveStatus::optimal;
            sol.best_bound = r.objective;
            sol.gap = 0.0;
            break;
        case detail::LpTermination::infeasible:
            sol.status = SolveStatus::infeasible;
            break;
        case detail::LpTermination::unbounded:
            sol.status = SolveStatus::unbounded;
            sol.best_bound = -kInfinity;
            break;
        case detail::LpTermination::time_limit:
            sol.status = r.primal_feasible ? SolveStatus::time_limit
                                           : SolveStatus::time_limit_no_incumbent;
            sol.best_bound = -kInfinity;
            sol.gap = kInfinity;
            break;
    }
    return sol;
}

ResidualReport check_solution(const LinearProblem& problem, const Solution& solution,
                              double tol) {
    ResidualReport rep;
    const auto& x = solution.values;
    for (const auto& c : problem.cons) {
        double act = 0.0;
        for (const auto& [var, coef] : c.terms) act += coef * x[var];
        double viol = 0.0;
        switch (c.sense) {
            case ConstraintSense::le: viol = act - c.rhs; break;
            case ConstraintSense::ge: viol = c.rhs - act; break;
            case ConstraintSense::eq: viol = std::fabs(act - c.rhs); break;
        }
        rep.max_constraint_violation = std::max(rep.max_constraint_violation, viol);
    }
    for (int j = 0; j < problem.num_vars(); ++j) {
        const auto& v = problem.vars[j];
        rep.max_bound_violation =
            std::max({rep.max_bound_violation, v.lower - x[j], x[j] - v.upper});
        if (v.kind == VarKind::binary)
            rep.max_fractionality =
                std::max(rep.max_fractionality, std::fabs(x[j] - std::round(x[j])));
        rep.recomputed_objective += problem.objective[j] * x[j];
    }
    rep.max_constraint_violation = std::max(rep.max_constraint_violation, 0.0);
    rep.max_bound_violation = std::max(rep.max_bound_violation, 0.0);
    rep.clean = rep.max_constraint_violation <= tol && rep.max_bound_violation <= tol &&
                rep.max_fractionality <= tol;
    return rep;
}

namespace {

void write_number(std::ostream& out, double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out << buf;
}

void write_terms(std::ostream& out, const LinearProblem& p,
                 const std::vector<std::pair<int, double>>& terms) {
    bool first = true;
    for (const auto& [var, coef] : terms) {
        if (coef >= 0 && !first) out << " + ";
        if (coef < 0) out << (first ? "- " : " - ");
        write_number(out, std::fabs(coef));
        out << ' ' << p.vars[var].name;
        first = false;
    }
    if (first) out << "0";
}

} // namespace

void write_lp_text(const LinearProblem& problem, std::ostream& out) {
    out << "Minimize\n obj: ";
    std::vector<std::pair<int, double>> obj_terms;
    for (int j = 0; j < problem.num_vars(); ++j)
        if (problem.objective[j] != 0.0) obj_terms.emplace_back(j, problem.objective[j]);
    write_terms(out, problem, obj_terms);
    out << "\nSubject To\n";
    for (size_t i = 0; i < problem.cons.size(); ++i) {
        const auto& c = problem.cons[i];
        out << ' ' << (c.name.empty() ? "c" + std::to_string(i) : c.name) << ": ";
        write_terms(out, problem, c.terms);
        switch (c.sense) {
            case ConstraintSense::le: out << " <= "; break;
            case ConstraintSense::eq: out << " = "; break;
            case ConstraintSense::ge: out << " >= "; break;
        }
        write_number(out, c.rhs);
        out << '\n';
    }
    out << "Bounds\n";
    for (const auto& v : problem.vars) {
        out << ' ';
        if (!std::isfinite(v.lower) && !std::isfinite(v.upper)) {
            out << v.name << " free\n";
            continue;
        }
        if (std::isfinite(v.lower)) {
            write_number(out, v.lower);
            out << " <= ";
        } else {
            out << "-inf <= ";
        }
        out << v.name;
        if (std::isfinite(v.upper)) {
            out << " <= ";
            write_number(out, v.upper);
        }
        out << '\n';
    }
    bool any_binary = false;
    for (const auto& v : problem.vars)
        if (v.kind == VarKind::binary) {
            if (!any_binary) out << "Binaries\n";
            any_binary = true;
            out << ' ' << v.name << '\n';
        }
    out << "End\n";
}

} // namespace pcsim

#include "simplex_core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace pcsim::detail {

namespace {

constexpr double kPivotTol = 1e-9;   // minimum |w| usable in the ratio test
constexpr double kEtaDropTol = 1e-12;
constexpr double kDegenStep = 1e-10;
constexpr int kRefactorInterval = 40;
constexpr int kDeadlineCheckMask = 255;

bool finite(double v) { return std::isfinite(v); }

} // namespace

StandardForm StandardForm::build(const LinearProblem& problem) {
    StandardForm sf;
    sf.nstruct = problem.num_vars();
    sf.nrows = problem.num_cons();

    std::vector<int> count(sf.nstruct, 0);
    for (const auto& c : problem.cons)
        for (const auto& [var, coef] : c.terms) {
            (void)coef;
            ++count[var];
        }
    sf.col_start.assign(sf.nstruct + 1, 0);
    for (int j = 0; j < sf.nstruct; ++j) sf.col_start[j + 1] = sf.col_start[j] + count[j];
    sf.row_index.resize(sf.col_start[sf.nstruct]);
    sf.value.resize(sf.col_start[sf.nstruct]);

    std::vector<int> fill(sf.col_start.begin(), sf.col_start.end() - 1);
    sf.rhs.resize(sf.nrows);
    for (int i = 0; i < sf.nrows; ++i) {
        const auto& c = problem.cons[i];
        sf.rhs[i] = c.rhs;
        for (const auto& [var, coef] : c.terms) {
            sf.row_index[fill[var]] = i;
            sf.value[fill[var]] = coef;
            ++fill[var];
        }
    }

    sf.obj.assign(sf.ncols(), 0.0);
    sf.lower.resize(sf.ncols());
    sf.upper.resize(sf.ncols());
    for (int j = 0; j < sf.nstruct; ++j) {
        sf.obj[j] = problem.objective[j];
        sf.lower[j] = problem.vars[j].lower;
        sf.upper[j] = problem.vars[j].upper;
    }
    for (int i = 0; i < sf.nrows; ++i) {
        int col = sf.nstruct + i;
        switch (problem.cons[i].sense) {
            case ConstraintSense::le:
                sf.lower[col] = 0.0;
                sf.upper[col] = kInfinity;
                break;
            case ConstraintSense::eq:
                sf.lower[col] = 0.0;
                sf.upper[col] = 0.0;
                break;
            case ConstraintSense::ge:
                sf.lower[col] = -kInfinity;
                sf.upper[col] = 0.0;
                break;
        }
    }
    return sf;
}

BoundedSimplex::BoundedSimplex(const StandardForm& sf, const SolverOptions& options)
    : sf_(sf), opt_(options), lower_(sf.lower), upper_(sf.upper) {
    work_.assign(sf_.nrows, 0.0);
}

void BoundedSimplex::set_bound(int col, double lower, double upper) {
    lower_[col] = lower;
    upper_[col] = upper;
}

void BoundedSimplex::reset_bounds() {
    lower_ = sf_.lower;
    upper_ = sf_.upper;
}

double BoundedSimplex::bound_value(int col, VarState s) const {
    switch (s) {
        case VarState::at_lower: return lower_[col];
        case VarState::at_upper: return upper_[col];
        case VarState::free_zero: return 0.0;
        case VarState::basic: break;
    }
    return xval_[col];
}

void BoundedSimplex::scatter_column(int col, std::vector<double>& v) const {
    if (sf_.is_slack(col)) {
        v[sf_.slack_row(col)] += 1.0;
        return;
    }
    for (int k = sf_.col_start[col]; k < sf_.col_start[col + 1]; ++k)
        v[sf_.row_index[k]] += sf_.value[k];
}

double BoundedSimplex::column_dot(int col, const std::vector<double>& y) const {
    if (sf_.is_slack(col)) return y[sf_.slack_row(col)];
    double acc = 0.0;
    for (int k = sf_.col_start[col]; k < sf_.col_start[col + 1]; ++k)
        acc += sf_.value[k] * y[sf_.row_index[k]];
    return acc;
}

void BoundedSimplex::ftran(std::vector<double>& v) const {
    for (const Eta& e : etas_) {
        double t = v[e.pivot_pos];
        if (t == 0.0) continue;
        t /= e.pivot_val;
        v[e.pivot_pos] = t;
        for (const auto& [pos, val] : e.other) v[pos] -= val * t;
    }
}

void BoundedSimplex::btran(std::vector<double>& v) const {
    for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
        double t = v[it->pivot_pos];
        for (const auto& [pos, val] : it->other) t -= val * v[pos];
        v[it->pivot_pos] = t / it->pivot_val;
    }
}

void BoundedSimplex::install_slack_basis() {
    basis_.basic.resize(sf_.nrows);
    basis_.state.assign(sf_.ncols(), VarState::at_lower);
    for (int j = 0; j < sf_.ncols(); ++j) {
        if (finite(lower_[j]))
            basis_.state[j] = VarState::at_lower;
        else if (finite(upper_[j]))
            basis_.state[j] = VarState::at_upper;
        else
            basis_.state[j] = VarState::free_zero;
    }
    for (int i = 0; i < sf_.nrows; ++i) {
        basis_.basic[i] = sf_.nstruct + i;
        basis_.state[sf_.nstruct + i] = VarState::basic;
    }
}

void BoundedSimplex::install_basis(const Basis& warm) {
    basis_ = warm;
    normalize_nonbasic_states();
}

// Nonbasic variables must sit at a bound that exists under the current working
// bounds; bounds may have moved since the basis was recorded (branching).
void BoundedSimplex::normalize_nonbasic_states() {
    for (int j = 0; j < sf_.ncols(); ++j) {
        VarState& s = basis_.state[j];
        if (s == VarState::basic) continue;
        if (s == VarState::free_zero && (finite(lower_[j]) || finite(upper_[j])))
            s = finite(lower_[j]) ? VarState::at_lower : VarState::at_upper;
        if (s == VarState::at_lower && !finite(lower_[j]))
            s = finite(upper_[j]) ? VarState::at_upper : VarState::free_zero;
        if (s == VarState::at_upper && !finite(upper_[j]))
            s = finite(lower_[j]) ? VarState::at_lower : VarState::free_zero;
    }
}

void BoundedSimplex::recompute_basic_values() {
    std::vector<double> r = sf_.rhs;
    xval_.assign(sf_.ncols(), 0.0);
    for (int j = 0; j < sf_.ncols(); ++j) {
        if (basis_.state[j] == VarState::basic) continue;
        double v = bound_value(j, basis_.state[j]);
        xval_[j] = v;
        if (v == 0.0) continue;
        if (sf_.is_slack(j)) {
            r[sf_.slack_row(j)] -= v;
        } else {
            for (int k = sf_.col_start[j]; k < sf_.col_start[j + 1]; ++k)
                r[sf_.row_index[k]] -= sf_.value[k] * v;
        }
    }
    ftran(r);
    for (int i = 0; i < sf_.nrows; ++i) xval_[basis_.basic[i]] = r[i];
}

// Rebuilds the eta file from scratch: slack-held positions pivot trivially,
// structural basics are pivoted in one at a time (ordered by their topmost
// row) against the partially built factorization.
bool BoundedSimplex::factorize() {
    etas_.clear();
    etas_since_factor_ = 0;

    const int m = sf_.nrows;
    std::vector<int> new_basic(m, -1);
    std::vector<char> row_taken(m, 0);
    std::vector<int> structurals;
    structurals.reserve(m);

    for (int i = 0; i < m; ++i) {
        int col = basis_.basic[i];
        if (sf_.is_slack(col)) {
            int r = sf_.slack_row(col);
            if (row_taken[r]) return false; // duplicate slack; caller repairs
            new_basic[r] = col;
            row_taken[r] = 1;
        } else {
            structurals.push_back(col);
        }
    }
    std::sort(structurals.begin(), structurals.end(), [&](int a, int b) {
        int ra = sf_.col_start[a] < sf_.col_start[a + 1] ? sf_.row_index[sf_.col_start[a]] : m;
        int rb = sf_.col_start[b] < sf_.col_start[b + 1] ? sf_.row_index[sf_.col_start[b]] : m;
        if (ra != rb) return ra < rb;
        return a < b;
    });

    std::vector<int> queue = structurals;
    std::vector<int> deferred;
    std::vector<double>& w = work_;
    for (int pass = 0; pass < 2 && !queue.empty(); ++pass) {
        deferred.clear();
        for (int col : queue) {
            std::fill(w.begin(), w.end(), 0.0);
            scatter_column(col, w);
            ftran(w);
            int best = -1;
            double best_abs = kPivotTol;
            for (int pos = 0; pos < m; ++pos) {
                if (row_taken[pos]) continue;
                double a = std::fabs(w[pos]);
                if (a > best_abs) {
                    best_abs = a;
                    best = pos;
                }
            }
            if (best < 0) {
                deferred.push_back(col);
                continue;
            }
            Eta e;
            e.pivot_pos = best;
            e.pivot_val = w[best];
            for (int pos = 0; pos < m; ++pos)
                if (pos != best && std::fabs(w[pos]) > kEtaDropTol)
                    e.other.emplace_back(pos, w[pos]);
            etas_.push_back(std::move(e));
            row_taken[best] = 1;
            new_basic[best] = col;
        }
        queue = deferred;
    }
    // Anything unplaceable is linearly dependent: kick it out in favour of the
    // position's own slack.
    for (int col : queue) {
        basis_.state[col] = finite(lower_[col]) ? VarState::at_lower
                            : finite(upper_[col]) ? VarState::at_upper
                                                  : VarState::free_zero;
    }
    for (int pos = 0; pos < m; ++pos) {
        if (new_basic[pos] >= 0) continue;
        int slack = sf_.nstruct + pos;
        new_basic[pos] = slack;
        basis_.state[slack] = VarState::basic;
    }
    basis_.basic = new_basic;
    recompute_basic_values();
    return true;
}

double BoundedSimplex::total_infeasibility() const {
    double acc = 0.0;
    for (int i = 0; i < sf_.nrows; ++i) {
        int col = basis_.basic[i];
        double v = xval_[col];
        if (v < lower_[col]) acc += lower_[col] - v;
        if (v > upper_[col]) acc += v - upper_[col];
    }
    return acc;
}

LpResult BoundedSimplex::solve(const Basis* warm, Clock::time_point deadline) {
    if (warm && static_cast<int>(warm->basic.size()) == sf_.nrows &&
        static_cast<int>(warm->state.size()) == sf_.ncols()) {
        install_basis(*warm);
    } else {
        install_slack_basis();
    }
    if (!factorize()) {
        install_slack_basis();
        factorize();
    }
    ready_ = true;
    return run(deadline);
}

LpResult BoundedSimplex::solve_continue(Clock::time_point deadline) {
    if (!ready_) return solve(nullptr, deadline);
    normalize_nonbasic_states();
    recompute_basic_values();
    return run(deadline);
}

LpResult BoundedSimplex::run(Clock::time_point deadline) {
    const int m = sf_.nrows;
    const int n = sf_.ncols();
    const double ftol = opt_.feas_tol;
    const double dtol = opt_.opt_tol;

    LpResult res;
    std::vector<double> y(m);
    std::vector<double>& w = work_;
    long iter = 0;
    int degen_streak = 0;
    bool retried_after_refactor = false;
    bool tolerate_residual_infeas = false; // set once phase 1 bottoms out near zero
    const long iter_limit = 2000L * (m + 64) + 50000L;

    while (true) {
        if ((iter & kDeadlineCheckMask) == 0 && Clock::now() >= deadline) {
            res.term = LpTermination::time_limit;
            break;
        }
        if (iter > iter_limit)
            throw NumericalError("simplex iteration limit exceeded");

        // Phase selection and pricing costs.
        bool phase1 = false;
        std::fill(y.begin(), y.end(), 0.0);
        if (!tolerate_residual_infeas) {
            for (int i = 0; i < m; ++i) {
                int col = basis_.basic[i];
                double v = xval_[col];
                if (v < lower_[col] - ftol) {
                    y[i] = -1.0;
                    phase1 = true;
                } else if (v > upper_[col] + ftol) {
                    y[i] = 1.0;
                    phase1 = true;
                }
            }
        }
        if (!phase1)
            for (int i = 0; i < m; ++i) y[i] = sf_.obj[basis_.basic[i]];
        btran(y);

        // Entering variable: Dantzig rule, Bland's rule after a stall.
        const bool bland = degen_streak >= opt_.bland_threshold;
        int enter = -1;
        int dir = 0;
        double best_score = dtol;
        for (int j = 0; j < n; ++j) {
            VarState s = basis_.state[j];
            if (s == VarState::basic) continue;
            if (lower_[j] == upper_[j] && s != VarState::free_zero) continue; // fixed
            double cj = phase1 ? 0.0 : sf_.obj[j];
            double d = cj - column_dot(j, y);
            int cand_dir = 0;
            if (s == VarState::at_lower && d < -dtol) cand_dir = 1;
            else if (s == VarState::at_upper && d > dtol) cand_dir = -1;
            else if (s == VarState::free_zero && std::fabs(d) > dtol) cand_dir = d < 0 ? 1 : -1;
            if (cand_dir == 0) continue;
            if (bland) {
                enter = j;
                dir = cand_dir;
                break;
            }
            double score = std::fabs(d);
            if (score > best_score) {
                best_score = score;
                enter = j;
                dir = cand_dir;
            }
        }

        if (enter < 0) {
            if (phase1) {
                if (total_infeasibility() > ftol * (1.0 + static_cast<double>(m))) {
                    res.term = LpTermination::infeasible;
                    break;
                }
                // Phase-1 optimum with negligible residual: move on.
                tolerate_residual_infeas = true;
                ++iter;
                continue;
            }
            res.term = LpTermination::optimal;
            break;
        }

        std::fill(w.begin(), w.end(), 0.0);
        scatter_column(enter, w);
        ftran(w);

        // Ratio test. The entering variable moves dir * t (t >= 0); basic i
        // moves by -dir * t * w[i]. In phase 1 an infeasible basic is blocked
        // at the bound it is currently violating (it becomes feasible there);
        // a basic that is already feasible is blocked as usual.
        double t_best = kInfinity;
        int leave_pos = -1;
        double leave_target = 0.0;
        double leave_absw = 0.0;
        for (int pos = 0; pos < m; ++pos) {
            double wv = w[pos];
            if (std::fabs(wv) <= kPivotTol) continue;
            int col = basis_.basic[pos];
            double delta = -dir * wv; // basic movement per unit t
            double xb = xval_[col];
            double target;
            if (delta > 0) {
                if (phase1 && xb < lower_[col] - ftol) target = lower_[col];
                else if (phase1 && xb > upper_[col] + ftol) continue; // moving away, no block
                else target = upper_[col];
            } else {
                if (phase1 && xb > upper_[col] + ftol) target = upper_[col];
                else if (phase1 && xb < lower_[col] - ftol) continue;
                else target = lower_[col];
            }
            if (!finite(target)) continue;
            double t = (target - xb) / delta;
            if (t < 0) t = 0;
            bool take;
            if (t < t_best - 1e-12) {
                take = true;
            } else if (t < t_best + 1e-12 && leave_pos >= 0) {
                // Ties: Bland mode picks the lowest column index (anti-cycling),
                // otherwise prefer the numerically largest pivot.
                take = bland ? col < basis_.basic[leave_pos]
                             : std::fabs(wv) > leave_absw + 1e-12 ||
                                   (std::fabs(wv) > leave_absw - 1e-12 && pos < leave_pos);
            } else {
                take = leave_pos < 0 && finite(t);
            }
            if (take) {
                t_best = t;
                leave_pos = pos;
                leave_target = target;
                leave_absw = std::fabs(wv);
            }
        }

        // Entering variable may simply flip to its opposite bound.
        double range = upper_[enter] - lower_[enter];
        bool flip = false;
        if (basis_.state[enter] != VarState::free_zero && finite(range) && range <= t_best) {
            t_best = range;
            flip = true;
        }

        if (!finite(t_best)) {
            if (phase1)
                throw NumericalError("phase-1 ratio test found no blocking bound");
            res.term = LpTermination::unbounded;
            break;
        }

        if (!flip && leave_pos >= 0 && leave_absw < 1e-7 && !retried_after_refactor &&
            etas_since_factor_ > 0) {
            // Unstable pivot: refactorize and retry the iteration.
            factorize();
            retried_after_refactor = true;
            continue;
        }
        retried_after_refactor = false;

        degen_streak = t_best <= kDegenStep ? degen_streak + 1 : 0;

        // Apply the step.
        if (t_best != 0.0) {
            for (int pos = 0; pos < m; ++pos) {
                if (w[pos] == 0.0) continue;
                xval_[basis_.basic[pos]] -= dir * t_best * w[pos];
            }
            xval_[enter] += dir * t_best;
        }

        if (flip) {
            basis_.state[enter] =
                basis_.state[enter] == VarState::at_lower ? VarState::at_upper : VarState::at_lower;
            xval_[enter] = bound_value(enter, basis_.state[enter]);
        } else {
            int leave_col = basis_.basic[leave_pos];
            xval_[leave_col] = leave_target; // snap to kill drift
            basis_.state[leave_col] =
                leave_target == lower_[leave_col] ? VarState::at_lower : VarState::at_upper;
            basis_.state[enter] = VarState::basic;
            basis_.basic[leave_pos] = enter;

            Eta e;
            e.pivot_pos = leave_pos;
            e.pivot_val = w[leave_pos];
            for (int pos = 0; pos < m; ++pos)
                if (pos != leave_pos && std::fabs(w[pos]) > kEtaDropTol)
                    e.other.emplace_back(pos, w[pos]);
            etas_.push_back(std::move(e));
            if (++etas_since_factor_ >= kRefactorInterval) factorize();
        }
        ++iter;
    }

    res.iterations = iter;
    res.x.assign(sf_.ncols(), 0.0);
    for (int j = 0; j < sf_.ncols(); ++j) res.x[j] = xval_[j];
    double obj = 0.0;
    for (int j = 0; j < sf_.nstruct; ++j) obj += sf_.obj[j] * xval_[j];
    res.objective = obj;
    if (res.term == LpTermination::optimal || res.term == LpTermination::time_limit)
        res.primal_feasible = total_infeasibility() <= opt_.feas_tol * (1.0 + m);
    if (res.term == LpTermination::optimal) {
        for (int i = 0; i < m; ++i) y[i] = sf_.obj[basis_.basic[i]];
        btran(y);
        res.reduced_costs.assign(n, 0.0);
        for (int j = 0; j < n; ++j)
            if (basis_.state[j] != VarState::basic)
                res.reduced_costs[j] = sf_.obj[j] - column_dot(j, y);
        res.column_state = basis_.state;
    }
    return res;
}

} // namespace pcsim::detail

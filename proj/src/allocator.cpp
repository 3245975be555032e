#include "polyalign/allocator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace polyalign::alloc {

void AllocationProblem::validate_shape() const {
    if (laws.empty()) throw ConfigError("allocation problem has no languages");
    if (laws.size() != caps.size())
        throw ConfigError("allocation problem has " + std::to_string(laws.size()) + " laws but " +
                          std::to_string(caps.size()) + " caps");
    if (budget <= 0) throw ConfigError("allocation budget must be positive");
    for (size_t i = 0; i < caps.size(); ++i) {
        if (caps[i] < 1) throw ConfigError("cap of language " + std::to_string(i) + " must be at least 1");
    }
}

bool AllocationProblem::feasible() const {
    const int64_t total = std::accumulate(caps.begin(), caps.end(), int64_t{0});
    return budget <= total;
}

AllocationProblem AllocationProblem::from_json(const nlohmann::json& j) {
    AllocationProblem p;
    try {
        p.budget = j.at("budget").get<int64_t>();
        for (const auto& lang : j.at("languages")) {
            p.laws.push_back(law_from_json(lang));
            p.caps.push_back(lang.at("cap").get<int64_t>());
        }
    } catch (const nlohmann::json::exception& ex) {
        throw ConfigError(std::string("bad allocation problem: ") + ex.what());
    } catch (const DomainError& ex) {
        throw ConfigError(std::string("bad allocation problem: ") + ex.what());
    }
    p.validate_shape();
    return p;
}

nlohmann::json AllocationProblem::to_json() const {
    nlohmann::json langs = nlohmann::json::array();
    for (size_t i = 0; i < laws.size(); ++i) {
        auto l = polyalign::to_json(laws[i]);
        l["cap"] = caps[i];
        langs.push_back(std::move(l));
    }
    return {{"budget", budget}, {"languages", langs}};
}

double objective(const AllocationProblem& problem, std::span<const int64_t> amounts) {
    double sum = 0.0;
    for (size_t i = 0; i < amounts.size(); ++i) {
        if (amounts[i] <= 0) return -std::numeric_limits<double>::infinity();
        sum += problem.laws[i].eval(static_cast<double>(amounts[i]));
    }
    return sum / static_cast<double>(amounts.size());
}

namespace {

void require_solvable(const AllocationProblem& problem) {
    problem.validate_shape();
    if (!problem.feasible()) {
        const int64_t total = std::accumulate(problem.caps.begin(), problem.caps.end(), int64_t{0});
        throw InfeasibleError("budget " + std::to_string(problem.budget) + " exceeds total availability " +
                              std::to_string(total));
    }
}

struct WaterLevel {
    const AllocationProblem& problem;

    double amount(size_t i, double lambda) const {
        return std::min(static_cast<double>(problem.caps[i]), problem.laws[i].scale_for_gain(lambda));
    }

    double total(double lambda) const {
        double s = 0.0;
        for (size_t i = 0; i < problem.size(); ++i) s += amount(i, lambda);
        return s;
    }
};

// Bisection on log(lambda); total(lambda) is nonincreasing and strictly
// decreasing while any coordinate is below its cap.
double find_lambda(const AllocationProblem& problem) {
    const WaterLevel level{problem};
    const size_t n = problem.size();
    const auto c = static_cast<double>(problem.budget);

    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const auto& law = problem.laws[i];
        lo = std::min(lo, law.marginal_gain(std::min(static_cast<double>(problem.caps[i]), c)));
        hi = std::max(hi, law.marginal_gain(c / static_cast<double>(n)));
    }
    // total(lo) >= C and total(hi) <= C by construction
    double log_lo = std::log(lo);
    double log_hi = std::log(hi);
    for (int iter = 0; iter < 400 && log_hi - log_lo > 1e-15 * std::max(1.0, std::abs(log_lo)); ++iter) {
        const double mid = 0.5 * (log_lo + log_hi);
        if (level.total(std::exp(mid)) >= c) {
            log_lo = mid;
        } else {
            log_hi = mid;
        }
    }
    const double a = std::exp(log_lo);
    const double b = std::exp(log_hi);
    return std::abs(level.total(a) - c) <= std::abs(level.total(b) - c) ? a : b;
}

std::vector<int64_t> largest_remainder(const AllocationProblem& problem, const std::vector<double>& real) {
    const size_t n = real.size();
    std::vector<int64_t> out(n);
    std::vector<double> remainder(n);
    int64_t assigned = 0;
    for (size_t i = 0; i < n; ++i) {
        const double f = std::floor(real[i]);
        out[i] = std::clamp<int64_t>(static_cast<int64_t>(f), 0, problem.caps[i]);
        remainder[i] = real[i] - static_cast<double>(out[i]);
        assigned += out[i];
    }
    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) { return remainder[a] > remainder[b]; });

    int64_t left = problem.budget - assigned;
    for (size_t k = 0; left > 0 && k < n; ++k) {
        const size_t i = order[k];
        if (out[i] < problem.caps[i]) {
            ++out[i];
            --left;
        }
    }
    for (size_t i = 0; left > 0 && i < n; ++i) {
        const int64_t room = std::min(problem.caps[i] - out[i], left);
        out[i] += room;
        left -= room;
    }
    for (auto it = order.rbegin(); left < 0 && it != order.rend(); ++it) {
        if (out[*it] > 0) {
            --out[*it];
            ++left;
        }
    }
    return out;
}

// Moves single units from the coordinate with the smallest loss to the one
// with the largest gain until no move improves the objective. For a separable
// concave objective under a sum constraint this reaches the integer optimum.
void polish(const AllocationProblem& problem, std::vector<int64_t>& amounts) {
    const size_t n = amounts.size();
    if (n < 2) return;
    constexpr double inf = std::numeric_limits<double>::infinity();
    const int64_t max_moves = problem.budget + static_cast<int64_t>(n) * 4;
    for (int64_t move = 0; move < max_moves; ++move) {
        // two best receivers and two best donors, so i != j can always be met
        size_t g1 = n, g2 = n, l1 = n, l2 = n;
        double gv1 = -inf, gv2 = -inf, lv1 = inf, lv2 = inf;
        for (size_t i = 0; i < n; ++i) {
            const auto& law = problem.laws[i];
            const auto a = static_cast<double>(amounts[i]);
            if (amounts[i] < problem.caps[i]) {
                const double g = law.unit_gain(a);
                if (g > gv1) {
                    g2 = g1, gv2 = gv1, g1 = i, gv1 = g;
                } else if (g > gv2) {
                    g2 = i, gv2 = g;
                }
            }
            if (amounts[i] > 0) {
                const double l = law.unit_gain(a - 1.0);
                if (l < lv1) {
                    l2 = l1, lv2 = lv1, l1 = i, lv1 = l;
                } else if (l < lv2) {
                    l2 = i, lv2 = l;
                }
            }
        }
        size_t to = g1, from = l1;
        double gain = gv1, loss = lv1;
        if (to != n && to == from) {
            // pick the better of (g1, l2) and (g2, l1)
            const double alt_a = (l2 == n) ? -inf : gv1 - lv2;
            const double alt_b = (g2 == n) ? -inf : gv2 - lv1;
            if (alt_a >= alt_b) {
                from = l2, loss = lv2;
            } else {
                to = g2, gain = gv2;
            }
        }
        if (to == n || from == n || to == from) return;
        if (!(gain > loss) || (std::isfinite(gain) && gain - loss <= 1e-15 * std::abs(gain))) return;
        ++amounts[to];
        --amounts[from];
    }
}

}  // namespace

AllocationResult solve(const AllocationProblem& problem) {
    require_solvable(problem);
    const size_t n = problem.size();
    const int64_t total_caps = std::accumulate(problem.caps.begin(), problem.caps.end(), int64_t{0});

    AllocationResult result;
    result.real_amounts.resize(n);
    if (total_caps == problem.budget) {
        double lambda = std::numeric_limits<double>::infinity();
        for (size_t i = 0; i < n; ++i) {
            lambda = std::min(lambda, problem.laws[i].marginal_gain(static_cast<double>(problem.caps[i])));
            result.real_amounts[i] = static_cast<double>(problem.caps[i]);
            result.binding_caps.push_back(i);
        }
        result.dual_lambda = lambda;
    } else {
        const double lambda = find_lambda(problem);
        const WaterLevel level{problem};
        for (size_t i = 0; i < n; ++i) {
            result.real_amounts[i] = level.amount(i, lambda);
            if (problem.laws[i].scale_for_gain(lambda) >= static_cast<double>(problem.caps[i]))
                result.binding_caps.push_back(i);
        }
        result.dual_lambda = lambda;
    }

    double real_sum = 0.0;
    for (size_t i = 0; i < n; ++i) real_sum += problem.laws[i].eval(result.real_amounts[i]);
    result.real_objective = real_sum / static_cast<double>(n);

    result.amounts = largest_remainder(problem, result.real_amounts);
    polish(problem, result.amounts);
    result.objective = objective(problem, result.amounts);
    return result;
}

ValidationReport validate_result(const AllocationProblem& problem, std::span<const int64_t> amounts,
                                 int64_t tolerance) {
    problem.validate_shape();
    if (amounts.size() != problem.size())
        throw ConfigError("candidate has " + std::to_string(amounts.size()) + " amounts for " +
                          std::to_string(problem.size()) + " languages");
    ValidationReport report;
    const int64_t sum = std::accumulate(amounts.begin(), amounts.end(), int64_t{0});
    report.sum_gap = sum - problem.budget;
    for (size_t i = 0; i < amounts.size(); ++i) {
        if (amounts[i] > problem.caps[i]) report.cap_violations.push_back(i);
        if (amounts[i] < 0) report.negative.push_back(i);
    }
    report.feasible =
        std::abs(report.sum_gap) <= tolerance && report.cap_violations.empty() && report.negative.empty();
    report.objective = report.negative.empty() ? objective(problem, amounts) : std::nan("");
    return report;
}

AllocationResult uniform_allocation(const AllocationProblem& problem) {
    require_solvable(problem);
    const size_t n = problem.size();
    AllocationResult result;
    result.amounts.assign(n, 0);
    std::vector<size_t> active(n);
    std::iota(active.begin(), active.end(), size_t{0});
    int64_t remaining = problem.budget;

    bool pinned_any = true;
    while (pinned_any && !active.empty()) {
        pinned_any = false;
        const auto m = static_cast<int64_t>(active.size());
        std::vector<size_t> still;
        for (size_t i : active) {
            // cap <= remaining / m, kept in integers
            if (problem.caps[i] * m <= remaining) {
                result.amounts[i] = problem.caps[i];
                result.binding_caps.push_back(i);
                pinned_any = true;
            } else {
                still.push_back(i);
            }
        }
        for (size_t i : active) {
            if (std::find(still.begin(), still.end(), i) == still.end()) remaining -= problem.caps[i];
        }
        active = std::move(still);
    }
    if (!active.empty()) {
        const auto m = static_cast<int64_t>(active.size());
        const int64_t base = remaining / m;
        int64_t extra = remaining % m;
        for (size_t i : active) {
            result.amounts[i] = base + (extra > 0 ? 1 : 0);
            if (extra > 0) --extra;
        }
    }
    std::sort(result.binding_caps.begin(), result.binding_caps.end());
    result.real_amounts.assign(result.amounts.begin(), result.amounts.end());
    result.objective = objective(problem, result.amounts);
    result.real_objective = result.objective;
    return result;
}

namespace {

nlohmann::json finite_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

}  // namespace

nlohmann::json to_json(const AllocationResult& r, const AllocationProblem& problem) {
    nlohmann::json langs = nlohmann::json::array();
    for (const auto& law : problem.laws) langs.push_back(law.profile().lang.str());
    return {
        {"budget", problem.budget},
        {"languages", langs},
        {"amounts", r.amounts},
        {"objective", finite_or_null(r.objective)},
        {"dual_lambda", r.dual_lambda},
        {"binding_caps", r.binding_caps},
        {"real_amounts", r.real_amounts},
        {"real_objective", finite_or_null(r.real_objective)},
    };
}

nlohmann::json to_json(const ValidationReport& r) {
    return {
        {"feasible", r.feasible},
        {"sum_gap", r.sum_gap},
        {"cap_violations", r.cap_violations},
        {"negative", r.negative},
        {"objective", finite_or_null(r.objective)},
    };
}

std::string table_row(const AllocationResult& result, const AllocationProblem& problem) {
    std::ostringstream out;
    out << problem.budget;
    for (int64_t a : result.amounts) out << '\t' << a;
    out.precision(6);
    out << '\t' << std::fixed << result.objective << '\n';
    return out.str();
}

}  // namespace polyalign::alloc

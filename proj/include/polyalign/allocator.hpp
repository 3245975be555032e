#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "polyalign/common.hpp"
#include "polyalign/scaling_law.hpp"

namespace polyalign::alloc {

/// Budget C of translation pairs split across n languages, each with its own
/// scaling law and availability cap.
struct AllocationProblem {
    std::vector<ScalingLaw> laws;
    int64_t budget = 0;
    std::vector<int64_t> caps;

    size_t size() const { return laws.size(); }

    /// n >= 1, |laws| == |caps|, caps >= 1, budget > 0. Throws ConfigError.
    void validate_shape() const;
    bool feasible() const;

    /// {"budget": C, "languages": [{"lang","alpha","beta","gamma","cap"}]}
    static AllocationProblem from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
};

/// Budget exceeds total availability.
class InfeasibleError : public Error {
public:
    using Error::Error;
};

struct AllocationResult {
    std::vector<int64_t> amounts;
    /// Mean predicted score over the integer amounts.
    double objective = 0.0;
    /// Shared marginal gain of all slack (uncapped) coordinates.
    double dual_lambda = 0.0;
    std::vector<size_t> binding_caps;
    /// Water-filling solution before integerization.
    std::vector<double> real_amounts;
    double real_objective = 0.0;
};

/// Water-filling: bisection on the shared multiplier lambda with
/// X_i(lambda) = min(cap_i, (lambda / (-alpha_i beta_i gamma_i^beta_i))^(1/(beta_i-1))),
/// then largest-remainder integerization and single-unit exchange polishing
/// (exact for separable concave objectives) so the integer vector sums to C.
AllocationResult solve(const AllocationProblem& problem);

/// Mean predicted score of an integer allocation; -inf if any amount is 0.
double objective(const AllocationProblem& problem, std::span<const int64_t> amounts);

struct ValidationReport {
    bool feasible = false;
    /// sum(amounts) - budget
    int64_t sum_gap = 0;
    std::vector<size_t> cap_violations;
    std::vector<size_t> negative;
    double objective = 0.0;
};

/// Read-only feasibility check: |sum - C| <= tolerance and caps respected.
ValidationReport validate_result(const AllocationProblem& problem, std::span<const int64_t> amounts,
                                 int64_t tolerance = 0);

/// Equal shares with largest remainder (ties to lower index); shares above a
/// cap are pinned to the cap and the residual is re-split among the rest
/// until nothing changes.
AllocationResult uniform_allocation(const AllocationProblem& problem);

nlohmann::json to_json(const AllocationResult& result, const AllocationProblem& problem);
nlohmann::json to_json(const ValidationReport& report);

/// One tab-separated row: budget, amounts in problem order, objective.
std::string table_row(const AllocationResult& result, const AllocationProblem& problem);

}  // namespace polyalign::alloc

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "polyalign/common.hpp"
#include "polyalign/similarity.hpp"

namespace polyalign {

/// Translation score as a function of translation-data scale X:
///
///     S(X) = 100 - alpha * (gamma * X)^beta,   alpha > 0, -1 < beta < 0,
///
/// with gamma taken from the bound LanguageProfile. S is strictly increasing,
/// strictly concave and bounded above by 100.
class ScalingLaw {
public:
    /// Throws DomainError unless alpha > 0 and -1 < beta < 0.
    ScalingLaw(LanguageProfile profile, double alpha, double beta, std::string setting_tag = "CoIT-translation");

    const LanguageProfile& profile() const { return profile_; }
    double gamma() const { return profile_.gamma; }
    double alpha() const { return alpha_; }
    double beta() const { return beta_; }
    const std::string& setting_tag() const { return setting_tag_; }

    /// 100 - alpha (gamma X)^beta. DomainError for X <= 0.
    double eval(double data_scale) const;

    /// dS/dX = -alpha beta gamma^beta X^(beta-1) > 0. DomainError for X <= 0.
    double marginal_gain(double data_scale) const;

    /// Inverse of marginal_gain: the X at which dS/dX equals `gain` (> 0).
    double scale_for_gain(double gain) const;

    /// S(X + 1) - S(X) for X >= 0 (infinite when X == 0), computed without
    /// cancellation.
    double unit_gain(double data_scale) const;

    /// -alpha beta gamma^beta, the constant factor of marginal_gain.
    double gain_coefficient() const;

private:
    LanguageProfile profile_;
    double alpha_;
    double beta_;
    std::string setting_tag_;
};

inline double eval_law(const ScalingLaw& law, double data_scale) { return law.eval(data_scale); }
inline double marginal_gain(const ScalingLaw& law, double data_scale) { return law.marginal_gain(data_scale); }

struct DataPoint {
    int64_t data_scale = 0;
    double score = 0.0;
};

struct FitResult {
    ScalingLaw law;
    /// Root-mean-square residual of ln(100 - S) against the fitted line.
    double rmse = 0.0;
};

/// The regression produced a beta outside (-1, 0); carries the raw estimates.
class RejectedFitError : public Error {
public:
    RejectedFitError(double alpha, double beta, double rmse);
    double alpha;
    double beta;
    double rmse;
};

/// Ordinary least squares of y = ln(100 - S) on x = ln(gamma X):
/// beta = slope, alpha = exp(intercept). Needs at least two distinct scales,
/// positive scales and scores below 100. Result is independent of point order.
FitResult fit_law(std::span<const DataPoint> points, const LanguageProfile& profile,
                  const std::string& setting_tag = "CoIT-translation");

/// Reads "data_scale<TAB>score" rows; a non-numeric first row is a header.
std::vector<DataPoint> read_points_tsv(const std::string& path);

nlohmann::json to_json(const FitResult& fit);
nlohmann::json to_json(const ScalingLaw& law);
ScalingLaw law_from_json(const nlohmann::json& j);

struct CurveSample {
    double data_scale;
    double predicted;
};

/// `count` log-spaced samples of the law over [from, to].
std::vector<CurveSample> sample_curve(const ScalingLaw& law, double from, double to, int count);

}  // namespace polyalign

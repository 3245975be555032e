#include "polyalign/scaling_law.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "polyalign/text.hpp"

namespace polyalign {

namespace {

std::string fmt(double v) {
    std::ostringstream s;
    s.precision(17);
    s << v;
    return s.str();
}

void require_positive_scale(double data_scale) {
    if (!(data_scale > 0.0) || !std::isfinite(data_scale))
        throw DomainError("data scale must be positive and finite, got " + fmt(data_scale));
}

}  // namespace

ScalingLaw::ScalingLaw(LanguageProfile profile, double alpha, double beta, std::string setting_tag)
    : profile_(std::move(profile)), alpha_(alpha), beta_(beta), setting_tag_(std::move(setting_tag)) {
    if (!(alpha_ > 0.0) || !std::isfinite(alpha_)) throw DomainError("alpha must be positive, got " + fmt(alpha_));
    if (!(beta_ > -1.0 && beta_ < 0.0)) throw DomainError("beta must lie in (-1, 0), got " + fmt(beta_));
    if (!(profile_.gamma > 0.0 && profile_.gamma < 1.0))
        throw DomainError("gamma must lie in (0, 1), got " + fmt(profile_.gamma));
}

double ScalingLaw::eval(double data_scale) const {
    require_positive_scale(data_scale);
    return 100.0 - alpha_ * std::pow(profile_.gamma * data_scale, beta_);
}

double ScalingLaw::gain_coefficient() const { return -alpha_ * beta_ * std::pow(profile_.gamma, beta_); }

double ScalingLaw::marginal_gain(double data_scale) const {
    require_positive_scale(data_scale);
    return gain_coefficient() * std::pow(data_scale, beta_ - 1.0);
}

double ScalingLaw::scale_for_gain(double gain) const {
    if (!(gain > 0.0)) throw DomainError("marginal gain must be positive, got " + fmt(gain));
    return std::pow(gain / gain_coefficient(), 1.0 / (beta_ - 1.0));
}

double ScalingLaw::unit_gain(double data_scale) const {
    if (data_scale < 0.0) throw DomainError("data scale must be nonnegative, got " + fmt(data_scale));
    if (data_scale == 0.0) return std::numeric_limits<double>::infinity();
    const double term = alpha_ * std::pow(profile_.gamma * data_scale, beta_);
    return -term * std::expm1(beta_ * std::log1p(1.0 / data_scale));
}

RejectedFitError::RejectedFitError(double a, double b, double r)
    : Error("fitted beta " + fmt(b) + " (alpha " + fmt(a) + ") is outside (-1, 0)"), alpha(a), beta(b), rmse(r) {}

FitResult fit_law(std::span<const DataPoint> points, const LanguageProfile& profile, const std::string& setting_tag) {
    std::vector<DataPoint> sorted(points.begin(), points.end());
    std::set<int64_t> scales;
    for (const auto& p : sorted) {
        if (p.data_scale <= 0) throw DomainError("data scale must be positive for fitting");
        if (!(p.score < 100.0) || !std::isfinite(p.score))
            throw DomainError("score " + fmt(p.score) + " is not below 100; ln(100 - S) is undefined");
        scales.insert(p.data_scale);
    }
    if (scales.size() < 2) throw DomainError("fitting needs at least two distinct data scales");
    if (!(profile.gamma > 0.0 && profile.gamma < 1.0)) throw DomainError("gamma must lie in (0, 1)");

    // fixed summation order makes the estimate independent of input order
    std::sort(sorted.begin(), sorted.end(), [](const DataPoint& a, const DataPoint& b) {
        return a.data_scale != b.data_scale ? a.data_scale < b.data_scale : a.score < b.score;
    });

    const auto n = static_cast<double>(sorted.size());
    std::vector<double> xs;
    std::vector<double> ys;
    for (const auto& p : sorted) {
        xs.push_back(std::log(profile.gamma * static_cast<double>(p.data_scale)));
        ys.push_back(std::log(100.0 - p.score));
    }
    double x_mean = 0.0;
    double y_mean = 0.0;
    for (size_t i = 0; i < xs.size(); ++i) {
        x_mean += xs[i];
        y_mean += ys[i];
    }
    x_mean /= n;
    y_mean /= n;
    double sxx = 0.0;
    double sxy = 0.0;
    for (size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - x_mean) * (xs[i] - x_mean);
        sxy += (xs[i] - x_mean) * (ys[i] - y_mean);
    }
    const double slope = sxy / sxx;
    const double intercept = y_mean - slope * x_mean;

    double sse = 0.0;
    for (size_t i = 0; i < xs.size(); ++i) {
        const double r = ys[i] - (intercept + slope * xs[i]);
        sse += r * r;
    }
    const double rmse = std::sqrt(sse / n);
    const double alpha = std::exp(intercept);
    if (!(slope > -1.0 && slope < 0.0)) throw RejectedFitError(alpha, slope, rmse);
    return FitResult{ScalingLaw(profile, alpha, slope, setting_tag), rmse};
}

std::vector<DataPoint> read_points_tsv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot read data points from " + path);
    std::vector<DataPoint> points;
    std::string raw;
    size_t lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        const auto line = text::trim(text::chomp_cr(raw));
        if (line.empty() || line.front() == '#') continue;
        const auto fields = text::split_tabs(line);
        DataPoint p;
        bool ok = fields.size() == 2;
        if (ok) {
            const auto f0 = text::trim(fields[0]);
            const auto f1 = text::trim(fields[1]);
            const auto r0 = std::from_chars(f0.data(), f0.data() + f0.size(), p.data_scale);
            const auto r1 = std::from_chars(f1.data(), f1.data() + f1.size(), p.score);
            ok = r0.ec == std::errc{} && r0.ptr == f0.data() + f0.size() && r1.ec == std::errc{} &&
                 r1.ptr == f1.data() + f1.size();
        }
        if (!ok) {
            if (points.empty() && lineno == 1) continue;  // header
            throw InputError(path + ":" + std::to_string(lineno) + ": expected <data_scale>\\t<score>");
        }
        points.push_back(p);
    }
    return points;
}

nlohmann::json to_json(const ScalingLaw& law) {
    return {{"lang", law.profile().lang.str()}, {"gamma", law.gamma()},       {"alpha", law.alpha()},
            {"beta", law.beta()},               {"setting_tag", law.setting_tag()}};
}

nlohmann::json to_json(const FitResult& fit) {
    auto j = to_json(fit.law);
    j["rmse"] = fit.rmse;
    return j;
}

ScalingLaw law_from_json(const nlohmann::json& j) {
    try {
        const LangCode lang(j.at("lang").get<std::string>());
        auto profile = load_profile_override(lang, j.at("gamma").get<double>());
        return ScalingLaw(profile, j.at("alpha").get<double>(), j.at("beta").get<double>(),
                          j.value("setting_tag", std::string("CoIT-translation")));
    } catch (const nlohmann::json::exception& ex) {
        throw ConfigError(std::string("bad scaling law: ") + ex.what());
    }
}

std::vector<CurveSample> sample_curve(const ScalingLaw& law, double from, double to, int count) {
    if (!(from > 0.0) || !(to >= from) || count < 1) throw DomainError("curve range must satisfy 0 < from <= to");
    std::vector<CurveSample> out;
    const double lo = std::log(from);
    const double hi = std::log(to);
    for (int i = 0; i < count; ++i) {
        const double x = count == 1 ? from : std::exp(lo + (hi - lo) * i / (count - 1));
        out.push_back({x, law.eval(x)});
    }
    return out;
}

}  // namespace polyalign

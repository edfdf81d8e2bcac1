#pragma once

#include <string>
#include <utility>
#include <vector>

namespace alloy {

enum class CheckStatus { Ok, HypothesesNotMet, NumericalFailure };

inline const char* to_string(CheckStatus s) {
    switch (s) {
    case CheckStatus::Ok: return "ok";
    case CheckStatus::HypothesesNotMet: return "hypotheses_not_met";
    case CheckStatus::NumericalFailure: return "numerical_failure";
    }
    return "?";
}

/// Numerical evaluation of one instance of an inequality lhs <= rhs.
struct InequalityReport {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    double error = 0.0; // numerical error estimate on lhs
    CheckStatus status = CheckStatus::Ok;
    std::string note;
    std::vector<std::pair<std::string, double>> details;

    double margin() const { return rhs - lhs; }
    bool passed() const { return status == CheckStatus::Ok && lhs <= rhs + error; }
    // A genuine counterexample or an unreliable computation; unmet hypotheses are neither.
    bool violated() const { return status != CheckStatus::HypothesesNotMet && !passed(); }

    double detail(const std::string& key, double fallback = 0.0) const {
        for (const auto& [k, v] : details)
            if (k == key) return v;
        return fallback;
    }
};

} // namespace alloy

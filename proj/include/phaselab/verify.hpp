#pragma once

#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "phaselab/types.hpp"

namespace phaselab {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool passed = false;
    /// Human-readable measured values.
    std::string measured;
    double seconds = 0;
};

enum class Suite { Fast, Full };

Suite suite_from_string(std::string_view name);
std::string_view to_string(Suite suite);

struct VerifyReport {
    Suite suite = Suite::Fast;
    std::vector<CriterionResult> criteria;
    bool all_passed() const;
};

void to_json(nlohmann::json& j, const CriterionResult& r);
void to_json(nlohmann::json& j, const VerifyReport& r);

struct VerifyOptions {
    /// Closed-form lifted distance under test; tests may swap in a broken one.
    std::function<double(const Vector&, const Vector&)> d2;
    VerifyOptions();
};

constexpr int kCriterionCount = 11;

/// Criterion ids (1-based) run by each suite.
std::vector<int> suite_criteria(Suite suite);

/// Runs one criterion; failures are reported, never thrown.
CriterionResult run_criterion(int id, const VerifyOptions& opts = {});

VerifyReport verify(Suite suite, const VerifyOptions& opts = {});

/// "PASS  AC4 stability certificate  measured ...  (1.2 s)"
std::string format_line(const CriterionResult& r);

}  // namespace phaselab

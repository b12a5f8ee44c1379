#include "sbstlab/evaluation/evaluation.hpp"

#include "sbstlab/errors.hpp"

namespace sbstlab::evaluation {

TestVerdict test_detects(const faults::FaultedPair& pair, const search::TestCase& test,
                         const minilang::Limits& limits) {
    TestVerdict v;
    try {
        const auto buggy = minilang::execute(pair.buggy, test.entry, test.args, limits);
        const auto fixed = minilang::execute(pair.fixed, test.entry, test.args, limits);
        v.detects = !buggy.same_observable(fixed);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::ArityMismatch || e.code() == ErrorCode::TypeMismatch) {
            v.invalid = true; // broken test: logged, never detecting
        } else {
            throw;
        }
    }
    return v;
}

SuiteVerdict suite_detects(const faults::FaultedPair& pair,
                           const std::vector<search::TestCase>& suite,
                           const minilang::Limits& limits) {
    SuiteVerdict verdict;
    verdict.per_test.reserve(suite.size());
    for (std::size_t i = 0; i < suite.size(); ++i) {
        const TestVerdict v = test_detects(pair, suite[i], limits);
        verdict.per_test.push_back(v.detects ? 1 : 0);
        if (v.invalid) ++verdict.invalid_tests;
        if (v.detects && !verdict.detected) {
            verdict.detected = true;
            verdict.first_detecting = static_cast<int>(i);
            verdict.witness_buggy =
                minilang::execute(pair.buggy, suite[i].entry, suite[i].args, limits);
            verdict.witness_fixed =
                minilang::execute(pair.fixed, suite[i].entry, suite[i].args, limits);
        }
    }
    if (suite.empty()) verdict.reason = "empty_suite";
    else verdict.reason = verdict.detected ? "detected" : "not_detected";
    return verdict;
}

} // namespace sbstlab::evaluation

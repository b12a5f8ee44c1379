#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sbstlab/faults/mutate.hpp"
#include "sbstlab/search/search.hpp"

namespace sbstlab::evaluation {

struct TestVerdict {
    bool detects = false;
    bool invalid = false; // arity/type mismatch; counted as non-detecting
};

/// True iff the observables (status kind, returned value or trap kind,
/// output list) differ between the buggy and fixed versions.
TestVerdict test_detects(const faults::FaultedPair& pair, const search::TestCase& test,
                         const minilang::Limits& limits = {});

struct SuiteVerdict {
    bool detected = false;
    int first_detecting = -1;              // index into the suite
    std::vector<std::uint8_t> per_test;    // 1 = detecting
    int invalid_tests = 0;
    std::string reason;                    // "detected" / "not_detected" / "empty_suite" / "skipped"
    // Witness for audit: the two observables of the first detecting test.
    std::optional<minilang::ExecOutcome> witness_buggy;
    std::optional<minilang::ExecOutcome> witness_fixed;
};

SuiteVerdict suite_detects(const faults::FaultedPair& pair,
                           const std::vector<search::TestCase>& suite,
                           const minilang::Limits& limits = {});

} // namespace sbstlab::evaluation

#pragma once

#include <string_view>
#include <vector>

#include "sbstlab/minilang/ast.hpp"
#include "sbstlab/minilang/interp.hpp"
#include "sbstlab/rng.hpp"

namespace sbstlab::faults {

enum class MutOp : std::uint8_t {
    Ror,          // relational operator replacement
    Aor,          // arithmetic operator replacement
    ConstPerturb, // integer literal +/- 1
    CondNegate,   // wrap an if/while condition in `not`
    AssignDelete, // drop an assignment statement
};

std::string_view mut_op_name(MutOp op);
MutOp mut_op_from_name(std::string_view name);
const std::vector<MutOp>& all_mut_ops();

struct FaultSpec {
    MutOp op{};
    int site_count = 1; // number of distinct functions to mutate
};

struct MutationSite {
    int function = -1;
    minilang::NodeId node = -1; // node id in the fixed program
    MutOp op{};
};

/// Buggy/fixed program pair; `ground_truth[i]` is 1 iff function i holds a
/// mutation site.
struct FaultedPair {
    minilang::Program fixed;
    minilang::Program buggy;
    std::vector<std::uint8_t> ground_truth;
    std::vector<MutationSite> sites;
};

/// Applies one first-order mutation in each of `spec.site_count` distinct
/// functions. The buggy program is re-canonicalized (printed and re-parsed)
/// so its node ids follow the standard numbering. Throws
/// Error(NoCompatibleSite) / Error(InsufficientFunctions).
FaultedPair inject(const minilang::Program& fixed, const FaultSpec& spec, Rng& rng);

/// Argument sampling domain used by the detectability filter and by test
/// generation: int in [-100, 100], bool uniform.
inline constexpr std::int64_t kArgMin = -100;
inline constexpr std::int64_t kArgMax = 100;

minilang::Value sample_arg(minilang::Type type, Rng& rng);

/// True iff some random call (uniform entry, uniform arguments from the
/// domain above) observes different behavior between buggy and fixed.
/// A false result is "not shown detectable", not an equivalence proof.
bool check_detectable(const FaultedPair& pair, int samples, Rng& rng,
                      const minilang::Limits& limits = {});

} // namespace sbstlab::faults

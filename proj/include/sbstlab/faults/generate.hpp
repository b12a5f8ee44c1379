#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sbstlab/faults/mutate.hpp"
#include "sbstlab/minilang/ast.hpp"
#include "sbstlab/rng.hpp"

namespace sbstlab::faults {

/// Corpus template. `site_plan` allocates exact pair counts per
/// site_count, e.g. {{1, 30}, {3, 30}} for a stratified corpus.
struct GenParams {
    int n_programs = 0;
    int fns_min = 3;
    int fns_max = 6;
    int depth_min = 1;
    int depth_max = 3;
    std::vector<std::pair<int, int>> site_plan = {{1, 0}}; // (site_count, count); 0 = fill
    int detect_samples = 10000;
    int max_attempts = 50;
    std::uint64_t master_seed = 1;
    std::vector<MutOp> operators = all_mut_ops();
};

/// Bookkeeping for one generated pair; everything needed to regenerate or
/// audit it.
struct PairRecord {
    std::string id;      // "p000", ...
    std::uint64_t seed;  // per-slot derived seed
    int site_count = 0;
    int attempts = 0;    // attempts consumed before a detectable pair
    MutOp op{};
    FaultedPair pair;
};

/// Produces a random well-formed program: nested conditionals over the
/// parameters, arithmetic locals, bounded loops, occasional calls to
/// earlier functions.
minilang::Program random_program(Rng& rng, int fn_count, int depth_min, int depth_max,
                                 const std::string& source_name);

/// Seed-deterministic corpus of detectable pairs. Per-slot seeds are
/// derived from the master seed, so slots are order-independent. Throws
/// Error(GenerationExhausted) when a slot cannot produce a detectable pair
/// within `max_attempts`.
std::vector<PairRecord> gen_corpus(const GenParams& params);

} // namespace sbstlab::faults

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "sbstlab/faults/generate.hpp"

namespace sbstlab::faults {

/// One pair loaded from disk: parsed programs plus the manifest facts.
struct CorpusPair {
    std::string id;
    minilang::Program fixed;
    minilang::Program buggy;
    std::vector<std::uint8_t> ground_truth;
    std::vector<MutationSite> sites;
    int site_count = 0;
    std::uint64_t seed = 0;
};

struct Corpus {
    std::vector<CorpusPair> pairs;
    std::uint64_t master_seed = 0;

    int total_functions() const;
};

/// Layout: <dir>/manifest.json plus one directory per pair holding
/// fixed.mlp, buggy.mlp and truth.json. See docs/formats.md.
void save_corpus(const std::filesystem::path& dir, const std::vector<PairRecord>& records,
                 const GenParams& params);

/// Loads and validates a corpus; Error(CorpusInvalid) when files are
/// missing or the ground truth disagrees with the recorded sites.
Corpus load_corpus(const std::filesystem::path& dir);

} // namespace sbstlab::faults

#include "sbstlab/faults/corpus.hpp"

#include <fstream>

#include <json.hpp>

#include "sbstlab/errors.hpp"
#include "sbstlab/minilang/parser.hpp"
#include "sbstlab/minilang/printer.hpp"

namespace sbstlab::faults {

using nlohmann::json;

namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::CorpusInvalid, "cannot write " + path.string());
    out << content;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::CorpusInvalid, "cannot read " + path.string());
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

} // namespace

int Corpus::total_functions() const {
    int n = 0;
    for (const auto& p : pairs) n += p.fixed.function_count();
    return n;
}

void save_corpus(const std::filesystem::path& dir, const std::vector<PairRecord>& records,
                 const GenParams& params) {
    std::filesystem::create_directories(dir);
    json manifest;
    manifest["schema"] = 1;
    manifest["master_seed"] = params.master_seed;
    manifest["n_pairs"] = records.size();
    manifest["template"] = {
        {"fns_min", params.fns_min},         {"fns_max", params.fns_max},
        {"depth_min", params.depth_min},     {"depth_max", params.depth_max},
        {"detect_samples", params.detect_samples}, {"max_attempts", params.max_attempts},
    };
    json pair_list = json::array();
    for (const auto& rec : records) {
        const auto pair_dir = dir / rec.id;
        std::filesystem::create_directories(pair_dir);
        write_file(pair_dir / "fixed.mlp", minilang::print_program(rec.pair.fixed));
        write_file(pair_dir / "buggy.mlp", minilang::print_program(rec.pair.buggy));

        json truth;
        truth["function_count"] = rec.pair.fixed.function_count();
        truth["ground_truth"] = rec.pair.ground_truth;
        json sites = json::array();
        for (const auto& s : rec.pair.sites)
            sites.push_back({{"function", s.function},
                             {"function_name",
                              rec.pair.fixed.functions[static_cast<std::size_t>(s.function)].name},
                             {"node", s.node},
                             {"operator", mut_op_name(s.op)}});
        truth["sites"] = sites;
        truth["seed"] = rec.seed;
        truth["site_count"] = rec.site_count;
        truth["attempts"] = rec.attempts;
        write_file(pair_dir / "truth.json", truth.dump(2) + "\n");

        pair_list.push_back({{"id", rec.id},
                             {"dir", rec.id},
                             {"site_count", rec.site_count},
                             {"seed", rec.seed},
                             {"operator", mut_op_name(rec.op)}});
    }
    manifest["pairs"] = pair_list;
    write_file(dir / "manifest.json", manifest.dump(2) + "\n");
}

Corpus load_corpus(const std::filesystem::path& dir) {
    const auto manifest_path = dir / "manifest.json";
    json manifest;
    try {
        manifest = json::parse(read_file(manifest_path));
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::CorpusInvalid, manifest_path.string() + ": " + e.what());
    }

    Corpus corpus;
    corpus.master_seed = manifest.value("master_seed", std::uint64_t{0});
    if (!manifest.contains("pairs"))
        throw Error(ErrorCode::CorpusInvalid, "manifest has no pair list");

    for (const auto& entry : manifest["pairs"]) {
        CorpusPair pair;
        pair.id = entry.at("id").get<std::string>();
        pair.site_count = entry.at("site_count").get<int>();
        pair.seed = entry.at("seed").get<std::uint64_t>();
        const auto pair_dir = dir / entry.at("dir").get<std::string>();

        pair.fixed =
            minilang::parse_program(read_file(pair_dir / "fixed.mlp"), pair.id + "/fixed.mlp");
        pair.buggy =
            minilang::parse_program(read_file(pair_dir / "buggy.mlp"), pair.id + "/buggy.mlp");

        json truth;
        try {
            truth = json::parse(read_file(pair_dir / "truth.json"));
        } catch (const json::parse_error& e) {
            throw Error(ErrorCode::CorpusInvalid, pair.id + "/truth.json: " + e.what());
        }
        pair.ground_truth = truth.at("ground_truth").get<std::vector<std::uint8_t>>();
        for (const auto& s : truth.at("sites"))
            pair.sites.push_back({s.at("function").get<int>(),
                                  s.at("node").get<minilang::NodeId>(),
                                  mut_op_from_name(s.at("operator").get<std::string>())});

        // Invariants: label vector length, recount from sites, site_count.
        if (static_cast<int>(pair.ground_truth.size()) != pair.fixed.function_count())
            throw Error(ErrorCode::CorpusInvalid, pair.id + ": truth length != function count");
        if (pair.buggy.function_count() != pair.fixed.function_count())
            throw Error(ErrorCode::CorpusInvalid, pair.id + ": buggy/fixed function counts differ");
        std::vector<std::uint8_t> recount(pair.ground_truth.size(), 0);
        for (const auto& s : pair.sites) {
            if (s.function < 0 || s.function >= pair.fixed.function_count())
                throw Error(ErrorCode::CorpusInvalid, pair.id + ": site function out of range");
            recount[static_cast<std::size_t>(s.function)] = 1;
        }
        if (recount != pair.ground_truth)
            throw Error(ErrorCode::CorpusInvalid, pair.id + ": ground truth disagrees with sites");
        int labelled = 0;
        for (auto b : pair.ground_truth) labelled += b != 0;
        if (labelled != pair.site_count)
            throw Error(ErrorCode::CorpusInvalid, pair.id + ": site_count mismatch");

        corpus.pairs.push_back(std::move(pair));
    }
    return corpus;
}

} // namespace sbstlab::faults

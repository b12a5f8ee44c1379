#include "sbstlab/search/search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "sbstlab/errors.hpp"
#include "sbstlab/faults/mutate.hpp"

namespace sbstlab::search {

using cdg::ProgramCdg;
using cdg::TargetId;
using minilang::Program;
using minilang::Type;
using minilang::Value;

namespace {

std::vector<std::int64_t> genome_key(const TestCase& test) {
    std::vector<std::int64_t> key;
    key.reserve(test.args.size() + 1);
    key.push_back(test.entry);
    for (const auto& v : test.args) key.push_back(v.raw);
    return key;
}

} // namespace

void Archive::insert(TargetId target, const TestCase& test, int cap) {
    auto& bucket = by_target_[target];
    if (!bucket.seen.insert(genome_key(test)).second) return;
    bucket.tests.push_back(test);
    if (cap > 0 && static_cast<int>(bucket.tests.size()) > cap) {
        bucket.seen.erase(genome_key(bucket.tests.front()));
        bucket.tests.erase(bucket.tests.begin()); // FIFO
    }
}

std::size_t Archive::count(TargetId target) const {
    auto it = by_target_.find(target);
    return it == by_target_.end() ? 0 : it->second.tests.size();
}

const std::vector<TestCase>& Archive::tests(TargetId target) const {
    static const std::vector<TestCase> empty;
    auto it = by_target_.find(target);
    return it == by_target_.end() ? empty : it->second.tests;
}

std::vector<TargetId> Archive::keys() const {
    std::vector<TargetId> out;
    out.reserve(by_target_.size());
    for (const auto& [k, v] : by_target_)
        if (!v.tests.empty()) out.push_back(k);
    return out;
}

std::vector<TestCase> Archive::suite() const {
    std::vector<TestCase> out;
    std::set<std::vector<std::int64_t>> seen;
    for (const auto& [target, bucket] : by_target_)
        for (const auto& test : bucket.tests)
            if (seen.insert(genome_key(test)).second) out.push_back(test);
    return out;
}

std::vector<TargetId> filter_targets(const ProgramCdg& pc,
                                     const std::vector<std::uint8_t>& classification) {
    if (classification.size() != pc.cdgs.size())
        throw Error(ErrorCode::LengthMismatch, "classification does not cover all functions");
    std::vector<TargetId> out;
    for (const auto& t : pc.table.targets())
        if (classification[static_cast<std::size_t>(t.owner)]) out.push_back(t.id);
    return out;
}

std::vector<TargetId> initial_targets(const ProgramCdg& pc,
                                      const std::vector<TargetId>& filtered) {
    std::vector<TargetId> out;
    for (TargetId u : filtered)
        if (pc.parent_edge[static_cast<std::size_t>(u)] < 0) out.push_back(u);
    return out;
}

namespace detail {

void update_base_targets(std::vector<std::uint8_t>& base_mask,
                         const std::vector<std::uint8_t>& covered_any,
                         const std::vector<TargetId>& filtered, const ProgramCdg& pc) {
    for (TargetId u : filtered) {
        const auto iu = static_cast<std::size_t>(u);
        if (base_mask[iu]) continue;
        const int parent = pc.parent_edge[iu];
        if (parent < 0) {
            base_mask[iu] = 1;
            continue;
        }
        const auto& graph = pc.of(pc.table[u].owner);
        const auto& edge = graph.edges[static_cast<std::size_t>(parent)];
        const auto& from = graph.nodes[static_cast<std::size_t>(edge.from)];
        const TargetId guard = pc.table.branch(from.ast_node, edge.label == cdg::EdgeLabel::True);
        if (covered_any[static_cast<std::size_t>(guard)]) base_mask[iu] = 1;
    }
}

std::vector<std::uint8_t> switch_off_targets(const std::vector<std::uint8_t>& base_mask,
                                             const Archive& archive, const ProgramCdg& pc,
                                             const std::vector<std::uint8_t>& fn_flagged,
                                             Rng& rng) {
    std::vector<std::uint8_t> active = base_mask;
    for (std::size_t fn = 0; fn < pc.cdgs.size(); ++fn) {
        if (!fn_flagged[fn]) continue;
        const cdg::Cdg& graph = pc.cdgs[fn];
        for (std::size_t n = 0; n < graph.nodes.size(); ++n) {
            if (graph.nodes[n].kind != cdg::NodeKind::Predicate) continue;
            const auto [et, ef] = graph.outcome_edges.at(graph.nodes[n].ast_node);
            const cdg::CdgEdge& edge_true = graph.edges[static_cast<std::size_t>(et)];
            const cdg::CdgEdge& edge_false = graph.edges[static_cast<std::size_t>(ef)];
            const std::int64_t paths_true = pc.paths_of_edge(static_cast<int>(fn), et);
            const std::int64_t paths_false = pc.paths_of_edge(static_cast<int>(fn), ef);
            const TargetId rep_true = rng.pick(edge_true.phi);
            const TargetId rep_false = rng.pick(edge_false.phi);
            const auto tests_true = static_cast<std::int64_t>(archive.count(rep_true));
            const auto tests_false = static_cast<std::int64_t>(archive.count(rep_false));
            // tests_true / paths_true <=> tests_false / paths_false,
            // compared exactly by cross-multiplication.
            const std::int64_t lhs = tests_true * paths_false;
            const std::int64_t rhs = tests_false * paths_true;
            const std::vector<TargetId>* drop = nullptr;
            if (lhs > rhs) drop = &edge_true.phi;
            else if (lhs < rhs) drop = &edge_false.phi;
            if (drop)
                for (TargetId u : *drop) active[static_cast<std::size_t>(u)] = 0;
        }
    }
    return active;
}

namespace {

bool dominates(const PoolView& a, const PoolView& b, const std::vector<int>& objectives) {
    bool strictly = false;
    for (int j : objectives) {
        const double fa = (*a.fitness)[static_cast<std::size_t>(j)];
        const double fb = (*b.fitness)[static_cast<std::size_t>(j)];
        if (fa > fb) return false;
        if (fa < fb) strictly = true;
    }
    return strictly;
}

void crowding_distances(const std::vector<PoolView>& pool, const std::vector<int>& front,
                        const std::vector<int>& objectives, std::vector<double>& crowding) {
    for (int idx : front) crowding[static_cast<std::size_t>(idx)] = 0.0;
    if (front.size() <= 2) {
        for (int idx : front)
            crowding[static_cast<std::size_t>(idx)] = std::numeric_limits<double>::infinity();
        return;
    }
    std::vector<int> order = front;
    for (int j : objectives) {
        const auto fit = [&](int idx) {
            return (*pool[static_cast<std::size_t>(idx)].fitness)[static_cast<std::size_t>(j)];
        };
        std::sort(order.begin(), order.end(), [&](int x, int y) {
            if (fit(x) != fit(y)) return fit(x) < fit(y);
            return x < y;
        });
        const double lo = fit(order.front());
        const double hi = fit(order.back());
        crowding[static_cast<std::size_t>(order.front())] = std::numeric_limits<double>::infinity();
        crowding[static_cast<std::size_t>(order.back())] = std::numeric_limits<double>::infinity();
        if (hi <= lo) continue;
        for (std::size_t k = 1; k + 1 < order.size(); ++k)
            crowding[static_cast<std::size_t>(order[k])] +=
                (fit(order[k + 1]) - fit(order[k - 1])) / (hi - lo);
    }
}

} // namespace

Selection select_population(const std::vector<PoolView>& pool, const std::vector<int>& objectives,
                            int want) {
    // Rank 0: for each objective the test minimizing its fitness, ties
    // broken by fewer args and then pool order.
    std::vector<std::uint8_t> in_rank0(pool.size(), 0);
    for (int j : objectives) {
        int best = 0;
        for (int i = 1; i < static_cast<int>(pool.size()); ++i) {
            const double fi = (*pool[static_cast<std::size_t>(i)].fitness)[static_cast<std::size_t>(j)];
            const double fb =
                (*pool[static_cast<std::size_t>(best)].fitness)[static_cast<std::size_t>(j)];
            if (fi < fb || (fi == fb && pool[static_cast<std::size_t>(i)].args <
                                            pool[static_cast<std::size_t>(best)].args))
                best = i;
        }
        in_rank0[static_cast<std::size_t>(best)] = 1;
    }

    std::vector<std::vector<int>> fronts;
    fronts.emplace_back();
    for (std::size_t i = 0; i < pool.size(); ++i)
        if (in_rank0[i]) fronts.front().push_back(static_cast<int>(i));

    // Fast non-dominated sort of the remainder (domination counts computed
    // once, fronts peeled off).
    std::vector<int> rest;
    for (std::size_t i = 0; i < pool.size(); ++i)
        if (!in_rank0[i]) rest.push_back(static_cast<int>(i));
    const std::size_t r = rest.size();
    std::vector<int> dominated_count(r, 0);
    std::vector<std::vector<int>> dominating(r);
    for (std::size_t x = 0; x < r; ++x) {
        for (std::size_t y = x + 1; y < r; ++y) {
            const auto& a = pool[static_cast<std::size_t>(rest[x])];
            const auto& b = pool[static_cast<std::size_t>(rest[y])];
            if (dominates(a, b, objectives)) {
                dominating[x].push_back(static_cast<int>(y));
                ++dominated_count[y];
            } else if (dominates(b, a, objectives)) {
                dominating[y].push_back(static_cast<int>(x));
                ++dominated_count[x];
            }
        }
    }
    std::vector<int> current;
    for (std::size_t x = 0; x < r; ++x)
        if (dominated_count[x] == 0) current.push_back(static_cast<int>(x));
    while (!current.empty()) {
        std::vector<int> front, next;
        front.reserve(current.size());
        for (int x : current) front.push_back(rest[static_cast<std::size_t>(x)]);
        for (int x : current)
            for (int y : dominating[static_cast<std::size_t>(x)])
                if (--dominated_count[y] == 0) next.push_back(y);
        std::sort(front.begin(), front.end()); // keep pool order within a front
        std::sort(next.begin(), next.end());
        fronts.push_back(std::move(front));
        current = std::move(next);
    }

    Selection out;
    std::vector<double> crowding(pool.size(), 0.0);
    for (std::size_t f = 0; f < fronts.size() && static_cast<int>(out.picked.size()) < want; ++f) {
        auto& front = fronts[f];
        crowding_distances(pool, front, objectives, crowding);
        const int room = want - static_cast<int>(out.picked.size());
        if (static_cast<int>(front.size()) > room) {
            std::stable_sort(front.begin(), front.end(), [&](int x, int y) {
                const double cx = crowding[static_cast<std::size_t>(x)];
                const double cy = crowding[static_cast<std::size_t>(y)];
                if (cx != cy) return cx > cy;
                return x < y;
            });
            front.resize(static_cast<std::size_t>(room));
        }
        for (int idx : front) {
            out.picked.push_back(idx);
            out.rank.push_back(static_cast<int>(f));
            out.crowding.push_back(crowding[static_cast<std::size_t>(idx)]);
        }
    }
    return out;
}

} // namespace detail

namespace {

struct Individual {
    TestCase test;
    std::vector<double> fitness;         // aligned with the filtered target list
    std::vector<std::uint8_t> covered;   // aligned with the filtered target list
    int rank = 0;
    double crowding = 0.0;
};

class Engine {
  public:
    Engine(const Program& program, const ProgramCdg& pc,
           const std::vector<std::uint8_t>& classification, std::int64_t budget,
           std::uint64_t seed, const SearchParams& params)
        : program_(program), pc_(pc), classification_(classification), budget_(budget),
          rng_(seed), params_(params) {}

    SearchResult run() {
        SearchResult result;
        filtered_ = filter_targets(pc_, classification_);
        if (filtered_.empty()) {
            result.status = RunStatus::Skipped;
            return result;
        }
        position_.assign(pc_.table.size(), -1);
        for (std::size_t i = 0; i < filtered_.size(); ++i)
            position_[static_cast<std::size_t>(filtered_[i])] = static_cast<int>(i);

        base_mask_.assign(pc_.table.size(), 0);
        for (TargetId u : initial_targets(pc_, filtered_))
            base_mask_[static_cast<std::size_t>(u)] = 1;
        covered_any_.assign(pc_.table.size(), 0);

        // Initial random population (consumes budget).
        std::vector<Individual> population;
        const int initial = static_cast<int>(std::min<std::int64_t>(params_.population, budget_));
        population.reserve(static_cast<std::size_t>(params_.population));
        for (int i = 0; i < initial; ++i) population.push_back(evaluate(random_test()));
        absorb(population);

        while (evaluations_ < budget_) {
            const int remaining = static_cast<int>(
                std::min<std::int64_t>(params_.population, budget_ - evaluations_));
            std::vector<Individual> offspring = generate_offspring(population, remaining);
            absorb(offspring);

            std::vector<Individual> merged;
            merged.reserve(population.size() + offspring.size());
            for (auto& ind : population) merged.push_back(std::move(ind));
            for (auto& ind : offspring) merged.push_back(std::move(ind));

            const auto active_mask =
                detail::switch_off_targets(base_mask_, archive_, pc_, classification_, rng_);
            population = select(std::move(merged), active_positions(active_mask));
            ++iterations_;
        }

        result.status = RunStatus::Completed;
        result.suite = archive_.suite();
        result.stats.evaluations = evaluations_;
        result.stats.iterations = iterations_;
        result.stats.filtered_targets = static_cast<int>(filtered_.size());
        int covered = 0;
        for (TargetId u : filtered_)
            covered += covered_any_[static_cast<std::size_t>(u)] != 0;
        result.stats.covered_filtered = covered;
        for (TargetId key : archive_.keys()) result.stats.archive_sizes[key] = archive_.count(key);
        return result;
    }

  private:
    // --- evaluation -----------------------------------------------------

    Individual evaluate(TestCase test) {
        Individual ind;
        const auto eval =
            fitness::evaluate_test(program_, test.entry, test.args, filtered_, pc_, params_.limits);
        ind.test = std::move(test);
        ind.fitness = eval.fitness;
        ind.covered.resize(filtered_.size());
        for (std::size_t i = 0; i < filtered_.size(); ++i)
            ind.covered[i] = eval.covered_mask[static_cast<std::size_t>(filtered_[i])];
        ++evaluations_;
        return ind;
    }

    /// Archive every covering test, widen the covered set, and admit newly
    /// unlocked targets into the base set.
    void absorb(const std::vector<Individual>& batch) {
        for (const auto& ind : batch) {
            for (std::size_t i = 0; i < filtered_.size(); ++i) {
                if (!ind.covered[i]) continue;
                const TargetId u = filtered_[i];
                archive_.insert(u, ind.test, params_.archive_cap);
                covered_any_[static_cast<std::size_t>(u)] = 1;
            }
        }
        detail::update_base_targets(base_mask_, covered_any_, filtered_, pc_);
    }

    // --- genome sampling and variation -----------------------------------

    TestCase random_test() {
        TestCase t;
        t.origin = Origin::Random;
        t.entry = static_cast<int>(rng_.uniform_int(0, program_.function_count() - 1));
        resample_args(t);
        return t;
    }

    void resample_args(TestCase& t) {
        const auto& params = program_.functions[static_cast<std::size_t>(t.entry)].params;
        t.args.clear();
        t.args.reserve(params.size());
        for (const auto& p : params) t.args.push_back(faults::sample_arg(p.type, rng_));
    }

    const Individual& tournament(const std::vector<Individual>& population) {
        const Individual* best = nullptr;
        for (int i = 0; i < params_.tournament; ++i) {
            const auto& candidate = population[static_cast<std::size_t>(
                rng_.uniform_int(0, static_cast<std::int64_t>(population.size()) - 1))];
            if (!best || candidate.rank < best->rank ||
                (candidate.rank == best->rank && candidate.crowding > best->crowding))
                best = &candidate;
        }
        return *best;
    }

    std::vector<Individual> generate_offspring(const std::vector<Individual>& population,
                                               int count) {
        std::vector<Individual> out;
        out.reserve(static_cast<std::size_t>(count));
        while (static_cast<int>(out.size()) < count) {
            TestCase a = tournament(population).test;
            TestCase b = tournament(population).test;
            if (rng_.coin(params_.crossover_rate) && a.entry == b.entry && !a.args.empty()) {
                // Single-point crossover over the argument vector.
                const auto cut = static_cast<std::size_t>(
                    rng_.uniform_int(0, static_cast<std::int64_t>(a.args.size())));
                for (std::size_t i = cut; i < a.args.size(); ++i) std::swap(a.args[i], b.args[i]);
                a.origin = Origin::Crossover;
                b.origin = Origin::Crossover;
            }
            mutate(a);
            out.push_back(evaluate(std::move(a)));
            if (static_cast<int>(out.size()) < count) {
                mutate(b);
                out.push_back(evaluate(std::move(b)));
            }
        }
        return out;
    }

    void mutate(TestCase& t) {
        if (rng_.coin(params_.entry_reassign_rate)) {
            t.entry = static_cast<int>(rng_.uniform_int(0, program_.function_count() - 1));
            resample_args(t);
            t.origin = Origin::Mutation;
            return;
        }
        const double rate = 1.0 / (static_cast<double>(t.args.size()) + 1.0);
        bool changed = false;
        for (auto& arg : t.args) {
            if (!rng_.coin(rate)) continue;
            changed = true;
            if (arg.type == Type::Bool) {
                arg.raw = arg.raw ? 0 : 1;
            } else {
                const auto step =
                    static_cast<std::int64_t>(std::llround(rng_.gaussian() * params_.gaussian_sigma));
                arg.raw = std::clamp<std::int64_t>(arg.raw + step, faults::kArgMin, faults::kArgMax);
            }
        }
        if (changed) t.origin = Origin::Mutation;
    }

    // --- selection --------------------------------------------------------

    std::vector<int> active_positions(const std::vector<std::uint8_t>& active_mask) const {
        std::vector<int> positions;
        for (TargetId u : filtered_)
            if (active_mask[static_cast<std::size_t>(u)])
                positions.push_back(position_[static_cast<std::size_t>(u)]);
        if (positions.empty()) {
            // Fall back to the base set; it always holds the entries.
            for (TargetId u : filtered_)
                if (base_mask_[static_cast<std::size_t>(u)])
                    positions.push_back(position_[static_cast<std::size_t>(u)]);
        }
        return positions;
    }

    std::vector<Individual> select(std::vector<Individual> pool,
                                   const std::vector<int>& objectives) {
        std::vector<detail::PoolView> views;
        views.reserve(pool.size());
        for (const auto& ind : pool) views.push_back({&ind.fitness, ind.test.args.size()});
        const auto selection = detail::select_population(views, objectives, params_.population);
        std::vector<Individual> selected;
        selected.reserve(selection.picked.size());
        for (std::size_t i = 0; i < selection.picked.size(); ++i) {
            Individual ind = std::move(pool[static_cast<std::size_t>(selection.picked[i])]);
            ind.rank = selection.rank[i];
            ind.crowding = selection.crowding[i];
            selected.push_back(std::move(ind));
        }
        return selected;
    }

    const Program& program_;
    const ProgramCdg& pc_;
    const std::vector<std::uint8_t>& classification_;
    std::int64_t budget_;
    Rng rng_;
    SearchParams params_;

    std::vector<TargetId> filtered_;
    std::vector<int> position_;            // target id -> index in filtered_, -1 outside
    std::vector<std::uint8_t> base_mask_;  // U*_base by target id
    std::vector<std::uint8_t> covered_any_;
    Archive archive_;
    std::int64_t evaluations_ = 0;
    int iterations_ = 0;
};

} // namespace

SearchResult run_search(const Program& program, const ProgramCdg& pc,
                        const std::vector<std::uint8_t>& classification, std::int64_t budget,
                        std::uint64_t seed, const SearchParams& params) {
    if (budget <= 0) throw Error(ErrorCode::ConfigError, "budget must be positive");
    Engine engine(program, pc, classification, budget, seed, params);
    return engine.run();
}

} // namespace sbstlab::search

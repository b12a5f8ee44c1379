#include "sbstlab/rng.hpp"

namespace sbstlab {

std::uint64_t derive_seed(std::uint64_t master, std::string_view salt,
                          std::initializer_list<std::uint64_t> indices) {
    // FNV-1a over the salt, folded into a splitmix chain with the indices.
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : salt) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    std::uint64_t s = master ^ h;
    splitmix64(s);
    for (std::uint64_t idx : indices) {
        s ^= idx + 0x9e3779b97f4a7c15ULL;
        splitmix64(s);
    }
    return splitmix64(s);
}

std::vector<std::size_t> Rng::sample_without_replacement(std::size_t universe, std::size_t count) {
    std::vector<std::size_t> pool(universe);
    for (std::size_t i = 0; i < universe; ++i) pool[i] = i;
    if (count > universe) count = universe;
    for (std::size_t i = 0; i < count; ++i) {
        const auto j = static_cast<std::size_t>(
            uniform_int(static_cast<std::int64_t>(i), static_cast<std::int64_t>(universe) - 1));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(count);
    return pool;
}

} // namespace sbstlab

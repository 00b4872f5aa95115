#include "copulasim/pairs.hpp"

#include <stdexcept>

#include "copulasim/rng.hpp"

namespace copulasim {

PairSample sample_pairs(const std::vector<Deal>& deals, int u, int v, int K,
                        std::uint64_t seed) {
    if (u < 0 || u >= kNumAttributes || v < 0 || v >= kNumAttributes)
        throw std::domain_error("sample_pairs: attribute index out of range");
    if (K < 1) throw std::domain_error("sample_pairs: K must be positive");

    std::vector<std::uint32_t> mu, mv;
    std::int64_t both = 0;
    for (std::size_t i = 0; i < deals.size(); ++i) {
        AttributeVector e = encode(deals[i]);
        bool hu = e.bit(u), hv = e.bit(v);
        if (hu) mu.push_back(static_cast<std::uint32_t>(i));
        if (hv) mv.push_back(static_cast<std::uint32_t>(i));
        if (hu && hv) ++both;
    }
    PairSample s;
    s.u = u;
    s.v = v;
    s.eligible = static_cast<std::int64_t>(mu.size()) * static_cast<std::int64_t>(mv.size()) - both;
    if (s.eligible <= 0) throw empty_cell_error(u, v);

    std::uint64_t key = static_cast<std::uint64_t>(u) * kNumAttributes + static_cast<std::uint64_t>(v);
    std::uint64_t ctr = 0;
    s.pairs.reserve(static_cast<std::size_t>(K));
    while (s.pairs.size() < static_cast<std::size_t>(K)) {
        std::uint32_t i = mu[rng_below(seed, Stream::PairSampling, key, ctr++, mu.size())];
        std::uint32_t j = mv[rng_below(seed, Stream::PairSampling, key, ctr++, mv.size())];
        if (i == j) continue;  // rejection keeps the eligible-set distribution uniform
        s.pairs.emplace_back(i, j);
    }
    return s;
}

}  // namespace copulasim

#pragma once

// Synthetic reply networks for the ingestion tests.

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "mlutd/ingestion.hpp"
#include "mlutd/random.hpp"

namespace synthetic {

/// `periods` edge lists over a pool of `users`. Each user has a persistent
/// heavy-tailed activity level; in every period a random subset is active and
/// replies are drawn between active users proportionally to activity.
inline std::vector<mlutd::DirectedEdgeList> reply_periods(std::size_t periods, std::size_t users,
                                                          std::size_t replies, std::uint64_t seed) {
    mlutd::Rng rng(seed);
    std::vector<double> activity(users);
    for (auto& a : activity) a = std::pow(rng.uniform_open(), -1.0 / 1.5);
    std::vector<mlutd::DirectedEdgeList> out;
    for (std::size_t p = 0; p < periods; ++p) {
        mlutd::DirectedEdgeList list;
        list.label = "m" + std::to_string(p + 1);
        std::vector<std::size_t> active;
        std::vector<double> cumulative;
        double total = 0.0;
        for (std::size_t u = 0; u < users; ++u) {
            if (rng.uniform() < 0.8) {
                active.push_back(u);
                total += activity[u] * (0.5 + rng.uniform());
                cumulative.push_back(total);
            }
        }
        auto pick = [&] {
            const double x = rng.uniform() * total;
            std::size_t lo = 0, hi = cumulative.size() - 1;
            while (lo < hi) {
                const std::size_t mid = (lo + hi) / 2;
                if (cumulative[mid] > x) hi = mid;
                else lo = mid + 1;
            }
            return active[lo];
        };
        for (std::size_t r = 0; r < replies; ++r)
            list.edges.push_back({"u" + std::to_string(pick()), "u" + std::to_string(pick())});
        out.push_back(std::move(list));
    }
    return out;
}

}  // namespace synthetic

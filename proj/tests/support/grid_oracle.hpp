#pragma once

// Exact minimum of a two-label energy on a small grid by dynamic programming
// over row labelings (transfer matrix), used to check alpha-expansion.

#include <limits>
#include <vector>

#include "camo/mrf.hpp"
#include "camo/random.hpp"

namespace oracle {

inline camo::LabelingProblem random_grid_problem(uint64_t seed, int side = 8, double smoothness = 0.7) {
    camo::Rng rng(seed);
    camo::LabelingProblem pb;
    pb.n_nodes = side * side;
    pb.n_labels = 2;
    pb.smoothness = smoothness;
    for (int p = 0; p < pb.n_nodes; ++p)
        for (int l = 0; l < 2; ++l) {
            pb.unary.push_back(camo::uniform(rng, 0.0, 3.0));
            pb.features.push_back(camo::Rgb(camo::uniform01(rng), camo::uniform01(rng), camo::uniform01(rng)));
        }
    for (int y = 0; y < side; ++y)
        for (int x = 0; x < side; ++x) {
            if (x + 1 < side) pb.edges.emplace_back(y * side + x, y * side + x + 1);
            if (y + 1 < side) pb.edges.emplace_back(y * side + x, (y + 1) * side + x);
        }
    return pb;
}

inline double grid_optimum(const camo::LabelingProblem& pb, int side) {
    const int states = 1 << side;
    const auto label = [](int state, int x) { return (state >> x) & 1; };
    std::vector<double> best(states, 0.0);
    for (int y = 0; y < side; ++y) {
        std::vector<double> row_cost(states, 0.0);
        for (int s = 0; s < states; ++s) {
            double c = 0.0;
            for (int x = 0; x < side; ++x) {
                const int p = y * side + x;
                c += pb.unary_at(p, label(s, x));
                if (x + 1 < side) c += pb.pairwise(p, p + 1, label(s, x), label(s, x + 1));
            }
            row_cost[s] = c;
        }
        std::vector<double> next(states, std::numeric_limits<double>::infinity());
        for (int s = 0; s < states; ++s) {
            if (y == 0) {
                next[s] = row_cost[s];
                continue;
            }
            for (int r = 0; r < states; ++r) {
                double c = best[r] + row_cost[s];
                for (int x = 0; x < side; ++x) {
                    const int p = (y - 1) * side + x;
                    c += pb.pairwise(p, p + side, label(r, x), label(s, x));
                }
                if (c < next[s]) next[s] = c;
            }
        }
        best = next;
    }
    double m = std::numeric_limits<double>::infinity();
    for (double v : best) m = std::min(m, v);
    return m;
}

}  // namespace oracle

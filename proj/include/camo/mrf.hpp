#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "camo/image.hpp"

namespace camo {

/// Multi-label energy over a graph:
///   E(l) = sum_p unary(p, l_p) + sum_(p,q) V_pq(l_p, l_q)
/// with the seam cost
///   V_pq(a, b) = smoothness * (|f_p(a) - f_p(b)|_1 + |f_q(a) - f_q(b)|_1),
/// where f_p(l) is the color label l would give node p. V is a metric in the
/// labels, so expansion moves are graph-representable.
struct LabelingProblem {
    int n_nodes = 0;
    int n_labels = 0;
    std::vector<double> unary;  // [p * n_labels + l]
    std::vector<std::pair<int, int>> edges;
    std::vector<Rgb> features;  // [p * n_labels + l]
    double smoothness = 1.0;

    double unary_at(int p, int l) const { return unary[static_cast<size_t>(p) * n_labels + l]; }
    const Rgb& feature(int p, int l) const { return features[static_cast<size_t>(p) * n_labels + l]; }
    double pairwise(int p, int q, int a, int b) const;
    double energy(const std::vector<int>& labels) const;
};

struct ExpansionResult {
    std::vector<int> labels;
    double energy = 0.0;
    std::vector<double> sweep_energies;  // energy before the first sweep, then after each
    int sweeps = 0;
};

/// Alpha-expansion: each sweep tries every label as the expansion label and
/// solves the binary move with a min cut; moves are accepted only when they
/// lower the energy. Stops after the first sweep without improvement.
ExpansionResult alpha_expansion(const LabelingProblem& problem, std::vector<int> initial, int max_sweeps = 100);

/// Per-node label of least unary cost, ties to the lowest label.
std::vector<int> unary_argmin(const LabelingProblem& problem);

}  // namespace camo

#include "camo/mrf.hpp"

#include <algorithm>
#include <cmath>

#include <boost/graph/adjacency_list.hpp>
#include <boost/graph/boykov_kolmogorov_max_flow.hpp>

#include "camo/errors.hpp"

namespace camo {

namespace {

using Traits = boost::adjacency_list_traits<boost::vecS, boost::vecS, boost::directedS>;
using Graph = boost::adjacency_list<
    boost::vecS, boost::vecS, boost::directedS,
    boost::property<boost::vertex_index_t, long,
                    boost::property<boost::vertex_color_t, boost::default_color_type,
                                    boost::property<boost::vertex_distance_t, long,
                                                    boost::property<boost::vertex_predecessor_t,
                                                                    Traits::edge_descriptor>>>>,
    boost::property<boost::edge_capacity_t, double,
                    boost::property<boost::edge_residual_capacity_t, double,
                                    boost::property<boost::edge_reverse_t, Traits::edge_descriptor>>>>;

double l1(const Rgb& a, const Rgb& b) {
    return std::abs(static_cast<double>(a.x()) - b.x()) + std::abs(static_cast<double>(a.y()) - b.y()) +
           std::abs(static_cast<double>(a.z()) - b.z());
}

class CutBuilder {
public:
    explicit CutBuilder(int n) : graph_(n + 2), source_(n), sink_(n + 1) {
        capacity_ = boost::get(boost::edge_capacity, graph_);
        reverse_ = boost::get(boost::edge_reverse, graph_);
    }

    // Directed capacity `forward` from u to v and `backward` from v to u.
    void add_pair(int u, int v, double forward, double backward) {
        const auto e = boost::add_edge(u, v, graph_).first;
        const auto r = boost::add_edge(v, u, graph_).first;
        capacity_[e] = forward;
        capacity_[r] = backward;
        reverse_[e] = r;
        reverse_[r] = e;
    }

    void add_terminals(int p, double cost0, double cost1) {
        const double m = std::min(cost0, cost1);
        if (cost1 - m > 0.0) add_pair(source_, p, cost1 - m, 0.0);
        if (cost0 - m > 0.0) add_pair(p, sink_, cost0 - m, 0.0);
    }

    void solve() { boost::boykov_kolmogorov_max_flow(graph_, source_, sink_); }

    // Nodes outside the source tree take the expansion label.
    bool switches(int p) const {
        return boost::get(boost::vertex_color, graph_, p) != boost::color_traits<boost::default_color_type>::black();
    }

private:
    Graph graph_;
    int source_;
    int sink_;
    boost::property_map<Graph, boost::edge_capacity_t>::type capacity_;
    boost::property_map<Graph, boost::edge_reverse_t>::type reverse_;
};

// Best expansion move towards `alpha` from `labels`.
std::vector<int> expansion_move(const LabelingProblem& pb, const std::vector<int>& labels, int alpha) {
    std::vector<int> var(pb.n_nodes, -1);
    int n_var = 0;
    for (int p = 0; p < pb.n_nodes; ++p)
        if (labels[p] != alpha) var[p] = n_var++;
    if (n_var == 0) return labels;
    std::vector<double> cost0(n_var, 0.0), cost1(n_var, 0.0);
    for (int p = 0; p < pb.n_nodes; ++p) {
        if (var[p] < 0) continue;
        cost0[var[p]] += pb.unary_at(p, labels[p]);
        cost1[var[p]] += pb.unary_at(p, alpha);
    }
    struct PairTerm {
        int p, q;
        double w;
    };
    std::vector<PairTerm> pairs;
    for (const auto& [p, q] : pb.edges) {
        const int vp = var[p], vq = var[q];
        if (vp < 0 && vq < 0) continue;
        if (vp < 0) {
            cost0[vq] += pb.pairwise(p, q, alpha, labels[q]);
            continue;
        }
        if (vq < 0) {
            cost0[vp] += pb.pairwise(p, q, labels[p], alpha);
            continue;
        }
        const double A = pb.pairwise(p, q, labels[p], labels[q]);
        const double B = pb.pairwise(p, q, labels[p], alpha);
        const double C = pb.pairwise(p, q, alpha, labels[q]);
        // E = A + (C - A) y_p + (0 - C) y_q + (B + C - A) (1 - y_p) y_q
        const double cp = C - A, cq = -C;
        if (cp > 0.0) cost1[vp] += cp; else cost0[vp] -= cp;
        if (cq > 0.0) cost1[vq] += cq; else cost0[vq] -= cq;
        pairs.push_back({vp, vq, std::max(0.0, B + C - A)});
    }
    CutBuilder cut(n_var);
    for (int v = 0; v < n_var; ++v) cut.add_terminals(v, cost0[v], cost1[v]);
    for (const auto& t : pairs)
        if (t.w > 0.0) cut.add_pair(t.p, t.q, t.w, 0.0);
    cut.solve();
    std::vector<int> out = labels;
    for (int p = 0; p < pb.n_nodes; ++p)
        if (var[p] >= 0 && cut.switches(var[p])) out[p] = alpha;
    return out;
}

}  // namespace

double LabelingProblem::pairwise(int p, int q, int a, int b) const {
    if (a == b) return 0.0;
    return smoothness * (l1(feature(p, a), feature(p, b)) + l1(feature(q, a), feature(q, b)));
}

double LabelingProblem::energy(const std::vector<int>& labels) const {
    double e = 0.0;
    for (int p = 0; p < n_nodes; ++p) e += unary_at(p, labels[p]);
    for (const auto& [p, q] : edges) e += pairwise(p, q, labels[p], labels[q]);
    return e;
}

std::vector<int> unary_argmin(const LabelingProblem& problem) {
    std::vector<int> labels(problem.n_nodes, 0);
    for (int p = 0; p < problem.n_nodes; ++p)
        for (int l = 1; l < problem.n_labels; ++l)
            if (problem.unary_at(p, l) < problem.unary_at(p, labels[p])) labels[p] = l;
    return labels;
}

ExpansionResult alpha_expansion(const LabelingProblem& problem, std::vector<int> initial, int max_sweeps) {
    if (problem.n_labels < 1) throw ContractError("labeling problem without labels");
    if (static_cast<int>(initial.size()) != problem.n_nodes)
        throw ContractError("initial labeling has the wrong size");
    ExpansionResult r;
    r.labels = std::move(initial);
    r.energy = problem.energy(r.labels);
    r.sweep_energies.push_back(r.energy);
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        bool improved = false;
        for (int alpha = 0; alpha < problem.n_labels; ++alpha) {
            std::vector<int> candidate = expansion_move(problem, r.labels, alpha);
            const double e = problem.energy(candidate);
            if (e < r.energy - 1e-12 * std::max(1.0, std::abs(r.energy))) {
                r.labels = std::move(candidate);
                r.energy = e;
                improved = true;
            }
        }
        ++r.sweeps;
        r.sweep_energies.push_back(r.energy);
        if (!improved) break;
    }
    return r;
}

}  // namespace camo

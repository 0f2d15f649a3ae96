#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "memesim/error.hpp"
#include "memesim/random.hpp"

namespace memesim {

using NodeId = std::uint32_t;

/// Static undirected simple graph in compressed (CSR) adjacency form.
/// Neighbor lists are sorted; immutable after construction.
class Graph {
public:
    Graph() = default;

    /// Builds from an undirected edge list. Self-loops are rejected and
    /// duplicate edges collapsed.
    Graph(std::size_t node_count, std::span<const std::pair<NodeId, NodeId>> edges)
        : offsets_(node_count + 1, 0)
    {
        for (auto [a, b] : edges) {
            if (a >= node_count || b >= node_count)
                throw InputError("edge endpoint out of range");
            if (a == b)
                throw InputError("self-loop on node " + std::to_string(a));
        }
        std::vector<std::vector<NodeId>> adj(node_count);
        for (auto [a, b] : edges) {
            adj[a].push_back(b);
            adj[b].push_back(a);
        }
        for (std::size_t i = 0; i < node_count; ++i) {
            auto& list = adj[i];
            std::sort(list.begin(), list.end());
            list.erase(std::unique(list.begin(), list.end()), list.end());
            offsets_[i + 1] = offsets_[i] + list.size();
        }
        neighbors_.reserve(offsets_.back());
        for (auto& list : adj)
            neighbors_.insert(neighbors_.end(), list.begin(), list.end());
    }

    std::size_t node_count() const noexcept { return offsets_.empty() ? 0 : offsets_.size() - 1; }
    std::size_t edge_count() const noexcept { return neighbors_.size() / 2; }

    std::span<const NodeId> neighbors(NodeId i) const noexcept
    {
        return {neighbors_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
    }

    std::size_t degree(NodeId i) const noexcept { return offsets_[i + 1] - offsets_[i]; }

    double mean_degree() const noexcept
    {
        return node_count() == 0 ? 0.0 : static_cast<double>(neighbors_.size()) / node_count();
    }

    bool has_edge(NodeId a, NodeId b) const noexcept
    {
        auto nb = neighbors(a);
        return std::binary_search(nb.begin(), nb.end(), b);
    }

    /// Each undirected edge once, as (i, j) with i < j.
    std::vector<std::pair<NodeId, NodeId>> edges() const
    {
        std::vector<std::pair<NodeId, NodeId>> out;
        out.reserve(edge_count());
        for (NodeId i = 0; i < node_count(); ++i)
            for (NodeId j : neighbors(i))
                if (i < j)
                    out.emplace_back(i, j);
        return out;
    }

private:
    std::vector<std::size_t> offsets_;
    std::vector<NodeId> neighbors_;
};

enum class Generator { BarabasiAlbert, HolmeKim };

struct NetSpec {
    Generator generator = Generator::BarabasiAlbert;
    std::size_t n = 1000;
    std::size_t m = 10;
    double triad_prob = 0.0;
    std::uint64_t seed = 1;

    void validate() const
    {
        if (m < 1 || m >= n)
            throw ConfigError("network spec requires 1 <= m < n (m=" + std::to_string(m) +
                              ", n=" + std::to_string(n) + ")");
        if (!(triad_prob >= 0.0 && triad_prob <= 1.0))
            throw ConfigError("triad_prob must lie in [0, 1]");
    }

    bool operator==(const NetSpec&) const = default;
};

inline std::string_view to_string(Generator g)
{
    return g == Generator::BarabasiAlbert ? "ba" : "hk";
}

inline Generator parse_generator(std::string_view s)
{
    if (s == "ba" || s == "BarabasiAlbert")
        return Generator::BarabasiAlbert;
    if (s == "hk" || s == "HolmeKim")
        return Generator::HolmeKim;
    throw ConfigError("unknown generator '" + std::string(s) + "' (expected ba or hk)");
}

/// Preferential-attachment network seeded with an m-clique. Every new node
/// links to m distinct existing nodes drawn proportionally to degree. With
/// the Holme-Kim generator each attachment after the first is, with
/// probability triad_prob, replaced by a triad-closure link to a random
/// neighbor of the previous preferential target.
inline Graph generate(const NetSpec& spec)
{
    spec.validate();
    Rng rng(spec.seed);
    const std::size_t n = spec.n, m = spec.m;

    std::vector<std::pair<NodeId, NodeId>> edges;
    edges.reserve(m * (n - m) + m * (m - 1) / 2);
    std::vector<std::vector<NodeId>> adj(n);
    // Each edge endpoint appears once here, so a uniform pick is degree-proportional.
    std::vector<NodeId> endpoints;
    endpoints.reserve(2 * edges.capacity());

    auto link = [&](NodeId a, NodeId b) {
        edges.emplace_back(a, b);
        adj[a].push_back(b);
        adj[b].push_back(a);
        endpoints.push_back(a);
        endpoints.push_back(b);
    };

    for (NodeId i = 0; i < m; ++i)
        for (NodeId j = i + 1; j < m; ++j)
            link(i, j);

    std::vector<NodeId> targets;
    std::vector<char> chosen(n, 0);
    for (NodeId v = static_cast<NodeId>(m); v < n; ++v) {
        targets.clear();
        auto preferential = [&]() -> NodeId {
            for (;;) {
                NodeId t = endpoints.empty() ? static_cast<NodeId>(uniform_index(rng, v))
                                             : endpoints[uniform_index(rng, endpoints.size())];
                if (!chosen[t])
                    return t;
            }
        };
        NodeId last_pa = preferential();
        targets.push_back(last_pa);
        chosen[last_pa] = 1;
        while (targets.size() < m) {
            NodeId t = 0;
            bool closed = false;
            if (spec.generator == Generator::HolmeKim && bernoulli(rng, spec.triad_prob)) {
                std::vector<NodeId> open;
                for (NodeId w : adj[last_pa])
                    if (!chosen[w])
                        open.push_back(w);
                if (!open.empty()) {
                    t = open[uniform_index(rng, open.size())];
                    closed = true;
                }
            }
            if (!closed) {
                t = preferential();
                last_pa = t;
            }
            targets.push_back(t);
            chosen[t] = 1;
        }
        for (NodeId t : targets) {
            chosen[t] = 0;
            link(v, t);
        }
    }
    return Graph(n, edges);
}

/// Mean of local clustering coefficients; nodes with degree < 2 count as 0.
inline double clustering_coefficient(const Graph& g)
{
    const std::size_t n = g.node_count();
    if (n == 0)
        return 0.0;
    std::vector<char> mark(n, 0);
    double total = 0.0;
    for (NodeId i = 0; i < n; ++i) {
        auto nb = g.neighbors(i);
        const std::size_t k = nb.size();
        if (k < 2)
            continue;
        for (NodeId j : nb)
            mark[j] = 1;
        std::size_t links = 0;
        for (NodeId j : nb)
            for (NodeId w : g.neighbors(j))
                links += mark[w];
        for (NodeId j : nb)
            mark[j] = 0;
        // every triangle edge counted twice
        total += static_cast<double>(links) / static_cast<double>(k * (k - 1));
    }
    return total / static_cast<double>(n);
}

inline void write_edge_list(std::ostream& os, const Graph& g)
{
    for (auto [a, b] : g.edges())
        os << a << ' ' << b << '\n';
}

/// Reads `i j` pairs. Node count is max id + 1 unless `node_count` is larger.
inline Graph read_edge_list(std::istream& is, std::size_t node_count = 0)
{
    std::vector<std::pair<NodeId, NodeId>> edges;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#')
            continue;
        std::istringstream ls(line);
        long long a = -1, b = -1;
        if (!(ls >> a >> b) || a < 0 || b < 0)
            throw InputError("edge list line " + std::to_string(lineno) + ": expected two node ids");
        edges.emplace_back(static_cast<NodeId>(a), static_cast<NodeId>(b));
        node_count = std::max<std::size_t>(node_count, static_cast<std::size_t>(std::max(a, b)) + 1);
    }
    return Graph(node_count, edges);
}

} // namespace memesim

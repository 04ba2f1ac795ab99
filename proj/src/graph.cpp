#include "bivirus/graph.hpp"

#include <algorithm>
#include <fstream>
#include <queue>
#include <sstream>
#include <unordered_map>

namespace bivirus {

namespace {

std::vector<std::string> default_labels(std::size_t n) {
    std::vector<std::string> labels;
    labels.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        labels.push_back(std::to_string(i));
    }
    return labels;
}

// Returns the first node not reached by BFS from node 0, or n if all are reached.
std::size_t first_unreachable(std::size_t n, const std::vector<Edge>& edges) {
    std::vector<std::vector<std::size_t>> adj(n);
    for (const auto& [u, v] : edges) {
        adj[u].push_back(v);
        adj[v].push_back(u);
    }
    std::vector<bool> seen(n, false);
    std::queue<std::size_t> frontier;
    seen[0] = true;
    frontier.push(0);
    while (!frontier.empty()) {
        const auto u = frontier.front();
        frontier.pop();
        for (auto v : adj[u]) {
            if (!seen[v]) {
                seen[v] = true;
                frontier.push(v);
            }
        }
    }
    const auto it = std::find(seen.begin(), seen.end(), false);
    return static_cast<std::size_t>(it - seen.begin());
}

}  // namespace

Graph::Graph(std::size_t n, std::vector<Edge> edges, std::vector<std::string> labels)
    : n_(n), labels_(std::move(labels)) {
    if (n_ == 0) {
        throw GraphError("graph must have at least one node");
    }
    if (labels_.empty()) {
        labels_ = default_labels(n_);
    } else if (labels_.size() != n_) {
        throw GraphError("label count does not match node count");
    }

    for (auto& [u, v] : edges) {
        if (u >= n_ || v >= n_) {
            throw GraphError("edge (" + std::to_string(u) + ", " + std::to_string(v) +
                             ") references a node outside 0.." + std::to_string(n_ - 1));
        }
        if (u == v) {
            throw GraphError("self-loop on node '" + labels_[u] + "'");
        }
        if (u > v) {
            std::swap(u, v);
        }
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    edges_ = std::move(edges);

    if (const auto lost = first_unreachable(n_, edges_); lost != n_) {
        throw GraphError("graph is disconnected: nodes '" + labels_[0] + "' and '" +
                         labels_[lost] + "' are not connected");
    }

    adjacency_ = Matrix::Zero(static_cast<Eigen::Index>(n_), static_cast<Eigen::Index>(n_));
    for (const auto& [u, v] : edges_) {
        const auto i = static_cast<Eigen::Index>(u);
        const auto j = static_cast<Eigen::Index>(v);
        adjacency_(i, j) = 1.0;
        adjacency_(j, i) = 1.0;
    }
}

Graph load_edge_list(std::istream& in) {
    std::unordered_map<std::string, std::size_t> index;
    std::vector<std::string> labels;
    std::vector<Edge> edges;

    auto intern = [&](const std::string& label) {
        auto [it, inserted] = index.try_emplace(label, labels.size());
        if (inserted) {
            labels.push_back(label);
        }
        return it->second;
    };

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        const auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos || line[first] == '#') {
            continue;
        }
        std::istringstream fields(line);
        std::string a, b, extra;
        if (!(fields >> a >> b)) {
            throw GraphError("line " + std::to_string(line_no) + ": expected two node labels");
        }
        if (fields >> extra) {
            throw GraphError("line " + std::to_string(line_no) +
                             ": unexpected third field '" + extra + "'");
        }
        if (a == b) {
            throw GraphError("line " + std::to_string(line_no) + ": self-loop on node '" + a + "'");
        }
        const auto u = intern(a);
        const auto v = intern(b);
        edges.emplace_back(u, v);
    }

    if (labels.empty()) {
        throw GraphError("edge list is empty");
    }
    const auto n = labels.size();
    return Graph(n, std::move(edges), std::move(labels));
}

Graph load_edge_list(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw GraphError("cannot open edge list '" + path.string() + "'");
    }
    return load_edge_list(in);
}

void write_edge_list(const Graph& g, std::ostream& out) {
    for (const auto& [u, v] : g.edges()) {
        out << g.labels()[u] << ' ' << g.labels()[v] << '\n';
    }
}

DegreeRange degrees(const Graph& g) {
    std::vector<std::size_t> deg(g.size(), 0);
    for (const auto& [u, v] : g.edges()) {
        ++deg[u];
        ++deg[v];
    }
    const auto [lo, hi] = std::minmax_element(deg.begin(), deg.end());
    return {*lo, *hi};
}

namespace generators {

Graph complete(std::size_t n) {
    std::vector<Edge> edges;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            edges.emplace_back(i, j);
        }
    }
    return Graph(n, std::move(edges));
}

Graph star(std::size_t leaves) {
    std::vector<Edge> edges;
    for (std::size_t i = 1; i <= leaves; ++i) {
        edges.emplace_back(0, i);
    }
    return Graph(leaves + 1, std::move(edges));
}

Graph cycle(std::size_t n) {
    if (n < 3) {
        throw GraphError("cycle needs at least 3 nodes");
    }
    std::vector<Edge> edges;
    for (std::size_t i = 0; i < n; ++i) {
        edges.emplace_back(i, (i + 1) % n);
    }
    return Graph(n, std::move(edges));
}

Graph path(std::size_t n) {
    std::vector<Edge> edges;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        edges.emplace_back(i, i + 1);
    }
    return Graph(n, std::move(edges));
}

Graph wheel(std::size_t n) {
    if (n < 4) {
        throw GraphError("wheel needs at least 4 nodes");
    }
    const auto rim = n - 1;
    std::vector<Edge> edges;
    for (std::size_t i = 0; i < rim; ++i) {
        edges.emplace_back(i, (i + 1) % rim);
        edges.emplace_back(i, rim);
    }
    return Graph(n, std::move(edges));
}

}  // namespace generators

}  // namespace bivirus

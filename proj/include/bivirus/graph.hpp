#pragma once

#include "bivirus/types.hpp"

#include <cstddef>
#include <filesystem>
#include <istream>
#include <string>
#include <utility>
#include <vector>

namespace bivirus {

using Edge = std::pair<std::size_t, std::size_t>;

/// Undirected, connected, simple graph on nodes 0..n-1.
///
/// Construction validates the invariants (no self-loops, indices in range,
/// connectivity) and normalizes the edge set: every edge is stored once as
/// (min, max) and the list is sorted. The dense adjacency matrix is built
/// eagerly since every consumer works with it.
class Graph {
public:
    Graph(std::size_t n, std::vector<Edge> edges, std::vector<std::string> labels = {});

    std::size_t size() const { return n_; }
    std::size_t edge_count() const { return edges_.size(); }
    const std::vector<Edge>& edges() const { return edges_; }
    const Matrix& adjacency() const { return adjacency_; }

    /// Original node labels in first-seen order (or "0".."n-1" for generated graphs).
    const std::vector<std::string>& labels() const { return labels_; }

private:
    std::size_t n_;
    std::vector<Edge> edges_;
    std::vector<std::string> labels_;
    Matrix adjacency_;
};

struct DegreeRange {
    std::size_t min = 0;
    std::size_t max = 0;
};

/// Parses a whitespace-separated edge list. '#' starts a comment line, blank
/// lines are skipped, labels are mapped to dense indices in first-seen order.
Graph load_edge_list(std::istream& in);
Graph load_edge_list(const std::filesystem::path& path);

/// Writes the graph back as "label label" lines.
void write_edge_list(const Graph& g, std::ostream& out);

DegreeRange degrees(const Graph& g);

/// Small deterministic graphs used by tests and examples.
namespace generators {
Graph complete(std::size_t n);
Graph star(std::size_t leaves);
Graph cycle(std::size_t n);
Graph path(std::size_t n);
/// Hub (last index) joined to every node of an (n-1)-cycle.
Graph wheel(std::size_t n);
}  // namespace generators

}  // namespace bivirus

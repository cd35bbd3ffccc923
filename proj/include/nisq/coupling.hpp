#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace nisq {

/// Undirected, connected device connectivity with all-pairs hop distances.
class CouplingGraph {
  public:
    CouplingGraph(int n_nodes, std::vector<std::pair<int, int>> edges);

    static CouplingGraph line(int n);
    static CouplingGraph grid(int rows, int cols);
    static CouplingGraph complete(int n);

    int n_nodes() const { return n_; }
    const std::vector<std::pair<int, int>>& edges() const { return edges_; }
    int distance(int a, int b) const { return dist_[a * n_ + b]; }
    bool adjacent(int a, int b) const { return distance(a, b) == 1; }
    const std::vector<int>& neighbors(int a) const { return adj_[a]; }
    /// Index of edge {a,b} in edges(), or -1.
    int edge_index(int a, int b) const;

  private:
    int n_;
    std::vector<std::pair<int, int>> edges_;
    std::vector<std::vector<int>> adj_;
    std::vector<int> dist_;
};

/// "i j" per line; node count is max index + 1.
CouplingGraph parse_edge_list(std::string_view text);
CouplingGraph load_edge_list(const std::string& path);
std::vector<std::pair<int, int>> parse_edge_pairs(std::string_view text);

}  // namespace nisq

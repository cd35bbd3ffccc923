#include "nisq/coupling.hpp"

#include <algorithm>
#include <fstream>
#include <queue>
#include <sstream>

#include "nisq/common.hpp"

namespace nisq {

CouplingGraph::CouplingGraph(int n_nodes, std::vector<std::pair<int, int>> edges)
    : n_(n_nodes), adj_(n_nodes), dist_(static_cast<std::size_t>(n_nodes) * n_nodes, -1) {
    if (n_nodes < 1) throw InputError("coupling graph needs at least one node");
    for (auto [a, b] : edges) {
        if (a < 0 || b < 0 || a >= n_ || b >= n_ || a == b)
            throw InputError("invalid coupling edge " + std::to_string(a) + "-" + std::to_string(b));
        if (a > b) std::swap(a, b);
        if (std::find(edges_.begin(), edges_.end(), std::pair{a, b}) != edges_.end()) continue;
        edges_.emplace_back(a, b);
        adj_[a].push_back(b);
        adj_[b].push_back(a);
    }
    for (auto& nb : adj_) std::sort(nb.begin(), nb.end());
    for (int s = 0; s < n_; ++s) {
        std::queue<int> q;
        dist_[s * n_ + s] = 0;
        q.push(s);
        while (!q.empty()) {
            const int u = q.front();
            q.pop();
            for (int v : adj_[u]) {
                if (dist_[s * n_ + v] < 0) {
                    dist_[s * n_ + v] = dist_[s * n_ + u] + 1;
                    q.push(v);
                }
            }
        }
    }
    if (std::find(dist_.begin(), dist_.end(), -1) != dist_.end())
        throw InputError("coupling graph is not connected");
}

CouplingGraph CouplingGraph::line(int n) {
    std::vector<std::pair<int, int>> e;
    for (int i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
    return CouplingGraph(n, std::move(e));
}

CouplingGraph CouplingGraph::grid(int rows, int cols) {
    std::vector<std::pair<int, int>> e;
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) {
            const int q = r * cols + c;
            if (c + 1 < cols) e.emplace_back(q, q + 1);
            if (r + 1 < rows) e.emplace_back(q, q + cols);
        }
    return CouplingGraph(rows * cols, std::move(e));
}

CouplingGraph CouplingGraph::complete(int n) {
    std::vector<std::pair<int, int>> e;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) e.emplace_back(i, j);
    return CouplingGraph(n, std::move(e));
}

int CouplingGraph::edge_index(int a, int b) const {
    if (a > b) std::swap(a, b);
    auto it = std::find(edges_.begin(), edges_.end(), std::pair{a, b});
    return it == edges_.end() ? -1 : static_cast<int>(it - edges_.begin());
}

std::vector<std::pair<int, int>> parse_edge_pairs(std::string_view text) {
    std::vector<std::pair<int, int>> edges;
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto c = line.find_first_of("#"); c != std::string::npos) line.erase(c);
        if (auto c = line.find("//"); c != std::string::npos) line.erase(c);
        std::istringstream ls(line);
        int a, b;
        if (!(ls >> a)) continue;
        if (!(ls >> b)) throw ParseError("expected 'i j' edge", lineno, 1);
        edges.emplace_back(a, b);
    }
    return edges;
}

CouplingGraph parse_edge_list(std::string_view text) {
    auto edges = parse_edge_pairs(text);
    int n = 0;
    for (auto [a, b] : edges) n = std::max({n, a + 1, b + 1});
    return CouplingGraph(n, std::move(edges));
}

CouplingGraph load_edge_list(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open edge list '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_edge_list(ss.str());
}

}  // namespace nisq

#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "irrkit/corpus.hpp"

namespace irrkit {

// Unweighted directed graph over user ids. Nodes are sorted; neighbour lists
// are sorted and duplicate-free.
class DirectedGraph {
 public:
  DirectedGraph() = default;
  explicit DirectedGraph(std::vector<std::string> nodes);

  std::size_t size() const noexcept { return nodes_.size(); }
  std::size_t edge_count() const noexcept { return edges_; }
  const std::vector<std::string>& nodes() const noexcept { return nodes_; }
  std::optional<std::size_t> index_of(const std::string& node) const;

  // Idempotent; self-loops are ignored.
  void add_edge(std::size_t from, std::size_t to);
  void add_edge(const std::string& from, const std::string& to);
  bool has_edge(std::size_t from, std::size_t to) const;

  const std::vector<std::size_t>& out_neighbors(std::size_t v) const { return out_[v]; }
  const std::vector<std::size_t>& in_neighbors(std::size_t v) const { return in_[v]; }

  std::vector<std::pair<std::string, std::string>> edge_list() const;

 private:
  std::vector<std::string> nodes_;
  std::vector<std::vector<std::size_t>> out_;
  std::vector<std::vector<std::size_t>> in_;
  std::size_t edges_ = 0;
};

// Edge A -> B when A posted a responding reply in a thread started by B.
DirectedGraph build_post_reply_graph(const Corpus& corpus);

struct Degree {
  std::size_t in = 0;
  std::size_t out = 0;
};

std::vector<Degree> degrees(const DirectedGraph& graph);

// Brandes accumulation, directed, unnormalised.
std::vector<double> betweenness(const DirectedGraph& graph);

struct PageRankOptions {
  double damping = 0.85;
  double tolerance = 1e-9;  // L1 change between iterations
  int max_iter = 200;
};

// Power iteration with uniform teleport and uniform redistribution of
// dangling mass. Throws Error(Numeric) with the final residual when it does
// not converge.
std::vector<double> pagerank(const DirectedGraph& graph, const PageRankOptions& options = {});

void write_edge_list(std::ostream& out, const DirectedGraph& graph);
void write_centrality(std::ostream& out, const DirectedGraph& graph,
                      const std::vector<double>& values, const std::string& name);

}  // namespace irrkit

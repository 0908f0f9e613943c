#include "irrkit/graph.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "irrkit/io.hpp"

namespace irrkit {

DirectedGraph::DirectedGraph(std::vector<std::string> nodes) : nodes_(std::move(nodes)) {
  std::sort(nodes_.begin(), nodes_.end());
  nodes_.erase(std::unique(nodes_.begin(), nodes_.end()), nodes_.end());
  out_.resize(nodes_.size());
  in_.resize(nodes_.size());
}

std::optional<std::size_t> DirectedGraph::index_of(const std::string& node) const {
  auto it = std::lower_bound(nodes_.begin(), nodes_.end(), node);
  if (it == nodes_.end() || *it != node) return std::nullopt;
  return static_cast<std::size_t>(it - nodes_.begin());
}

void DirectedGraph::add_edge(std::size_t from, std::size_t to) {
  if (from >= nodes_.size() || to >= nodes_.size()) {
    throw Error(ErrorCode::InvalidArgument, "edge endpoint out of range");
  }
  if (from == to) return;
  auto& outs = out_[from];
  auto it = std::lower_bound(outs.begin(), outs.end(), to);
  if (it != outs.end() && *it == to) return;
  outs.insert(it, to);
  auto& ins = in_[to];
  ins.insert(std::lower_bound(ins.begin(), ins.end(), from), from);
  ++edges_;
}

void DirectedGraph::add_edge(const std::string& from, const std::string& to) {
  auto a = index_of(from);
  auto b = index_of(to);
  if (!a || !b) throw Error(ErrorCode::NotFound, "edge endpoint not a node: " + from + "->" + to);
  add_edge(*a, *b);
}

bool DirectedGraph::has_edge(std::size_t from, std::size_t to) const {
  return std::binary_search(out_[from].begin(), out_[from].end(), to);
}

std::vector<std::pair<std::string, std::string>> DirectedGraph::edge_list() const {
  std::vector<std::pair<std::string, std::string>> out;
  out.reserve(edges_);
  for (std::size_t v = 0; v < nodes_.size(); ++v) {
    for (std::size_t w : out_[v]) out.emplace_back(nodes_[v], nodes_[w]);
  }
  return out;
}

DirectedGraph build_post_reply_graph(const Corpus& corpus) {
  DirectedGraph g(corpus.users());
  for (const auto& thread : corpus.threads()) {
    const auto origin = *g.index_of(thread.originator());
    for (std::size_t i : thread.responding_replies()) {
      g.add_edge(*g.index_of(thread.posts()[i].user_id), origin);
    }
  }
  return g;
}

std::vector<Degree> degrees(const DirectedGraph& graph) {
  std::vector<Degree> out(graph.size());
  for (std::size_t v = 0; v < graph.size(); ++v) {
    out[v].in = graph.in_neighbors(v).size();
    out[v].out = graph.out_neighbors(v).size();
  }
  return out;
}

std::vector<double> betweenness(const DirectedGraph& graph) {
  const std::size_t n = graph.size();
  std::vector<double> centrality(n, 0.0);
  std::vector<std::size_t> stack, queue;
  std::vector<std::vector<std::size_t>> preds(n);
  std::vector<double> sigma(n), delta(n);
  std::vector<long> dist(n);
  stack.reserve(n);
  queue.reserve(n);

  for (std::size_t s = 0; s < n; ++s) {
    stack.clear();
    queue.clear();
    for (std::size_t v = 0; v < n; ++v) {
      preds[v].clear();
      sigma[v] = 0.0;
      delta[v] = 0.0;
      dist[v] = -1;
    }
    sigma[s] = 1.0;
    dist[s] = 0;
    queue.push_back(s);
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const std::size_t v = queue[head];
      stack.push_back(v);
      for (std::size_t w : graph.out_neighbors(v)) {
        if (dist[w] < 0) {
          dist[w] = dist[v] + 1;
          queue.push_back(w);
        }
        if (dist[w] == dist[v] + 1) {
          sigma[w] += sigma[v];
          preds[w].push_back(v);
        }
      }
    }
    while (!stack.empty()) {
      const std::size_t w = stack.back();
      stack.pop_back();
      for (std::size_t v : preds[w]) delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
      if (w != s) centrality[w] += delta[w];
    }
  }
  return centrality;
}

std::vector<double> pagerank(const DirectedGraph& graph, const PageRankOptions& options) {
  if (!(options.damping > 0.0 && options.damping < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "damping must lie in (0,1)");
  }
  const std::size_t n = graph.size();
  if (n == 0) return {};
  const double uniform = 1.0 / static_cast<double>(n);
  std::vector<double> rank(n, uniform), next(n);
  double residual = 0.0;
  for (int iter = 0; iter < options.max_iter; ++iter) {
    double dangling = 0.0;
    for (std::size_t v = 0; v < n; ++v) {
      if (graph.out_neighbors(v).empty()) dangling += rank[v];
    }
    const double base = (1.0 - options.damping) * uniform + options.damping * dangling * uniform;
    std::fill(next.begin(), next.end(), base);
    for (std::size_t v = 0; v < n; ++v) {
      const auto& outs = graph.out_neighbors(v);
      if (outs.empty()) continue;
      const double share = options.damping * rank[v] / static_cast<double>(outs.size());
      for (std::size_t w : outs) next[w] += share;
    }
    // Renormalise against drift so the scores keep summing to one.
    double total = 0.0;
    for (double x : next) total += x;
    residual = 0.0;
    for (std::size_t v = 0; v < n; ++v) {
      next[v] /= total;
      residual += std::abs(next[v] - rank[v]);
    }
    rank.swap(next);
    if (residual < options.tolerance) return rank;
  }
  throw Error(ErrorCode::Numeric, "pagerank did not converge within " +
                                      std::to_string(options.max_iter) +
                                      " iterations (residual " + io::format_real(residual) + ")");
}

void write_edge_list(std::ostream& out, const DirectedGraph& graph) {
  for (const auto& [from, to] : graph.edge_list()) out << from << '\t' << to << '\n';
}

void write_centrality(std::ostream& out, const DirectedGraph& graph,
                      const std::vector<double>& values, const std::string& name) {
  out << "user_id," << name << '\n';
  for (std::size_t v = 0; v < graph.size(); ++v) {
    out << io::csv_field(graph.nodes()[v]) << ',' << io::format_real(values[v]) << '\n';
  }
}

}  // namespace irrkit

#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace fractalgroups {

struct NoSuchEdge : std::invalid_argument {
  NoSuchEdge() : std::invalid_argument("edge not present in the expansion") {}
};

struct InvalidWord : std::invalid_argument {
  InvalidWord() : std::invalid_argument("word is not a valid edge address") {}
};

struct NotStabilized : std::runtime_error {
  NotStabilized()
      : std::runtime_error("component count still changing at maximal depth") {}
};

struct Disconnected : std::runtime_error {
  Disconnected() : std::runtime_error("no path joins the two vertices") {}
};

struct NotRabbitSystem : std::invalid_argument {
  NotRabbitSystem() : std::invalid_argument("expansion is not from a rabbit system") {}
};

struct NotAirplaneSystem : std::invalid_argument {
  NotAirplaneSystem()
      : std::invalid_argument("expansion is not from the airplane system") {}
};

// A finite directed multigraph with colored, named edges.
struct RepGraph {
  struct Edge {
    std::string name;
    int iota = 0;
    int tau = 0;
    std::string color;
  };

  int vertex_count = 0;
  std::vector<Edge> edges;
};

enum class SystemKind { basilica, rabbit, airplane, bubble_bath, custom };

// A base graph plus one replacement graph per color, with distinguished
// initial and terminal vertices.
struct ReplacementSystem {
  struct Replacement {
    RepGraph graph;
    int iota = 0;
    int tau = 0;
  };

  SystemKind kind = SystemKind::custom;
  int rabbit_arity = 0;  // for rabbit systems
  std::vector<std::string> colors;
  RepGraph base;
  std::map<std::string, Replacement> replacements;

  static ReplacementSystem basilica() {
    ReplacementSystem sys;
    sys.kind = SystemKind::basilica;
    sys.rabbit_arity = 2;
    sys.colors = {"black"};
    sys.base.vertex_count = 1;
    sys.base.edges = {{"L", 0, 0, "black"}, {"R", 0, 0, "black"}};
    Replacement r;
    r.graph.vertex_count = 3;
    r.graph.edges = {{"0", 0, 1, "black"},
                     {"1", 1, 1, "black"},
                     {"2", 1, 2, "black"}};
    r.iota = 0;
    r.tau = 2;
    sys.replacements["black"] = r;
    return sys;
  }

  // Bouquet of n loops; the replacement is a length-2 path with n-1 loops
  // at the middle vertex.
  static ReplacementSystem rabbit(int n) {
    if (n < 2) {
      throw std::invalid_argument("rabbit systems need n >= 2");
    }
    ReplacementSystem sys;
    sys.kind = SystemKind::rabbit;
    sys.rabbit_arity = n;
    sys.colors = {"black"};
    sys.base.vertex_count = 1;
    for (int i = 1; i <= n; ++i) {
      sys.base.edges.push_back({"x" + std::to_string(i), 0, 0, "black"});
    }
    Replacement r;
    r.graph.vertex_count = 3;
    r.graph.edges.push_back({"0", 0, 1, "black"});
    for (int i = 1; i <= n - 1; ++i) {
      r.graph.edges.push_back({std::to_string(i), 1, 1, "black"});
    }
    r.graph.edges.push_back({std::to_string(n), 1, 2, "black"});
    r.iota = 0;
    r.tau = 2;
    sys.replacements["black"] = r;
    return sys;
  }

  static ReplacementSystem airplane() {
    ReplacementSystem sys;
    sys.kind = SystemKind::airplane;
    sys.colors = {"blue", "red"};
    sys.base.vertex_count = 2;
    sys.base.edges = {{"s", 0, 1, "blue"}};
    Replacement blue;
    blue.graph.vertex_count = 4;  // iota, cl, cr, tau
    blue.graph.edges = {{"b1", 1, 0, "blue"},
                        {"b2", 2, 1, "red"},
                        {"b3", 1, 2, "red"},
                        {"b4", 2, 3, "blue"}};
    blue.iota = 0;
    blue.tau = 3;
    sys.replacements["blue"] = blue;
    Replacement red;
    red.graph.vertex_count = 4;  // iota, middle, tau, top
    red.graph.edges = {{"r1", 0, 1, "red"},
                       {"r2", 1, 2, "red"},
                       {"r3", 1, 3, "blue"}};
    red.iota = 0;
    red.tau = 2;
    sys.replacements["red"] = red;
    return sys;
  }

  static ReplacementSystem bubble_bath() {
    ReplacementSystem sys;
    sys.kind = SystemKind::bubble_bath;
    sys.colors = {"black"};
    sys.base.vertex_count = 2;
    sys.base.edges = {{"l", 1, 0, "black"},
                      {"c", 1, 0, "black"},
                      {"r", 1, 0, "black"}};
    Replacement r;
    r.graph.vertex_count = 4;  // iota, cl, cr, tau
    r.graph.edges = {{"1", 1, 0, "black"},
                     {"2", 2, 1, "black"},
                     {"3", 1, 2, "black"},
                     {"4", 2, 3, "black"}};
    r.iota = 0;
    r.tau = 3;
    sys.replacements["black"] = r;
    return sys;
  }

  static ReplacementSystem builtin(std::string const& name);
};

using EdgeWord = std::vector<std::string>;

inline std::string word_str(EdgeWord const& w) {
  std::string out;
  for (auto const& s : w) {
    out += s;
  }
  return out;
}

// A graph obtained from the base graph by finitely many edge expansions.
// Vertex identities are stable: expanding an edge reuses its endpoints
// and appends fresh inner vertices.
class GraphExpansion {
 public:
  struct Edge {
    EdgeWord word;
    int iota = 0;
    int tau = 0;
    std::string color;
  };

  explicit GraphExpansion(ReplacementSystem sys)
      : sys_(std::move(sys)), vertex_count_(sys_.base.vertex_count) {
    for (auto const& e : sys_.base.edges) {
      edges_.push_back(Edge{{e.name}, e.iota, e.tau, e.color});
    }
  }

  ReplacementSystem const& system() const { return sys_; }
  int vertex_count() const { return vertex_count_; }
  std::vector<Edge> const& edges() const { return edges_; }

  std::optional<std::size_t> find_edge(EdgeWord const& w) const {
    for (std::size_t i = 0; i < edges_.size(); ++i) {
      if (edges_[i].word == w) {
        return i;
      }
    }
    return std::nullopt;
  }

  // Replaces the edge by a fresh copy of the replacement graph of its
  // color, identifying the copy's initial and terminal vertices with the
  // edge's endpoints.
  void expand_edge(EdgeWord const& w) {
    auto at = find_edge(w);
    if (!at) {
      throw NoSuchEdge();
    }
    Edge const e = edges_[*at];
    edges_.erase(edges_.begin() + long(*at));
    auto const& rep = sys_.replacements.at(e.color);
    std::map<int, int> vertex_map = {{rep.iota, e.iota}, {rep.tau, e.tau}};
    for (int v = 0; v < rep.graph.vertex_count; ++v) {
      if (!vertex_map.count(v)) {
        vertex_map[v] = vertex_count_++;
      }
    }
    for (auto const& re : rep.graph.edges) {
      EdgeWord word = e.word;
      word.push_back(re.name);
      edges_.push_back(
          Edge{std::move(word), vertex_map.at(re.iota), vertex_map.at(re.tau),
               re.color});
    }
  }

  // Expands every current edge once.
  void expand_all() {
    std::vector<EdgeWord> words;
    words.reserve(edges_.size());
    for (auto const& e : edges_) {
      words.push_back(e.word);
    }
    for (auto const& w : words) {
      expand_edge(w);
    }
  }

  std::vector<std::vector<int>> adjacency() const {
    std::vector<std::vector<int>> adj(vertex_count_);
    for (auto const& e : edges_) {
      adj[e.iota].push_back(e.tau);
      adj[e.tau].push_back(e.iota);
    }
    return adj;
  }

  // Connected components after removing one vertex.
  int components_without(int v) const {
    auto adj = adjacency();
    std::vector<int> comp(vertex_count_, -1);
    int count = 0;
    for (int s = 0; s < vertex_count_; ++s) {
      if (s == v || comp[s] != -1) {
        continue;
      }
      comp[s] = count;
      std::vector<int> queue = {s};
      for (std::size_t i = 0; i < queue.size(); ++i) {
        for (int nb : adj[queue[i]]) {
          if (nb != v && comp[nb] == -1) {
            comp[nb] = count;
            queue.push_back(nb);
          }
        }
      }
      ++count;
    }
    return count;
  }

  std::string to_dot() const {
    std::ostringstream out;
    out << "digraph expansion {\n";
    for (int v = 0; v < vertex_count_; ++v) {
      out << "  v" << v << ";\n";
    }
    for (auto const& e : edges_) {
      out << "  v" << e.iota << " -> v" << e.tau << " [label=\""
          << word_str(e.word) << "\",color=\"" << e.color << "\"];\n";
    }
    out << "}\n";
    return out.str();
  }

 private:
  ReplacementSystem sys_;
  int vertex_count_;
  std::vector<Edge> edges_;
};

inline GraphExpansion full_expansion(ReplacementSystem const& sys, int depth) {
  GraphExpansion g(sys);
  for (int i = 0; i < depth; ++i) {
    g.expand_all();
  }
  return g;
}

// A simple cycle, as the sorted set of indices of its edges together with
// the set of vertices it visits.
struct Cycle {
  std::vector<std::size_t> edge_indices;
  std::set<int> vertices;
};

// All simple undirected cycles of the expansion: loops, pairs of parallel
// edges and longer cycles.
inline std::vector<Cycle> circles(GraphExpansion const& g) {
  auto const& edges = g.edges();
  std::set<std::vector<std::size_t>> seen;
  std::vector<Cycle> out;
  auto emit = [&](std::vector<std::size_t> idx) {
    std::sort(idx.begin(), idx.end());
    if (!seen.insert(idx).second) {
      return;
    }
    Cycle c;
    c.edge_indices = idx;
    for (auto i : idx) {
      c.vertices.insert(edges[i].iota);
      c.vertices.insert(edges[i].tau);
    }
    out.push_back(std::move(c));
  };

  for (std::size_t i = 0; i < edges.size(); ++i) {
    if (edges[i].iota == edges[i].tau) {
      emit({i});
    }
  }
  // Paths from tau(e0) back to iota(e0) through edges with larger index
  // and fresh non-loop vertices.
  for (std::size_t e0 = 0; e0 < edges.size(); ++e0) {
    if (edges[e0].iota == edges[e0].tau) {
      continue;
    }
    std::vector<std::size_t> stack_edges = {e0};
    std::set<int> visited = {edges[e0].iota, edges[e0].tau};
    auto dfs = [&](auto&& self, int at) -> void {
      if (at == edges[e0].iota) {
        emit(stack_edges);
        return;
      }
      for (std::size_t e = e0 + 1; e < edges.size(); ++e) {
        if (edges[e].iota == edges[e].tau) {
          continue;
        }
        int next = -1;
        if (edges[e].iota == at) {
          next = edges[e].tau;
        } else if (edges[e].tau == at) {
          next = edges[e].iota;
        } else {
          continue;
        }
        if (std::count(stack_edges.begin(), stack_edges.end(), e)) {
          continue;
        }
        if (next != edges[e0].iota && visited.count(next)) {
          continue;
        }
        stack_edges.push_back(e);
        visited.insert(next);
        self(self, next);
        visited.erase(next);
        stack_edges.pop_back();
      }
    };
    dfs(dfs, edges[e0].tau);
  }
  return out;
}

// Number of connected components of the complement of a gluing vertex,
// stabilized over increasing depth (two consecutive equal counts).
inline int vertex_order(ReplacementSystem const& sys, int vertex,
                        int max_depth) {
  std::optional<int> previous;
  GraphExpansion g(sys);
  for (int depth = 0; depth <= max_depth; ++depth) {
    if (vertex < g.vertex_count()) {
      int count = g.components_without(vertex);
      if (previous && *previous == count) {
        return count;
      }
      previous = count;
    }
    g.expand_all();
  }
  throw NotStabilized();
}

inline ReplacementSystem ReplacementSystem::builtin(std::string const& name) {
  if (name == "basilica") {
    return basilica();
  }
  if (name == "airplane") {
    return airplane();
  }
  if (name == "bubble-bath") {
    return bubble_bath();
  }
  if (name.rfind("rabbit", 0) == 0) {
    std::string arity = name.substr(6);
    if (!arity.empty() && arity[0] == ':') {
      arity = arity.substr(1);
    }
    return rabbit(std::stoi(arity));
  }
  throw std::invalid_argument("unknown builtin system: " + name);
}

inline nlohmann::ordered_json to_json(RepGraph const& g) {
  nlohmann::ordered_json edges = nlohmann::ordered_json::array();
  for (auto const& e : g.edges) {
    edges.push_back({{"name", e.name},
                     {"iota", e.iota},
                     {"tau", e.tau},
                     {"color", e.color}});
  }
  return {{"vertices", g.vertex_count}, {"edges", edges}};
}

inline RepGraph rep_graph_from_json(nlohmann::json const& j) {
  RepGraph g;
  g.vertex_count = j.at("vertices").get<int>();
  for (auto const& e : j.at("edges")) {
    g.edges.push_back(RepGraph::Edge{e.at("name").get<std::string>(),
                                     e.at("iota").get<int>(),
                                     e.at("tau").get<int>(),
                                     e.at("color").get<std::string>()});
  }
  return g;
}

inline nlohmann::ordered_json to_json(ReplacementSystem const& sys) {
  nlohmann::ordered_json reps = nlohmann::ordered_json::object();
  for (auto const& [color, rep] : sys.replacements) {
    auto g = to_json(rep.graph);
    g["iota"] = rep.iota;
    g["tau"] = rep.tau;
    reps[color] = g;
  }
  return {{"colors", sys.colors}, {"base", to_json(sys.base)},
          {"replacements", reps}};
}

inline ReplacementSystem system_from_json(nlohmann::json const& j) {
  ReplacementSystem sys;
  sys.kind = SystemKind::custom;
  sys.colors = j.at("colors").get<std::vector<std::string>>();
  sys.base = rep_graph_from_json(j.at("base"));
  for (auto const& [color, rep] : j.at("replacements").items()) {
    ReplacementSystem::Replacement r;
    r.graph = rep_graph_from_json(rep);
    r.iota = rep.at("iota").get<int>();
    r.tau = rep.at("tau").get<int>();
    if (r.iota == r.tau) {
      throw std::invalid_argument(
          "replacement initial and terminal vertices must differ");
    }
    sys.replacements[color] = r;
  }
  for (auto const& c : sys.colors) {
    if (!sys.replacements.count(c)) {
      throw std::invalid_argument("missing replacement graph for color " + c);
    }
  }
  return sys;
}

inline nlohmann::ordered_json to_json(GraphExpansion const& g) {
  nlohmann::ordered_json edges = nlohmann::ordered_json::array();
  for (auto const& e : g.edges()) {
    edges.push_back({{"word", e.word},
                     {"iota", e.iota},
                     {"tau", e.tau},
                     {"color", e.color}});
  }
  return {{"vertices", g.vertex_count()}, {"edges", edges}};
}

}  // namespace fractalgroups

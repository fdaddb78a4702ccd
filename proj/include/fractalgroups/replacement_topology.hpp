#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "fractalgroups/replacement.hpp"

namespace fractalgroups {

// An eventually periodic infinite word: prefix followed by the repeated
// cycle.
struct TailWord {
  EdgeWord prefix;
  EdgeWord cycle;

  std::string const& symbol(std::size_t k) const {
    if (k < prefix.size()) {
      return prefix[k];
    }
    return cycle[(k - prefix.size()) % cycle.size()];
  }

  std::size_t cycle_position(std::size_t k) const {
    if (k < prefix.size()) {
      return cycle.size();  // still inside the prefix
    }
    return (k - prefix.size()) % cycle.size();
  }
};

namespace detail {

struct GluingState {
  int xi, xt, yi, yt;  // endpoint identities of the two current edges

  bool incident() const {
    return xi == yi || xi == yt || xt == yi || xt == yt;
  }

  // Coincidence pattern, for cycle detection.
  std::tuple<bool, bool, bool, bool, bool, bool> signature() const {
    return {xi == yi, xi == yt, xt == yi, xt == yt, xi == xt, yi == yt};
  }
};

inline RepGraph::Edge const& replacement_edge(ReplacementSystem const& sys,
                                              std::string const& color,
                                              std::string const& name) {
  for (auto const& e : sys.replacements.at(color).graph.edges) {
    if (e.name == name) {
      return e;
    }
  }
  throw InvalidWord();
}

}  // namespace detail

// Whether the two infinite words are glued: their length-k prefixes stay
// incident for every k. Decided exactly for eventually periodic words by
// detecting a repeated expansion state.
inline bool are_glued(ReplacementSystem const& sys, TailWord const& x,
                      TailWord const& y, int max_depth = 256) {
  // First symbols must name base edges.
  auto base_edge = [&sys](std::string const& name) -> RepGraph::Edge const& {
    for (auto const& e : sys.base.edges) {
      if (e.name == name) {
        return e;
      }
    }
    throw InvalidWord();
  };

  int fresh = sys.base.vertex_count;
  auto const& ex0 = base_edge(x.symbol(0));
  auto const& ey0 = base_edge(y.symbol(0));
  detail::GluingState st{ex0.iota, ex0.tau, ey0.iota, ey0.tau};
  std::string cx = ex0.color;
  std::string cy = ey0.color;
  bool same_so_far = x.symbol(0) == y.symbol(0);

  std::set<std::tuple<std::size_t, std::size_t, bool,
                      std::tuple<bool, bool, bool, bool, bool, bool>>>
      states;

  for (std::size_t k = 1; std::size_t(max_depth) >= k; ++k) {
    if (!st.incident()) {
      return false;
    }
    auto key = std::make_tuple(x.cycle_position(k), y.cycle_position(k),
                               same_so_far, st.signature());
    if (k > std::max(x.prefix.size(), y.prefix.size())) {
      if (!states.insert(key).second) {
        return true;  // the incident pattern repeats forever
      }
    }

    auto const& sx = x.symbol(k);
    auto const& sy = y.symbol(k);
    auto const& rex = detail::replacement_edge(sys, cx, sx);

    if (same_so_far && sx == sy) {
      // Identical prefixes: expand once, both words pick the same edge.
      std::map<int, int> vm = {{sys.replacements.at(cx).iota, st.xi},
                               {sys.replacements.at(cx).tau, st.xt}};
      for (int v = 0; v < sys.replacements.at(cx).graph.vertex_count; ++v) {
        if (!vm.count(v)) {
          vm[v] = fresh++;
        }
      }
      st = detail::GluingState{vm.at(rex.iota), vm.at(rex.tau), vm.at(rex.iota),
                               vm.at(rex.tau)};
      cx = cy = rex.color;
      continue;
    }

    if (same_so_far) {
      // Divergence step: one expansion of the common edge, two of its
      // edges chosen; inner vertices are shared.
      auto const& rey = detail::replacement_edge(sys, cy, sy);
      std::map<int, int> vm = {{sys.replacements.at(cx).iota, st.xi},
                               {sys.replacements.at(cx).tau, st.xt}};
      for (int v = 0; v < sys.replacements.at(cx).graph.vertex_count; ++v) {
        if (!vm.count(v)) {
          vm[v] = fresh++;
        }
      }
      st = detail::GluingState{vm.at(rex.iota), vm.at(rex.tau), vm.at(rey.iota),
                               vm.at(rey.tau)};
      cx = rex.color;
      cy = rey.color;
      same_so_far = false;
      continue;
    }

    // Distinct edges expand independently.
    auto const& rey = detail::replacement_edge(sys, cy, sy);
    std::map<int, int> vmx = {{sys.replacements.at(cx).iota, st.xi},
                              {sys.replacements.at(cx).tau, st.xt}};
    for (int v = 0; v < sys.replacements.at(cx).graph.vertex_count; ++v) {
      if (!vmx.count(v)) {
        vmx[v] = fresh++;
      }
    }
    std::map<int, int> vmy = {{sys.replacements.at(cy).iota, st.yi},
                              {sys.replacements.at(cy).tau, st.yt}};
    for (int v = 0; v < sys.replacements.at(cy).graph.vertex_count; ++v) {
      if (!vmy.count(v)) {
        vmy[v] = fresh++;
      }
    }
    st = detail::GluingState{vmx.at(rex.iota), vmx.at(rex.tau),
                             vmy.at(rey.iota), vmy.at(rey.tau)};
    cx = rex.color;
    cy = rey.color;
  }
  return st.incident();
}

// A color is arc-stabilizing when its replacement graph has a unique
// undirected path from iota to tau and every color on that path is
// arc-stabilizing too; refining such a path never branches.
inline std::map<std::string, bool> arc_stabilizing_colors(
    ReplacementSystem const& sys) {
  // Count simple iota-tau paths per replacement graph and record colors.
  std::map<std::string, std::vector<std::set<std::string>>> paths;
  for (auto const& [color, rep] : sys.replacements) {
    std::vector<std::set<std::string>> found;
    std::vector<bool> used(rep.graph.edges.size(), false);
    std::set<int> visited = {rep.iota};
    std::set<std::string> colors_on_path;
    auto dfs = [&](auto&& self, int at) -> void {
      if (at == rep.tau) {
        found.push_back(colors_on_path);
        return;
      }
      for (std::size_t e = 0; e < rep.graph.edges.size(); ++e) {
        if (used[e]) {
          continue;
        }
        auto const& edge = rep.graph.edges[e];
        int next = -1;
        if (edge.iota == at) {
          next = edge.tau;
        } else if (edge.tau == at) {
          next = edge.iota;
        } else {
          continue;
        }
        if (visited.count(next) && next != rep.tau) {
          continue;
        }
        if (next == rep.tau && edge.iota == edge.tau) {
          continue;
        }
        used[e] = true;
        bool added = visited.insert(next).second;
        bool color_added = colors_on_path.insert(edge.color).second;
        self(self, next);
        used[e] = false;
        if (added) {
          visited.erase(next);
        }
        if (color_added) {
          colors_on_path.erase(edge.color);
        }
      }
    };
    dfs(dfs, rep.iota);
    paths[color] = found;
  }

  std::map<std::string, bool> stabilizing;
  for (auto const& [color, found] : paths) {
    stabilizing[color] = found.size() == 1;
  }
  bool changed = true;
  while (changed) {
    changed = false;
    for (auto const& [color, found] : paths) {
      if (!stabilizing[color]) {
        continue;
      }
      for (auto const& c : found[0]) {
        if (!stabilizing[c]) {
          stabilizing[color] = false;
          changed = true;
        }
      }
    }
  }
  return stabilizing;
}

// Result of the arc recursion between two gluing vertices: either the arc
// skeletons are determined (each path refines uniquely forever), or the
// recursion branches at the listed colors.
struct ArcReport {
  bool stabilizes = false;
  std::vector<std::vector<std::size_t>> paths;  // edge index sequences
  std::vector<std::string> branching_colors;
  std::vector<Cycle> cycles_through;  // for the p == q case
};

inline ArcReport arcs_between(GraphExpansion const& g, int p, int q) {
  ArcReport report;
  auto stabilizing = arc_stabilizing_colors(g.system());

  if (p == q) {
    for (auto const& c : circles(g)) {
      if (c.vertices.count(p)) {
        report.cycles_through.push_back(c);
      }
    }
    report.stabilizes = true;
    for (auto const& c : report.cycles_through) {
      for (auto e : c.edge_indices) {
        if (!stabilizing.at(g.edges()[e].color)) {
          report.stabilizes = false;
          report.branching_colors.push_back(g.edges()[e].color);
        }
      }
    }
    return report;
  }

  auto const& edges = g.edges();
  std::vector<std::size_t> stack_edges;
  std::set<int> visited = {p};
  auto dfs = [&](auto&& self, int at) -> void {
    if (at == q) {
      report.paths.push_back(stack_edges);
      return;
    }
    for (std::size_t e = 0; e < edges.size(); ++e) {
      if (std::count(stack_edges.begin(), stack_edges.end(), e)) {
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
      if (visited.count(next)) {
        continue;
      }
      stack_edges.push_back(e);
      visited.insert(next);
      self(self, next);
      visited.erase(next);
      stack_edges.pop_back();
    }
  };
  dfs(dfs, p);

  if (report.paths.empty()) {
    throw Disconnected();
  }
  report.stabilizes = true;
  std::set<std::string> branching;
  for (auto const& path : report.paths) {
    for (auto e : path) {
      if (!stabilizing.at(edges[e].color)) {
        report.stabilizes = false;
        branching.insert(edges[e].color);
      }
    }
  }
  report.branching_colors.assign(branching.begin(), branching.end());
  return report;
}

// Bipartite incidence graph on the cycles and the gluing vertices lying
// on them.
struct CircleTree {
  std::vector<Cycle> cycles;
  std::vector<int> cut_vertices;  // expansion vertex ids on cycles
  // adjacency: cycle index -> list of positions into cut_vertices
  std::vector<std::vector<int>> incidence;

  std::size_t node_count() const {
    return cycles.size() + cut_vertices.size();
  }

  bool is_tree() const {
    std::size_t edge_count = 0;
    for (auto const& row : incidence) {
      edge_count += row.size();
    }
    if (node_count() == 0 || edge_count + 1 != node_count()) {
      return false;
    }
    // Connectivity over the bipartite graph.
    std::vector<std::vector<int>> vertex_to_cycle(cut_vertices.size());
    for (std::size_t c = 0; c < incidence.size(); ++c) {
      for (int v : incidence[c]) {
        vertex_to_cycle[v].push_back(int(c));
      }
    }
    std::set<std::pair<bool, int>> seen = {{true, 0}};
    std::vector<std::pair<bool, int>> queue = {{true, 0}};
    for (std::size_t i = 0; i < queue.size(); ++i) {
      auto [is_cycle, idx] = queue[i];
      auto push = [&](bool c, int j) {
        if (seen.insert({c, j}).second) {
          queue.push_back({c, j});
        }
      };
      if (is_cycle) {
        for (int v : incidence[idx]) {
          push(false, v);
        }
      } else {
        for (int c : vertex_to_cycle[idx]) {
          push(true, c);
        }
      }
    }
    return seen.size() == node_count();
  }

  int cut_vertex_degree(int position) const {
    int deg = 0;
    for (auto const& row : incidence) {
      deg += int(std::count(row.begin(), row.end(), position));
    }
    return deg;
  }

  std::string to_dot() const {
    std::ostringstream out;
    out << "graph circle_tree {\n";
    for (std::size_t c = 0; c < cycles.size(); ++c) {
      out << "  c" << c << " [shape=ellipse,label=\"circle " << c << "\"];\n";
    }
    for (std::size_t v = 0; v < cut_vertices.size(); ++v) {
      out << "  p" << v << " [shape=point,label=\"v" << cut_vertices[v]
          << "\"];\n";
    }
    for (std::size_t c = 0; c < incidence.size(); ++c) {
      for (int v : incidence[c]) {
        out << "  c" << c << " -- p" << v << ";\n";
      }
    }
    out << "}\n";
    return out.str();
  }
};

inline CircleTree tree_of_circles(GraphExpansion const& g) {
  auto kind = g.system().kind;
  if (kind != SystemKind::rabbit && kind != SystemKind::basilica) {
    throw NotRabbitSystem();
  }
  CircleTree t;
  t.cycles = circles(g);
  std::map<int, int> vertex_position;
  for (auto const& c : t.cycles) {
    for (int v : c.vertices) {
      if (!vertex_position.count(v)) {
        vertex_position[v] = int(t.cut_vertices.size());
        t.cut_vertices.push_back(v);
      }
    }
  }
  t.incidence.resize(t.cycles.size());
  for (std::size_t c = 0; c < t.cycles.size(); ++c) {
    for (int v : t.cycles[c].vertices) {
      t.incidence[c].push_back(vertex_position.at(v));
    }
  }
  return t;
}

// The quotient collapsing every cycle to a node: nodes are cycle classes
// and untouched vertices, edges are the non-cycle edges of the expansion.
struct DendriteQuotient {
  std::vector<int> vertex_class;      // expansion vertex -> class id
  std::vector<bool> class_is_circle;  // class came from a cycle
  std::vector<std::pair<int, int>> arcs;  // class pairs from acyclic edges

  int degree(int cls) const {
    int deg = 0;
    for (auto const& [a, b] : arcs) {
      deg += int(a == cls) + int(b == cls);
    }
    return deg;
  }

  std::size_t class_count() const { return class_is_circle.size(); }

  bool is_tree() const {
    if (arcs.size() + 1 != class_count()) {
      return false;
    }
    std::vector<std::vector<int>> adj(class_count());
    for (auto const& [a, b] : arcs) {
      adj[a].push_back(b);
      adj[b].push_back(a);
    }
    std::set<int> seen = {0};
    std::vector<int> queue = {0};
    for (std::size_t i = 0; i < queue.size(); ++i) {
      for (int nb : adj[queue[i]]) {
        if (seen.insert(nb).second) {
          queue.push_back(nb);
        }
      }
    }
    return seen.size() == class_count();
  }

  std::string to_dot() const {
    std::ostringstream out;
    out << "graph dendrite_quotient {\n";
    for (std::size_t c = 0; c < class_count(); ++c) {
      out << "  q" << c
          << (class_is_circle[c] ? " [shape=ellipse];\n" : " [shape=point];\n");
    }
    for (auto const& [a, b] : arcs) {
      out << "  q" << a << " -- q" << b << ";\n";
    }
    out << "}\n";
    return out.str();
  }
};

inline DendriteQuotient dendrite_of_circles(GraphExpansion const& g) {
  if (g.system().kind != SystemKind::airplane) {
    throw NotAirplaneSystem();
  }
  auto cycles = circles(g);
  // Union-find over expansion vertices.
  std::vector<int> parent(g.vertex_count());
  for (int v = 0; v < g.vertex_count(); ++v) {
    parent[v] = v;
  }
  auto find = [&parent](int v) {
    while (parent[v] != v) {
      parent[v] = parent[parent[v]];
      v = parent[v];
    }
    return v;
  };
  std::set<std::size_t> cycle_edges;
  std::set<int> circle_roots;
  for (auto const& c : cycles) {
    int first = *c.vertices.begin();
    for (int v : c.vertices) {
      parent[find(v)] = find(first);
    }
    for (auto e : c.edge_indices) {
      cycle_edges.insert(e);
    }
  }
  for (auto const& c : cycles) {
    circle_roots.insert(find(*c.vertices.begin()));
  }

  DendriteQuotient q;
  std::map<int, int> class_of_root;
  q.vertex_class.resize(g.vertex_count());
  for (int v = 0; v < g.vertex_count(); ++v) {
    int root = find(v);
    auto [it, inserted] =
        class_of_root.emplace(root, int(class_of_root.size()));
    if (inserted) {
      q.class_is_circle.push_back(circle_roots.count(root) > 0);
    }
    q.vertex_class[v] = it->second;
  }
  for (std::size_t e = 0; e < g.edges().size(); ++e) {
    if (cycle_edges.count(e)) {
      continue;
    }
    q.arcs.emplace_back(q.vertex_class[g.edges()[e].iota],
                        q.vertex_class[g.edges()[e].tau]);
  }
  return q;
}

}  // namespace fractalgroups

#pragma once

#include <map>
#include <memory>
#include <stdexcept>
#include <vector>

#include "fractalgroups/tree.hpp"

namespace fractalgroups {

struct OutOfRadius : std::invalid_argument {
  OutOfRadius() : std::invalid_argument("vertex outside the materialized radius") {}
};

// The explicit surjection from the tree T_infinity onto the biregular
// tree T_{k,infinity}: built sphere by sphere from the basepoints. Odd
// spheres of the source map onto the k-degree side by reducing child
// indices mod k-1; even spheres map fibre unions of children bijectively
// onto fresh children of the image. Edges go to edges, distances to the
// basepoint are preserved exactly, and any two vertices are displaced by
// at most 2.
class QuasiIsometry {
 public:
  QuasiIsometry(int radius, int cap, int k)
      : k_(k),
        source_(TreeShape::infinite_regular(), radius, cap),
        target_(TreeShape::biregular(Palette::dense(), Palette::ears_of(k)),
                0, 0) {
    if (k < 2) {
      throw BadArity();
    }
    image_.assign(source_.size(), -1);
    image_[0] = 0;
    for (int depth = 0; depth < radius; ++depth) {
      if (depth % 2 == 0) {
        map_even_sphere(depth);
      } else {
        map_odd_sphere(depth);
      }
    }
  }

  TruncatedTree const& source() const { return source_; }
  TruncatedTree& target() { return target_; }
  TruncatedTree const& target() const { return target_; }

  int apply(int source_node) const {
    if (source_node < 0 || source_node >= int(image_.size())) {
      throw OutOfRadius();
    }
    return image_[source_node];
  }

  VertexAddress apply(VertexAddress const& v) const {
    auto idx = source_.find(v);
    if (!idx) {
      throw OutOfRadius();
    }
    return target_.node(image_[*idx]).addr;
  }

 private:
  // Children of all vertices in one fibre map bijectively onto fresh
  // children of the common image.
  void map_even_sphere(int depth) {
    std::map<int, std::vector<int>> fibres;
    for (std::size_t i = 0; i < source_.size(); ++i) {
      if (int(source_.depth_of(int(i))) == depth) {
        fibres[image_[int(i)]].push_back(int(i));
      }
    }
    for (auto const& [image_node, members] : fibres) {
      for (int member : members) {
        for (int child : source_.node(member).children) {
          int target_child = target_.grow_child(image_node);
          assign(child, target_child);
        }
      }
    }
  }

  // Children of each odd vertex surject onto the k-1 free ears of the
  // image.
  void map_odd_sphere(int depth) {
    for (std::size_t i = 0; i < source_.size(); ++i) {
      if (int(source_.depth_of(int(i))) != depth) {
        continue;
      }
      int image_node = image_[int(i)];
      auto const& ears = target_ear_children(image_node);
      auto const& children = source_.node(int(i)).children;
      for (std::size_t j = 0; j < children.size(); ++j) {
        assign(children[j], ears[j % ears.size()]);
      }
    }
  }

  std::vector<int> const& target_ear_children(int node) {
    auto& cached = ear_children_[node];
    if (!cached.empty()) {
      return cached;
    }
    auto letters = child_letters(target_.shape(), target_.node(node).addr, 0);
    for (std::size_t j = 0; j < letters.size(); ++j) {
      cached.push_back(target_.grow_ear_child(node, letters[j]));
    }
    return cached;
  }

  void assign(int source_node, int target_node) {
    if (source_node >= int(image_.size())) {
      image_.resize(source_node + 1, -1);
    }
    image_[source_node] = target_node;
  }

  int k_;
  TruncatedTree source_;
  TruncatedTree target_;
  std::vector<int> image_;
  std::map<int, std::vector<int>> ear_children_;
};

}  // namespace fractalgroups

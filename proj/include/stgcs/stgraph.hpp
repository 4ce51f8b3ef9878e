#pragma once

// Space-time graph of convex sets: vertices are collision-free space-time
// polyhedra, undirected edges join sets with nonempty intersection. Supports
// extrusion from spatial sets, start-vertex lookup, goal-vertex qualification
// under the stay-until-horizon condition, and single-vertex replacement by a
// decomposition.

#include <map>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "common.hpp"
#include "geom.hpp"

namespace stgcs {

using VertexId = int;

struct TerminalSpec {
  State x_start;
  Vec p_goal;
};

class SpaceTimeGraph {
 public:
  SpaceTimeGraph() = default;

  // One vertex per spatial set, extruded over [0, t_max]; edges by nonempty
  // intersection. The pre-decomposition extrusions are kept as the immutable
  // record of the static free space (reservation coverage is always checked
  // against it, so re-reserving an already-excluded trajectory stays legal).
  static SpaceTimeGraph build(const std::vector<HPoly>& spatial_sets, double t_max) {
    if (spatial_sets.empty()) throw InputError("build_graph: no spatial sets");
    if (t_max <= 0.0) throw InputError("build_graph: t_max must be positive");
    SpaceTimeGraph g;
    g.t_max_ = t_max;
    g.d_ = spatial_sets.front().dim();
    for (const auto& s : spatial_sets) {
      if (s.dim() != g.d_) throw DimensionError("build_graph: mixed dimensions");
      if (s.is_empty()) throw InputError("build_graph: empty spatial set");
      const HPoly ext = extrude_time(s, 0.0, t_max);
      g.base_.push_back(ext);
      g.add_vertex(ext);
    }
    std::vector<VertexId> ids;
    for (const auto& [id, _] : g.verts_) ids.push_back(id);
    for (std::size_t i = 0; i < ids.size(); ++i)
      for (std::size_t j = i + 1; j < ids.size(); ++j)
        g.try_add_edge(ids[i], ids[j]);
    return g;
  }

  int dim() const { return d_; }
  double t_max() const { return t_max_; }
  int num_vertices() const { return static_cast<int>(verts_.size()); }
  int num_edges() const { return static_cast<int>(edges_.size()); }

  const std::map<VertexId, HPoly>& vertices() const { return verts_; }
  const HPoly& vertex(VertexId id) const {
    auto it = verts_.find(id);
    if (it == verts_.end()) throw InputError("graph: unknown vertex id");
    return it->second;
  }
  const std::pair<Vec, Vec>& vertex_bbox(VertexId id) const {
    auto it = bbox_.find(id);
    if (it == bbox_.end()) throw InputError("graph: unknown vertex id");
    return it->second;
  }
  const std::set<std::pair<VertexId, VertexId>>& edges() const { return edges_; }

  bool has_edge(VertexId u, VertexId v) const {
    if (u > v) std::swap(u, v);
    return edges_.count({u, v}) > 0;
  }

  std::vector<VertexId> neighbors(VertexId v) const {
    std::vector<VertexId> out;
    for (const auto& [a, b] : edges_) {
      if (a == v) out.push_back(b);
      if (b == v) out.push_back(a);
    }
    return out;  // ascending by construction of the edge set
  }

  // The original extrusions before any decomposition: the static free space.
  const std::vector<HPoly>& base_sets() const { return base_; }

  // All vertices whose set contains the start state. Empty result means the
  // start lies inside an obstacle or a reserved region.
  std::vector<VertexId> start_vertices(const State& x) const {
    if (x.p.size() != d_) throw DimensionError("start_vertices: dimension mismatch");
    Vec q(d_ + 1);
    q << x.p, x.t;
    std::vector<VertexId> out;
    for (const auto& [id, set] : verts_)
      if (set.contains(q)) out.push_back(id);
    return out;
  }

  struct GoalVertex {
    VertexId id;
    double t_entry;
  };

  // Vertices through which the goal position can be reached and then held
  // until t_max: a vertex qualifies iff the union of ALL vertices' goal-line
  // intervals covers [t*, t_max], where t* is this vertex's earliest arrival
  // time at p_goal. Sorted by vertex id.
  std::vector<GoalVertex> goal_vertices(const Vec& p_goal) const {
    if (p_goal.size() != d_) throw DimensionError("goal_vertices: dimension mismatch");
    struct Interval {
      double lo, hi;
      VertexId id;
    };
    std::vector<Interval> intervals;
    for (const auto& [id, set] : verts_) {
      // Exact 1-D restriction of the set to the goal line {(p_goal, t)}.
      double lo = 0.0, hi = t_max_;
      bool empty = false;
      for (int i = 0; i < set.rows() && !empty; ++i) {
        const double at = set.A()(i, d_);
        const double rest = set.b()[i] - set.A().row(i).head(d_).dot(p_goal);
        if (std::abs(at) < 1e-12) {
          if (rest < -kTol) empty = true;
        } else if (at > 0.0) {
          hi = std::min(hi, rest / at);
        } else {
          lo = std::max(lo, rest / at);
        }
      }
      if (!empty && lo <= hi + kTol) intervals.push_back({lo, std::max(lo, hi), id});
    }
    if (intervals.empty()) return {};

    // Merge the union with gap tolerance; a candidate qualifies iff the
    // merged component containing its entry time reaches t_max.
    std::vector<Interval> sorted = intervals;
    std::sort(sorted.begin(), sorted.end(), [](const Interval& a, const Interval& b) {
      return a.lo < b.lo || (a.lo == b.lo && a.hi < b.hi);
    });
    std::vector<std::pair<double, double>> merged;
    for (const auto& iv : sorted) {
      if (!merged.empty() && iv.lo <= merged.back().second + kTol)
        merged.back().second = std::max(merged.back().second, iv.hi);
      else
        merged.emplace_back(iv.lo, iv.hi);
    }
    std::vector<GoalVertex> out;
    for (const auto& iv : intervals) {
      for (const auto& [mlo, mhi] : merged) {
        if (iv.lo >= mlo - kTol && iv.lo <= mhi + kTol) {
          if (mhi >= t_max_ - kTol) out.push_back({iv.id, iv.lo});
          break;
        }
      }
    }
    return out;
  }

  // Replace one vertex by the (nonempty members of the) given decomposition;
  // edges are rebuilt among the new sets and toward the former neighbors.
  void replace_vertex(VertexId removed, const std::vector<HPoly>& new_sets) {
    if (!verts_.count(removed)) throw InputError("insert_decomposition: unknown vertex");
    const std::vector<VertexId> nbrs = neighbors(removed);
    for (VertexId n : nbrs) edges_.erase(minmax_pair(removed, n));
    verts_.erase(removed);
    bbox_.erase(removed);

    std::vector<VertexId> added;
    for (const auto& s : new_sets) {
      if (s.dim() != d_ + 1) throw DimensionError("insert_decomposition: bad set dimension");
      if (s.is_empty()) continue;  // silently dropped
      added.push_back(add_vertex(s));
    }
    for (std::size_t i = 0; i < added.size(); ++i)
      for (std::size_t j = i + 1; j < added.size(); ++j)
        try_add_edge(added[i], added[j]);
    for (VertexId a : added)
      for (VertexId n : nbrs) try_add_edge(a, n);
  }

 private:
  static std::pair<VertexId, VertexId> minmax_pair(VertexId a, VertexId b) {
    return a < b ? std::make_pair(a, b) : std::make_pair(b, a);
  }

  VertexId add_vertex(const HPoly& set) {
    const VertexId id = next_id_++;
    bbox_[id] = set.bounding_box();  // also enforces boundedness
    verts_[id] = set;
    return id;
  }

  // Bounding-box prefilter, then the exact emptiness LP.
  void try_add_edge(VertexId u, VertexId v) {
    const auto& [lo1, hi1] = bbox_.at(u);
    const auto& [lo2, hi2] = bbox_.at(v);
    for (int k = 0; k <= d_; ++k)
      if (lo1[k] > hi2[k] + kTol || lo2[k] > hi1[k] + kTol) return;
    if (!verts_.at(u).intersected(verts_.at(v)).is_empty())
      edges_.insert(minmax_pair(u, v));
  }

  int d_ = 0;
  double t_max_ = 0.0;
  VertexId next_id_ = 0;
  std::map<VertexId, HPoly> verts_;
  std::map<VertexId, std::pair<Vec, Vec>> bbox_;
  std::set<std::pair<VertexId, VertexId>> edges_;
  std::vector<HPoly> base_;
};

inline SpaceTimeGraph build_graph(const std::vector<HPoly>& spatial_sets, double t_max) {
  return SpaceTimeGraph::build(spatial_sets, t_max);
}

inline SpaceTimeGraph insert_decomposition(const SpaceTimeGraph& g, VertexId removed,
                                           const std::vector<HPoly>& new_sets) {
  SpaceTimeGraph out = g;
  out.replace_vertex(removed, new_sets);
  return out;
}

}  // namespace stgcs

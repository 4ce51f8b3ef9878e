#pragma once

// Trajectory reservation by exact convex decomposition. A piecewise-linear
// trajectory together with a square safety tube of a given apothem is carved
// out of a space-time graph: every vertex set that overlaps the open tube of
// some trajectory segment is partitioned into convex pieces that exclude the
// tube's interior, and the graph edges are rebuilt around the replacements.

#include <algorithm>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "common.hpp"
#include "gcsprog.hpp"
#include "geom.hpp"
#include "stgraph.hpp"

namespace stgcs {

// One linear piece of a trajectory associated with a graph vertex whose set
// contains it entirely.
struct VertexSegment {
  VertexId vertex_id = -1;
  Segment seg;
};

struct Reservation {
  Trajectory trajectory;
  double tube_apothem = 0.0;
};

// Extend a trajectory to span [0, t_max] with explicit zero-velocity waits at
// its first and last positions, drop exact duplicate states, and merge
// breakpoints that do not change the velocity. The map t -> p is unchanged on
// the original time span.
inline Trajectory canonicalize(const Trajectory& traj, double t_max) {
  if (traj.states.empty()) throw InputError("canonicalize: empty trajectory");
  for (const auto& s : traj.states)
    if (s.t < -kTol || s.t > t_max + kTol)
      throw InputError("canonicalize: state time outside [0, t_max]");

  std::vector<State> padded;
  const State& first = traj.states.front();
  if (first.t > 1e-12) padded.push_back({first.p, 0.0});
  padded.insert(padded.end(), traj.states.begin(), traj.states.end());
  const State& last = padded.back();
  if (last.t < t_max - 1e-12) padded.push_back({last.p, t_max});

  std::vector<State> st;
  for (const auto& s : padded) {
    if (!st.empty()) {
      const State& prev = st.back();
      if (std::abs(prev.t - s.t) <= 1e-12 &&
          (prev.p - s.p).cwiseAbs().maxCoeff() <= 1e-12)
        continue;  // exact duplicate
    }
    st.push_back(s);
    // Merge the middle of three collinear space-time states.
    while (st.size() >= 3) {
      const State& a = st[st.size() - 3];
      const State& b = st[st.size() - 2];
      const State& c = st[st.size() - 1];
      const double span = c.t - a.t;
      if (span <= 1e-12) break;
      const double lam = (b.t - a.t) / span;
      const Vec pred = a.p + lam * (c.p - a.p);
      if ((pred - b.p).cwiseAbs().maxCoeff() > 1e-9) break;
      st.erase(st.end() - 2);
    }
  }

  Trajectory out;
  out.states = std::move(st);
  return out;
}

namespace ecddetail {

struct Clip {
  int set_index = -1;
  Segment seg;
};

inline bool seg_box_overlap(const Segment& seg, const Vec& lo, const Vec& hi) {
  const int d = static_cast<int>(seg.x.p.size());
  for (int k = 0; k < d; ++k) {
    const double mn = std::min(seg.x.p[k], seg.y.p[k]);
    const double mx = std::max(seg.x.p[k], seg.y.p[k]);
    if (mn > hi[k] + kTol || lo[k] > mx + kTol) return false;
  }
  return !(seg.x.t > hi[d] + kTol || lo[d] > seg.y.t + kTol);
}

// Clip each positive-duration linear piece of the trajectory against every
// set, emitting one entry per nonempty positive-duration clip, and verify
// that the clips jointly cover the piece's whole time interval.
inline std::vector<Clip> clip_cover(const std::vector<const HPoly*>& sets,
                                    const std::vector<const std::pair<Vec, Vec>*>& boxes,
                                    const Trajectory& traj) {
  std::vector<Clip> out;
  for (std::size_t i = 0; i + 1 < traj.states.size(); ++i) {
    const Segment seg{traj.states[i], traj.states[i + 1]};
    if (seg.duration() <= 1e-12) continue;
    std::vector<std::pair<double, double>> covered;
    for (std::size_t v = 0; v < sets.size(); ++v) {
      if (!boxes.empty() && !seg_box_overlap(seg, boxes[v]->first, boxes[v]->second))
        continue;
      const auto clip = clip_segment(seg, *sets[v]);
      if (!clip || clip->duration() <= 1e-12) continue;
      out.push_back({static_cast<int>(v), *clip});
      covered.emplace_back(clip->x.t, clip->y.t);
    }
    std::sort(covered.begin(), covered.end());
    double reach = seg.x.t;
    for (const auto& [lo, hi] : covered) {
      if (lo > reach + kTol) break;
      reach = std::max(reach, hi);
    }
    if (reach < seg.y.t - kTol)
      throw CoverageError("reservation: trajectory leaves the free space near t=" +
                          std::to_string(reach));
  }
  return out;
}

// The convex pieces of X outside the open tube of seg: the bands below and
// above the segment's time span, then the center band sliced sequentially by
// the tube's side faces. Children may be empty; callers filter. X need not
// contain seg: the same carving removes tube overhang from neighboring sets.
inline std::vector<HPoly> carve(const HPoly& X, const Segment& seg, double r) {
  const int td = X.dim() - 1;
  Vec et = Vec::Zero(X.dim());
  et[td] = 1.0;
  std::vector<HPoly> kids;
  kids.push_back(X.with_halfspace({et, seg.x.t}));    // below: t <= x.t
  kids.push_back(X.with_halfspace({-et, -seg.y.t}));  // above: t >= y.t
  HPoly band = X.with_halfspace({-et, -seg.x.t}).with_halfspace({et, seg.y.t});
  const HPoly tube = segment_tube(seg, r);
  for (const auto& f : side_faces(tube)) {
    kids.push_back(band.with_halfspace(outside(f)));
    band = band.with_halfspace(f);
  }
  return kids;
}

}  // namespace ecddetail

// Associate every positive-duration linear piece of the trajectory with each
// graph vertex whose set contains a positive-duration sub-piece of it. A
// sub-interval covered by no vertex raises CoverageError.
inline std::vector<VertexSegment> vertex_segment_sequence(const SpaceTimeGraph& g,
                                                          const Trajectory& traj) {
  std::vector<const HPoly*> sets;
  std::vector<const std::pair<Vec, Vec>*> boxes;
  std::vector<VertexId> ids;
  for (const auto& [id, set] : g.vertices()) {
    ids.push_back(id);
    sets.push_back(&set);
    boxes.push_back(&g.vertex_bbox(id));
  }
  const auto clips = ecddetail::clip_cover(sets, boxes, traj);
  std::vector<VertexSegment> out;
  out.reserve(clips.size());
  for (const auto& c : clips) out.push_back({ids[c.set_index], c.seg});
  return out;
}

// Earliest time at which the trajectory (canonicalized to [0, t_max]) is not
// covered by any of the given space-time sets, if such a time exists.
inline std::optional<double> first_uncovered_time(const std::vector<HPoly>& sets,
                                                  const Trajectory& traj,
                                                  double t_max) {
  const Trajectory canon = canonicalize(traj, t_max);
  for (std::size_t i = 0; i + 1 < canon.states.size(); ++i) {
    const Segment seg{canon.states[i], canon.states[i + 1]};
    if (seg.duration() <= 1e-12) continue;
    std::vector<std::pair<double, double>> covered;
    for (const auto& set : sets) {
      const auto clip = clip_segment(seg, set);
      if (!clip || clip->duration() <= 1e-12) continue;
      covered.emplace_back(clip->x.t, clip->y.t);
    }
    std::sort(covered.begin(), covered.end());
    double reach = seg.x.t;
    for (const auto& [lo, hi] : covered) {
      if (lo > reach + kTol) return reach;
      reach = std::max(reach, hi);
    }
    if (reach < seg.y.t - kTol) return reach;
  }
  return std::nullopt;
}

// Partition X into convex sets that exclude the open safety tube around one
// trajectory segment: up to 2 time bands plus one slice per tube side face
// (6 pieces for planar maps). Empty pieces are dropped; zero-duration time
// bands are kept when nonempty.
inline std::vector<HPoly> decompose_one(const HPoly& X, const Segment& seg, double r) {
  if (!(seg.y.t > seg.x.t)) throw InputError("decompose_one: degenerate segment");
  if (!(r > 0.0)) throw InputError("decompose_one: apothem must be positive");
  std::vector<HPoly> out;
  for (auto& k : ecddetail::carve(X, seg, r))
    if (!k.is_empty()) out.push_back(std::move(k));
  return out;
}

// Reserve a trajectory as a space-time obstacle: every vertex set that
// overlaps the interior of some segment's safety tube is replaced by its
// carving, so the returned graph's free space excludes the open tube of the
// whole (canonicalized) trajectory. Reserving the same trajectory twice is a
// no-op. The trajectory must stay inside the static free space over the whole
// horizon; that is checked against the graph's immutable base sets, so
// reservations that cross previously reserved regions remain valid input.
inline SpaceTimeGraph reserve(const SpaceTimeGraph& g, const Reservation& res) {
  if (!(res.tube_apothem > 0.0)) throw InputError("reserve: apothem must be positive");
  const double r = res.tube_apothem;
  const Trajectory canon = canonicalize(res.trajectory, g.t_max());

  {
    std::vector<const HPoly*> sets;
    sets.reserve(g.base_sets().size());
    for (const auto& s : g.base_sets()) sets.push_back(&s);
    ecddetail::clip_cover(sets, {}, canon);
  }

  SpaceTimeGraph out = g;
  const int d = g.dim();
  for (std::size_t i = 0; i + 1 < canon.states.size(); ++i) {
    const Segment seg{canon.states[i], canon.states[i + 1]};
    if (seg.duration() <= 1e-12) continue;
    const HPoly tube = segment_tube(seg, r);
    Vec lo(d + 1), hi(d + 1);
    for (int k = 0; k < d; ++k) {
      lo[k] = std::min(seg.x.p[k], seg.y.p[k]) - r;
      hi[k] = std::max(seg.x.p[k], seg.y.p[k]) + r;
    }
    lo[d] = seg.x.t;
    hi[d] = seg.y.t;

    std::vector<VertexId> affected;
    for (const auto& [id, set] : out.vertices()) {
      const auto& [blo, bhi] = out.vertex_bbox(id);
      bool disjoint = false;
      for (int k = 0; k <= d && !disjoint; ++k)
        if (blo[k] > hi[k] + kTol || lo[k] > bhi[k] + kTol) disjoint = true;
      if (disjoint) continue;
      // Only sets meeting the tube's interior need carving; boundary contact
      // already satisfies the open-tube exclusion.
      if (set.intersected(tube).chebyshev().radius > 1e-9) affected.push_back(id);
    }
    for (VertexId id : affected)
      out.replace_vertex(id, ecddetail::carve(out.vertex(id), seg, r));
  }
  return out;
}

}  // namespace stgcs

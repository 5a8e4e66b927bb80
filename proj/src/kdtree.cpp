#include "lmprm/kdtree.hpp"

#include <algorithm>
#include <limits>

#include "lmprm/error.hpp"

namespace lmprm {

namespace {
constexpr std::uint32_t kLeafSize = 12;
}

KdTree::KdTree(std::span<const double> coords, std::size_t dim) : coords_(coords), dim_(dim) {
  if (dim == 0 || coords.size() % dim != 0) throw InvalidArgument("k-d tree: coordinate array does not match dimension");
  count_ = coords.size() / dim;
  perm_.resize(count_);
  for (std::size_t i = 0; i < count_; ++i) perm_[i] = static_cast<VertexId>(i);
  if (count_ > 0) {
    nodes_.reserve(2 * count_ / kLeafSize + 2);
    build(0, static_cast<std::uint32_t>(count_));
  }
}

std::int32_t KdTree::build(std::uint32_t begin, std::uint32_t end) {
  auto id = static_cast<std::int32_t>(nodes_.size());
  nodes_.push_back(Node{begin, end});
  if (end - begin <= kLeafSize) return id;

  // Split on the axis of largest spread at the median.
  std::uint32_t axis = 0;
  double best_spread = -1.0;
  for (std::uint32_t a = 0; a < dim_; ++a) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (std::uint32_t i = begin; i < end; ++i) {
      double c = coords_[perm_[i] * dim_ + a];
      lo = std::min(lo, c);
      hi = std::max(hi, c);
    }
    if (hi - lo > best_spread) {
      best_spread = hi - lo;
      axis = a;
    }
  }
  if (best_spread <= 0.0) return id;  // all points coincide

  std::uint32_t mid = begin + (end - begin) / 2;
  std::nth_element(perm_.begin() + begin, perm_.begin() + mid, perm_.begin() + end, [&](VertexId a, VertexId b) {
    return coords_[a * dim_ + axis] < coords_[b * dim_ + axis];
  });
  double split = coords_[perm_[mid] * dim_ + axis];
  std::int32_t left = build(begin, mid);
  std::int32_t right = build(mid, end);
  Node& n = nodes_[id];
  n.axis = axis;
  n.split = split;
  n.left = left;
  n.right = right;
  return id;
}

double KdTree::dist2(std::span<const double> x, VertexId v) const {
  const double* p = coords_.data() + static_cast<std::size_t>(v) * dim_;
  double s = 0.0;
  for (std::size_t i = 0; i < dim_; ++i) {
    double t = x[i] - p[i];
    s += t * t;
  }
  return s;
}

std::vector<VertexId> KdTree::radius_query(std::span<const double> x, double radius, VertexId exclude) const {
  std::vector<VertexId> out;
  radius_query(x, radius, exclude, out);
  return out;
}

void KdTree::radius_query(std::span<const double> x, double radius, VertexId exclude,
                          std::vector<VertexId>& out) const {
  out.clear();
  if (nodes_.empty() || !(radius > 0.0)) return;
  const double r2 = radius * radius;
  std::int32_t stack[128];
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const Node& n = nodes_[stack[--top]];
    if (n.left < 0) {
      for (std::uint32_t i = n.begin; i < n.end; ++i) {
        VertexId v = perm_[i];
        if (v != exclude && dist2(x, v) < r2) out.push_back(v);
      }
      continue;
    }
    // Points equal to the split value can sit on either side; only prune a
    // side when the whole half-space is at distance >= radius.
    double diff = x[n.axis] - n.split;
    if (diff <= 0.0 || diff < radius) stack[top++] = n.left;
    if (diff >= 0.0 || -diff < radius) stack[top++] = n.right;
  }
  std::sort(out.begin(), out.end());
}

VertexId KdTree::nearest(std::span<const double> x) const {
  if (nodes_.empty()) throw InvalidArgument("nearest vertex query on an empty set");
  VertexId best = kNone;
  double best_d2 = std::numeric_limits<double>::infinity();
  struct Item {
    std::int32_t node;
    double bound;
  };
  Item stack[128];
  int top = 0;
  stack[top++] = {0, 0.0};
  while (top > 0) {
    Item it = stack[--top];
    // Ties on distance must still be visited for the smaller-id rule.
    if (it.bound > best_d2) continue;
    const Node& n = nodes_[it.node];
    if (n.left < 0) {
      for (std::uint32_t i = n.begin; i < n.end; ++i) {
        VertexId v = perm_[i];
        double d2 = dist2(x, v);
        if (d2 < best_d2 || (d2 == best_d2 && v < best)) {
          best_d2 = d2;
          best = v;
        }
      }
      continue;
    }
    double diff = x[n.axis] - n.split;
    double plane = diff * diff;
    // Push the far side first so the near side is explored first.
    if (diff <= 0.0) {
      stack[top++] = {n.right, diff == 0.0 ? 0.0 : plane};
      stack[top++] = {n.left, 0.0};
    } else {
      stack[top++] = {n.left, plane};
      stack[top++] = {n.right, 0.0};
    }
  }
  return best;
}

}  // namespace lmprm

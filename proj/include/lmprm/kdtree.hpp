#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace lmprm {

using VertexId = std::uint32_t;

// Static k-d tree over a row-major point array (not owned; must outlive the tree).
class KdTree {
 public:
  KdTree() = default;
  KdTree(std::span<const double> coords, std::size_t dim);

  std::size_t size() const { return count_; }
  std::size_t dim() const { return dim_; }

  // Ids v with |x - v| < radius (strict), ascending. `exclude` is skipped.
  std::vector<VertexId> radius_query(std::span<const double> x, double radius,
                                     VertexId exclude = kNone) const;
  void radius_query(std::span<const double> x, double radius, VertexId exclude, std::vector<VertexId>& out) const;

  // argmin |x - v|; equal distances resolve to the smaller id.
  VertexId nearest(std::span<const double> x) const;

  static constexpr VertexId kNone = static_cast<VertexId>(-1);

 private:
  struct Node {
    // Leaves: [begin, end) into perm_. Inner: split axis/value, children.
    std::uint32_t begin, end;
    std::int32_t left = -1, right = -1;
    std::uint32_t axis = 0;
    double split = 0.0;
  };
  std::int32_t build(std::uint32_t begin, std::uint32_t end);
  double dist2(std::span<const double> x, VertexId v) const;

  std::span<const double> coords_;
  std::size_t dim_ = 0;
  std::size_t count_ = 0;
  std::vector<VertexId> perm_;
  std::vector<Node> nodes_;
};

}  // namespace lmprm

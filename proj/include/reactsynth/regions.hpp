#ifndef REACTSYNTH_REGIONS_HPP_
#define REACTSYNTH_REGIONS_HPP_

#include <Eigen/Core>

#include <optional>
#include <utility>
#include <vector>

namespace reactsynth {

/// Closed axis-aligned box [lo, hi]. A zero-dimensional box holds the single empty point.
struct Box
{
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;

  Box() = default;
  Box(Eigen::VectorXd lo, Eigen::VectorXd hi);

  static Box cube(Eigen::Index dim, double lo, double hi);

  Eigen::Index dim() const { return lo.size(); }
  Eigen::VectorXd center() const { return 0.5 * (lo + hi); }
  /// Half of the widest edge: the sup-norm radius of the box around its center.
  double radius() const;
  double width(Eigen::Index i) const { return hi(i) - lo(i); }
  /// Widest dimension, lowest index on ties; -1 for a zero-dimensional box.
  Eigen::Index widest() const;
  double volume() const;
  bool contains(const Eigen::VectorXd & p) const;
  std::pair<Box, Box> split(Eigen::Index d) const;
  /// Projection of p onto the box.
  Eigen::VectorXd clamp(const Eigen::VectorXd & p) const;
  /// Cartesian product, this box first.
  Box product(const Box & other) const;
  Box slice(Eigen::Index start, Eigen::Index n) const;

  bool operator==(const Box & other) const;
};

/// Open sup-norm ball {p : |p - center|_inf < radius}.
struct RemovedSquare
{
  Eigen::VectorXd center;
  double radius = 0;

  bool contains(const Eigen::VectorXd & p) const;
  /// The closed box lies inside the open square.
  bool covers(const Box & b) const;
  /// The closed box and the open square do not meet.
  bool disjoint(const Box & b) const;
};

/**
 * A base box minus a union of removed open squares.
 *
 * Boundaries of removed squares stay in the region, so the remainder is closed.
 * Squares are only ever appended.
 */
class RegionSet
{
public:
  RegionSet() = default;
  explicit RegionSet(Box base) : base_(std::move(base)) {}

  const Box & base() const { return base_; }
  const std::vector<RemovedSquare> & removed() const { return removed_; }
  Eigen::Index dim() const { return base_.dim(); }

  /// Throws DomainError for a non-positive radius and DimensionError on a size mismatch.
  void remove(const Eigen::VectorXd & center, double radius);
  RegionSet without(const Eigen::VectorXd & center, double radius) const;

  bool contains(const Eigen::VectorXd & p) const;

  /// Some square covers all of b.
  bool covered(const Box & b) const;

  /// Indices of squares that meet b, narrowed from `candidates` (all squares when null).
  std::vector<std::size_t> overlapping(const Box & b, const std::vector<std::size_t> * candidates = nullptr) const;

  /**
   * A point of the remainder, or none when the remainder has no interior.
   *
   * Depth-first bisection along the widest edge, lower half first. A box whose
   * center is free returns it; a box inside one square is pruned. Once the
   * square faces cut a box into few enough cells, the first uncovered cell in
   * lexicographic order decides it exactly. Boxes still too crowded to cut are
   * abandoned below min_gap.
   */
  std::optional<Eigen::VectorXd> find_point(double min_gap) const;

  /// find_point restricted to the sub-box `within`.
  std::optional<Eigen::VectorXd> find_point_in(const Box & within, double min_gap) const;

  /**
   * Bracket on the Lebesgue measure of the remainder. Boxes are split along
   * their widest edge up to `depth` times. A box cut into few enough cells by
   * the square faces is measured exactly; one still undecided at depth 0
   * counts as (0, volume).
   */
  std::pair<double, double> remaining_measure_bounds(int depth) const;

private:
  Box base_;
  std::vector<RemovedSquare> removed_;
};

}  // namespace reactsynth

#endif  // REACTSYNTH_REGIONS_HPP_

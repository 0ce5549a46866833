#include "reactsynth/regions.hpp"

#include "reactsynth/error.hpp"

#include <algorithm>
#include <cmath>

namespace reactsynth {

Box::Box(Eigen::VectorXd l, Eigen::VectorXd h) : lo(std::move(l)), hi(std::move(h))
{
  if (lo.size() != hi.size()) { throw DimensionError("box bounds differ in dimension"); }
  for (Eigen::Index i = 0; i < lo.size(); ++i) {
    if (!(lo(i) <= hi(i))) { throw DomainError("box lower bound exceeds upper bound"); }
  }
}

Box Box::cube(Eigen::Index dim, double l, double h)
{
  return Box(Eigen::VectorXd::Constant(dim, l), Eigen::VectorXd::Constant(dim, h));
}

double Box::radius() const
{
  return dim() == 0 ? 0.0 : 0.5 * (hi - lo).maxCoeff();
}

Eigen::Index Box::widest() const
{
  Eigen::Index best = -1;
  double w = -1;
  for (Eigen::Index i = 0; i < dim(); ++i) {
    if (width(i) > w) {
      w = width(i);
      best = i;
    }
  }
  return best;
}

double Box::volume() const
{
  return (hi - lo).prod();
}

bool Box::contains(const Eigen::VectorXd & p) const
{
  return p.size() == dim() && (p.array() >= lo.array()).all() && (p.array() <= hi.array()).all();
}

std::pair<Box, Box> Box::split(Eigen::Index d) const
{
  Box a = *this, b = *this;
  const double mid = 0.5 * (lo(d) + hi(d));
  a.hi(d) = mid;
  b.lo(d) = mid;
  return {a, b};
}

Eigen::VectorXd Box::clamp(const Eigen::VectorXd & p) const
{
  return p.cwiseMax(lo).cwiseMin(hi);
}

Box Box::product(const Box & other) const
{
  Box out;
  out.lo.resize(dim() + other.dim());
  out.hi.resize(dim() + other.dim());
  out.lo << lo, other.lo;
  out.hi << hi, other.hi;
  return out;
}

Box Box::slice(Eigen::Index start, Eigen::Index n) const
{
  return Box(lo.segment(start, n), hi.segment(start, n));
}

bool Box::operator==(const Box & other) const
{
  return lo.size() == other.lo.size() && lo == other.lo && hi == other.hi;
}

bool RemovedSquare::contains(const Eigen::VectorXd & p) const
{
  return (p - center).cwiseAbs().maxCoeff() < radius;
}

bool RemovedSquare::covers(const Box & b) const
{
  return ((b.lo - center).array() > -radius).all() && ((b.hi - center).array() < radius).all();
}

bool RemovedSquare::disjoint(const Box & b) const
{
  return ((b.hi - center).array() <= -radius).any() || ((b.lo - center).array() >= radius).any();
}

void RegionSet::remove(const Eigen::VectorXd & center, double radius)
{
  if (!(radius > 0)) { throw DomainError("removed square needs a positive radius"); }
  if (center.size() != dim()) { throw DimensionError("removed square center has the wrong dimension"); }
  removed_.push_back({center, radius});
}

RegionSet RegionSet::without(const Eigen::VectorXd & center, double radius) const
{
  RegionSet out = *this;
  out.remove(center, radius);
  return out;
}

bool RegionSet::contains(const Eigen::VectorXd & p) const
{
  if (!base_.contains(p)) { return false; }
  return std::none_of(removed_.begin(), removed_.end(), [&](const RemovedSquare & s) { return s.contains(p); });
}

bool RegionSet::covered(const Box & b) const
{
  return std::any_of(removed_.begin(), removed_.end(), [&](const RemovedSquare & s) { return s.covers(b); });
}

std::vector<std::size_t> RegionSet::overlapping(const Box & b, const std::vector<std::size_t> * candidates) const
{
  std::vector<std::size_t> out;
  auto consider = [&](std::size_t i) {
    if (!removed_[i].disjoint(b)) { out.push_back(i); }
  };
  if (candidates) {
    for (std::size_t i : *candidates) { consider(i); }
  } else {
    for (std::size_t i = 0; i < removed_.size(); ++i) { consider(i); }
  }
  return out;
}

namespace {

bool free_of(const std::vector<RemovedSquare> & sq, const std::vector<std::size_t> & idx, const Eigen::VectorXd & p)
{
  return std::none_of(idx.begin(), idx.end(), [&](std::size_t i) { return sq[i].contains(p); });
}

bool covered_by(const std::vector<RemovedSquare> & sq, const std::vector<std::size_t> & idx, const Box & b)
{
  return std::any_of(idx.begin(), idx.end(), [&](std::size_t i) { return sq[i].covers(b); });
}

// Cells of b cut along every face of the squares in idx. Each open cell lies
// either inside or outside every square, so its center decides it.
class FaceGrid
{
public:
  static constexpr std::size_t kMaxCells = 4096;

  FaceGrid(const RegionSet & rs, const Box & b, const std::vector<std::size_t> & idx) : rs_(rs), idx_(idx)
  {
    cuts_.resize(static_cast<std::size_t>(b.dim()));
    std::size_t cells = 1;
    for (Eigen::Index i = 0; i < b.dim(); ++i) {
      auto & c = cuts_[static_cast<std::size_t>(i)];
      c = {b.lo(i), b.hi(i)};
      for (std::size_t k : idx) {
        const auto & sq = rs.removed()[k];
        for (double v : {sq.center(i) - sq.radius, sq.center(i) + sq.radius}) {
          if (v > b.lo(i) && v < b.hi(i)) { c.push_back(v); }
        }
      }
      std::sort(c.begin(), c.end());
      c.erase(std::unique(c.begin(), c.end()), c.end());
      cells *= std::max<std::size_t>(c.size() - 1, 1);
      if (cells > kMaxCells) {
        usable_ = false;
        return;
      }
    }
  }

  bool usable() const { return usable_; }

  /// Calls visit(center, volume) on each uncovered cell in lexicographic order until it returns false.
  template<typename Visit>
  void for_each_free(Visit visit) const
  {
    const std::size_t d = cuts_.size();
    std::vector<std::size_t> at(d, 0);
    Eigen::VectorXd c(static_cast<Eigen::Index>(d));
    while (true) {
      double vol = 1;
      for (std::size_t i = 0; i < d; ++i) {
        const auto & cut = cuts_[i];
        if (cut.size() == 1) {
          c(static_cast<Eigen::Index>(i)) = cut[0];
          vol = 0;
        } else {
          c(static_cast<Eigen::Index>(i)) = 0.5 * (cut[at[i]] + cut[at[i] + 1]);
          vol *= cut[at[i] + 1] - cut[at[i]];
        }
      }
      if (free_of(rs_.removed(), idx_, c) && !visit(c, vol)) { return; }
      std::size_t i = d;
      while (true) {
        if (i == 0) { return; }
        --i;
        if (at[i] + 2 < cuts_[i].size()) {
          ++at[i];
          break;
        }
        at[i] = 0;
      }
    }
  }

private:
  const RegionSet & rs_;
  const std::vector<std::size_t> & idx_;
  std::vector<std::vector<double>> cuts_;
  bool usable_ = true;
};

std::optional<Eigen::VectorXd> search(const RegionSet & rs, const Box & b, const std::vector<std::size_t> & idx,
                                      double min_gap)
{
  const Eigen::VectorXd c = b.center();
  if (free_of(rs.removed(), idx, c)) { return c; }
  if (covered_by(rs.removed(), idx, b)) { return std::nullopt; }
  FaceGrid grid(rs, b, idx);
  if (grid.usable()) {
    std::optional<Eigen::VectorXd> hit;
    grid.for_each_free([&](const Eigen::VectorXd & p, double) {
      hit = p;
      return false;
    });
    return hit;
  }
  const Eigen::Index d = b.widest();
  if (d < 0 || b.width(d) < min_gap) { return std::nullopt; }
  auto [lower, upper] = b.split(d);
  for (const Box * child : {&lower, &upper}) {
    auto sub = rs.overlapping(*child, &idx);
    if (auto p = search(rs, *child, sub, min_gap)) { return p; }
  }
  return std::nullopt;
}

void measure(const RegionSet & rs, const Box & b, const std::vector<std::size_t> & idx, int depth, double & lower,
             double & upper)
{
  if (idx.empty()) {
    lower += b.volume();
    upper += b.volume();
    return;
  }
  if (covered_by(rs.removed(), idx, b)) { return; }
  FaceGrid grid(rs, b, idx);
  if (grid.usable()) {
    grid.for_each_free([&](const Eigen::VectorXd &, double vol) {
      lower += vol;
      upper += vol;
      return true;
    });
    return;
  }
  const Eigen::Index d = b.widest();
  if (depth == 0 || d < 0) {
    upper += b.volume();
    return;
  }
  auto [lo_box, hi_box] = b.split(d);
  measure(rs, lo_box, rs.overlapping(lo_box, &idx), depth - 1, lower, upper);
  measure(rs, hi_box, rs.overlapping(hi_box, &idx), depth - 1, lower, upper);
}

}  // namespace

std::optional<Eigen::VectorXd> RegionSet::find_point(double min_gap) const
{
  if (!(min_gap > 0)) { throw DomainError("find_point needs a positive min_gap"); }
  return search(*this, base_, overlapping(base_), min_gap);
}

std::optional<Eigen::VectorXd> RegionSet::find_point_in(const Box & within, double min_gap) const
{
  if (!(min_gap > 0)) { throw DomainError("find_point needs a positive min_gap"); }
  return search(*this, within, overlapping(within), min_gap);
}

std::pair<double, double> RegionSet::remaining_measure_bounds(int depth) const
{
  if (depth < 0) { throw DomainError("negative subdivision depth"); }
  double lower = 0, upper = 0;
  measure(*this, base_, overlapping(base_), depth, lower, upper);
  return {lower, upper};
}

}  // namespace reactsynth

#pragma once

// Occupancy-grid workspace: free space, obstacle interiors, their boundary
// and the outer wall frame, plus the geometric queries built on top.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>
#include <string>
#include <variant>
#include <vector>

#include "wavepursuit/error.hpp"
#include "wavepursuit/grid.hpp"
#include "wavepursuit/vec2.hpp"

namespace wavepursuit {

enum class CellClass : std::uint8_t { Free, Obstacle, Boundary, OuterWall };

/// Axis-aligned rectangle [min.x, max.x] x [min.y, max.y] in meters.
struct Rect {
  Vec2 min;
  Vec2 max;
  friend constexpr bool operator==(const Rect&, const Rect&) = default;
};

struct Circle {
  Vec2 center;
  double radius = 0.0;
  friend constexpr bool operator==(const Circle&, const Circle&) = default;
};

using Shape = std::variant<Rect, Circle>;

inline bool contains(const Shape& shape, const Vec2& p) {
  if (const auto* r = std::get_if<Rect>(&shape)) {
    return p.x >= r->min.x && p.x <= r->max.x && p.y >= r->min.y && p.y <= r->max.y;
  }
  const auto& c = std::get<Circle>(shape);
  return norm2(p - c.center) <= c.radius * c.radius;
}

/// Signed distance to the shape surface: negative inside, zero on the surface.
inline double signed_distance(const Shape& shape, const Vec2& p) {
  if (const auto* r = std::get_if<Rect>(&shape)) {
    const Vec2 center = (r->min + r->max) * 0.5;
    const Vec2 half = (r->max - r->min) * 0.5;
    const double qx = std::abs(p.x - center.x) - half.x;
    const double qy = std::abs(p.y - center.y) - half.y;
    const double outside = std::hypot(std::max(qx, 0.0), std::max(qy, 0.0));
    const double inside = std::min(std::max(qx, qy), 0.0);
    return outside + inside;
  }
  const auto& c = std::get<Circle>(shape);
  return norm(p - c.center) - c.radius;
}

struct EnvironmentSpec {
  double width = 0.0;      // m
  double height = 0.0;     // m
  double cell_size = 0.0;  // m
  std::vector<Shape> obstacles;
};

/// Immutable once built. Interior cells are indexed 1..nx, 1..ny; indices 0 and
/// n+1 form the one-cell outer wall frame that sits just outside the workspace.
class Environment {
 public:
  double width() const { return width_; }
  double height() const { return height_; }
  double cell_size() const { return h_; }
  /// Number of interior (workspace) cells along x and y.
  int interior_nx() const { return cells_.nx() - 2; }
  int interior_ny() const { return cells_.ny() - 2; }
  const Grid<CellClass>& cells() const { return cells_; }
  const std::vector<Shape>& obstacles() const { return shapes_; }
  double diagonal() const { return std::hypot(width_, height_); }

  CellClass cell(CellIndex c) const { return cells_[c]; }
  bool is_free(CellIndex c) const { return cells_.contains(c.i, c.j) && cells_[c] == CellClass::Free; }
  /// True for the outer wall frame (whether classified Boundary or OuterWall).
  bool is_frame(CellIndex c) const {
    return c.i == 0 || c.j == 0 || c.i == cells_.nx() - 1 || c.j == cells_.ny() - 1;
  }

  Vec2 cell_center(CellIndex c) const { return Vec2{(c.i - 0.5) * h_, (c.j - 0.5) * h_}; }

  bool in_workspace(const Vec2& p) const {
    return p.x >= 0.0 && p.y >= 0.0 && p.x <= width_ && p.y <= height_;
  }

  /// Cell containing p. Points on a cell edge go to the lower index. Points
  /// outside the workspace are clamped into the frame.
  CellIndex cell_of(const Vec2& p) const {
    const auto axis = [this](double v, int n) {
      const int k = static_cast<int>(std::ceil(v / h_));
      return std::clamp(k, 0, n + 1);
    };
    return CellIndex{axis(p.x, interior_nx()), axis(p.y, interior_ny())};
  }

  std::vector<CellIndex> free_cells() const {
    std::vector<CellIndex> out;
    for (int j = 0; j < cells_.ny(); ++j) {
      for (int i = 0; i < cells_.nx(); ++i) {
        if (cells_(i, j) == CellClass::Free) out.push_back({i, j});
      }
    }
    return out;
  }

  friend Environment build_environment(const EnvironmentSpec& spec);

 private:
  double width_ = 0.0;
  double height_ = 0.0;
  double h_ = 0.0;
  Grid<CellClass> cells_;
  std::vector<Shape> shapes_;
};

namespace detail {

inline int cells_along(double extent, double h, const char* what) {
  const double ratio = extent / h;
  const double rounded = std::round(ratio);
  if (std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio) || rounded < 1.0) {
    throw Error(ErrorCode::InvalidDimensions,
                std::string(what) + " must be a positive integer multiple of the cell size");
  }
  return static_cast<int>(rounded);
}

inline bool shape_in_bounds(const Shape& s, double w, double h) {
  if (const auto* r = std::get_if<Rect>(&s)) {
    return r->min.x >= 0.0 && r->min.y >= 0.0 && r->max.x <= w && r->max.y <= h &&
           r->min.x <= r->max.x && r->min.y <= r->max.y;
  }
  const auto& c = std::get<Circle>(s);
  return c.radius > 0.0 && c.center.x - c.radius >= 0.0 && c.center.y - c.radius >= 0.0 &&
         c.center.x + c.radius <= w && c.center.y + c.radius <= h;
}

/// Boundary = non-free cell with a 4-connected free neighbour.
inline void classify_boundary(Grid<CellClass>& cells) {
  Grid<CellClass> out = cells;
  for (int j = 0; j < cells.ny(); ++j) {
    for (int i = 0; i < cells.nx(); ++i) {
      if (cells(i, j) == CellClass::Free) continue;
      // Reclassification starts from the raw class so it stays idempotent.
      const bool frame = i == 0 || j == 0 || i == cells.nx() - 1 || j == cells.ny() - 1;
      CellClass raw = frame ? CellClass::OuterWall : CellClass::Obstacle;
      for (const auto& d : kNeighbors4) {
        const int ni = i + d.i;
        const int nj = j + d.j;
        if (cells.contains(ni, nj) && cells(ni, nj) == CellClass::Free) {
          raw = CellClass::Boundary;
          break;
        }
      }
      out(i, j) = raw;
    }
  }
  cells = std::move(out);
}

}  // namespace detail

/// Number of 4-connected components of the free region.
inline int count_free_components(const Grid<CellClass>& cells) {
  Grid<std::uint8_t> seen(cells.nx(), cells.ny(), 0);
  int components = 0;
  std::queue<CellIndex> frontier;
  for (int j = 0; j < cells.ny(); ++j) {
    for (int i = 0; i < cells.nx(); ++i) {
      if (cells(i, j) != CellClass::Free || seen(i, j)) continue;
      ++components;
      seen(i, j) = 1;
      frontier.push({i, j});
      while (!frontier.empty()) {
        const CellIndex c = frontier.front();
        frontier.pop();
        for (const auto& d : kNeighbors4) {
          const int ni = c.i + d.i;
          const int nj = c.j + d.j;
          if (cells.contains(ni, nj) && cells(ni, nj) == CellClass::Free && !seen(ni, nj)) {
            seen(ni, nj) = 1;
            frontier.push({ni, nj});
          }
        }
      }
    }
  }
  return components;
}

inline Environment build_environment(const EnvironmentSpec& spec) {
  if (!(spec.cell_size > 0.0)) {
    throw Error(ErrorCode::NonPositiveCellSize, "cell size must be > 0");
  }
  if (!(spec.width > 0.0) || !(spec.height > 0.0)) {
    throw Error(ErrorCode::InvalidDimensions, "workspace width and height must be > 0");
  }
  const int nx = detail::cells_along(spec.width, spec.cell_size, "width");
  const int ny = detail::cells_along(spec.height, spec.cell_size, "height");
  for (std::size_t k = 0; k < spec.obstacles.size(); ++k) {
    if (!detail::shape_in_bounds(spec.obstacles[k], spec.width, spec.height)) {
      throw Error(ErrorCode::ShapeOutOfBounds, "obstacle #" + std::to_string(k) + " leaves the workspace");
    }
  }

  Environment env;
  env.width_ = spec.width;
  env.height_ = spec.height;
  env.h_ = spec.cell_size;
  env.shapes_ = spec.obstacles;
  env.cells_ = Grid<CellClass>(nx + 2, ny + 2, CellClass::OuterWall);
  for (int j = 1; j <= ny; ++j) {
    for (int i = 1; i <= nx; ++i) {
      const Vec2 c = env.cell_center({i, j});
      const bool blocked = std::any_of(spec.obstacles.begin(), spec.obstacles.end(),
                                       [&](const Shape& s) { return contains(s, c); });
      env.cells_(i, j) = blocked ? CellClass::Obstacle : CellClass::Free;
    }
  }
  detail::classify_boundary(env.cells_);

  const int components = count_free_components(env.cells_);
  if (components != 1) {
    throw Error(ErrorCode::DisconnectedFreeSpace,
                "free region has " + std::to_string(components) + " connected components");
  }
  return env;
}

/// Re-runs boundary detection on an already classified grid.
inline Grid<CellClass> reclassify(const Grid<CellClass>& cells) {
  Grid<CellClass> out = cells;
  detail::classify_boundary(out);
  return out;
}

inline CellClass classify_point(const Environment& env, const Vec2& p) {
  if (!env.in_workspace(p)) throw Error(ErrorCode::OutOfBounds, "point outside the workspace");
  return env.cell(env.cell_of(p));
}

/// Unit normal at a boundary cell pointing into free space: the normalized sum
/// of the offsets towards its 4-connected free neighbours.
inline Vec2 boundary_normal(const Environment& env, CellIndex cell) {
  if (!env.cells().contains(cell.i, cell.j) || env.cell(cell) != CellClass::Boundary) {
    throw Error(ErrorCode::NotBoundaryCell, "cell (" + std::to_string(cell.i) + ", " +
                                                std::to_string(cell.j) + ") is not a boundary cell");
  }
  Vec2 sum;
  for (const auto& d : kNeighbors4) {
    if (env.is_free({cell.i + d.i, cell.j + d.j})) sum += Vec2{double(d.i), double(d.j)};
  }
  const double len = norm(sum);
  if (len == 0.0) {
    throw Error(ErrorCode::DegenerateNormal, "free-neighbour offsets cancel at cell (" +
                                                 std::to_string(cell.i) + ", " + std::to_string(cell.j) + ")");
  }
  return sum / len;
}

/// Distance from p to the nearest obstacle surface or outer wall; positive in
/// free space, non-positive inside an obstacle.
inline double signed_clearance(const Environment& env, const Vec2& p) {
  if (!env.in_workspace(p)) throw Error(ErrorCode::OutOfBounds, "point outside the workspace");
  double d = std::min({p.x, env.width() - p.x, p.y, env.height() - p.y});
  for (const auto& s : env.obstacles()) d = std::min(d, signed_distance(s, p));
  return d;
}

}  // namespace wavepursuit

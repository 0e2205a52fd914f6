#pragma once

#include <algorithm>
#include <cassert>
#include <cstddef>
#include <vector>

namespace wavepursuit {

/// Integer cell coordinate. `i` grows with x, `j` grows with y.
struct CellIndex {
  int i = 0;
  int j = 0;
  friend constexpr bool operator==(const CellIndex&, const CellIndex&) = default;
};

/// Dense row-major 2-D array (rows are constant j).
template <typename T>
class Grid {
 public:
  Grid() = default;
  Grid(int nx, int ny, const T& fill = T{})
      : nx_(nx), ny_(ny), data_(static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny), fill) {}

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  std::size_t size() const { return data_.size(); }

  bool contains(int i, int j) const { return i >= 0 && j >= 0 && i < nx_ && j < ny_; }
  std::size_t index(int i, int j) const {
    assert(contains(i, j));
    return static_cast<std::size_t>(j) * static_cast<std::size_t>(nx_) + static_cast<std::size_t>(i);
  }

  T& operator()(int i, int j) { return data_[index(i, j)]; }
  const T& operator()(int i, int j) const { return data_[index(i, j)]; }
  T& operator[](CellIndex c) { return (*this)(c.i, c.j); }
  const T& operator[](CellIndex c) const { return (*this)(c.i, c.j); }

  std::vector<T>& data() { return data_; }
  const std::vector<T>& data() const { return data_; }

  void fill(const T& v) { std::fill(data_.begin(), data_.end(), v); }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  int nx_ = 0;
  int ny_ = 0;
  std::vector<T> data_;
};

inline constexpr CellIndex kNeighbors4[4] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};

}  // namespace wavepursuit

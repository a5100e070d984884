#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace chemochip {

enum class Species { T = 0, M = 1, Phi = 2, Omega = 3 };

inline constexpr std::array<Species, 4> all_species{Species::T, Species::M, Species::Phi,
                                                    Species::Omega};

inline constexpr std::string_view species_name(Species s) {
  switch (s) {
    case Species::T: return "T";
    case Species::M: return "M";
    case Species::Phi: return "phi";
    case Species::Omega: return "omega";
  }
  return "?";
}

inline Species species_from_name(std::string_view name) {
  for (Species s : all_species)
    if (species_name(s) == name) return s;
  throw std::invalid_argument("unknown species '" + std::string(name) + "'");
}

/// Cell populations move by chemotaxis and may use the hyperbolic channel model.
inline constexpr bool is_cell_species(Species s) { return s == Species::T || s == Species::M; }

/// Nodal values on a chamber grid, nodes (i, j) with i = 0..nx+1, j = 0..ny+1.
class Field2D {
 public:
  Field2D() = default;
  Field2D(std::size_t nx, std::size_t ny, double value = 0.0)
      : nx_(nx), ny_(ny), data_((nx + 2) * (ny + 2), value) {}

  std::size_t nx() const { return nx_; }
  std::size_t ny() const { return ny_; }
  std::size_t extent_x() const { return nx_ + 2; }
  std::size_t extent_y() const { return ny_ + 2; }
  std::size_t size() const { return data_.size(); }

  std::size_t index(std::size_t i, std::size_t j) const { return i * (ny_ + 2) + j; }

  double& operator()(std::size_t i, std::size_t j) { return data_[index(i, j)]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[index(i, j)]; }

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }

  void fill(double v) { std::fill(data_.begin(), data_.end(), v); }

  bool operator==(const Field2D&) const = default;

 private:
  std::size_t nx_ = 0;
  std::size_t ny_ = 0;
  std::vector<double> data_;
};

/// Nodal values on a channel, nodes i = 0..n+1.
class Field1D {
 public:
  Field1D() = default;
  explicit Field1D(std::size_t n, double value = 0.0) : n_(n), data_(n + 2, value) {}

  std::size_t n() const { return n_; }
  std::size_t size() const { return data_.size(); }

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }

  void fill(double v) { std::fill(data_.begin(), data_.end(), v); }

  bool operator==(const Field1D&) const = default;

 private:
  std::size_t n_ = 0;
  std::vector<double> data_;
};

}  // namespace chemochip

namespace chemochip {

/// Centered first difference in x, one-sided first order on the outer columns.
inline double diff_x(const Field2D& u, std::size_t i, std::size_t j, double dx) {
  const std::size_t last = u.extent_x() - 1;
  if (i == 0) return (u(1, j) - u(0, j)) / dx;
  if (i == last) return (u(last, j) - u(last - 1, j)) / dx;
  return (u(i + 1, j) - u(i - 1, j)) / (2.0 * dx);
}

inline double diff_y(const Field2D& u, std::size_t i, std::size_t j, double dy) {
  const std::size_t last = u.extent_y() - 1;
  if (j == 0) return (u(i, 1) - u(i, 0)) / dy;
  if (j == last) return (u(i, last) - u(i, last - 1)) / dy;
  return (u(i, j + 1) - u(i, j - 1)) / (2.0 * dy);
}

inline double diff_1d(const Field1D& u, std::size_t i, double dx) {
  const std::size_t last = u.size() - 1;
  if (i == 0) return (u[1] - u[0]) / dx;
  if (i == last) return (u[last] - u[last - 1]) / dx;
  return (u[i + 1] - u[i - 1]) / (2.0 * dx);
}

}  // namespace chemochip

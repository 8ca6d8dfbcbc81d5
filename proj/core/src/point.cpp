#include "kdetrack/point.hpp"

#include <cmath>
#include <sstream>

#include "kdetrack/errors.hpp"

namespace kdetrack {

bool Point::is_finite() const noexcept {
  for (double c : coords_) {
    if (!std::isfinite(c)) return false;
  }
  return true;
}

double Point::norm() const noexcept {
  double s = 0.0;
  for (double c : coords_) s += c * c;
  return std::sqrt(s);
}

Point& Point::operator+=(const Point& other) {
  require_dimension(dim(), other.dim(), "Point::operator+=");
  for (std::size_t i = 0; i < coords_.size(); ++i) coords_[i] += other.coords_[i];
  return *this;
}

Point& Point::operator-=(const Point& other) {
  require_dimension(dim(), other.dim(), "Point::operator-=");
  for (std::size_t i = 0; i < coords_.size(); ++i) coords_[i] -= other.coords_[i];
  return *this;
}

Point& Point::operator*=(double s) noexcept {
  for (double& c : coords_) c *= s;
  return *this;
}

Point operator+(Point a, const Point& b) { return a += b; }
Point operator-(Point a, const Point& b) { return a -= b; }
Point operator*(Point a, double s) { return a *= s; }
Point operator*(double s, Point a) { return a *= s; }

double euclidean(std::span<const double> a, std::span<const double> b) {
  require_dimension(a.size(), b.size(), "euclidean");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

std::string to_string(const Point& p) {
  std::ostringstream out;
  out << '(';
  for (std::size_t i = 0; i < p.dim(); ++i) {
    if (i) out << ", ";
    out << p[i];
  }
  out << ')';
  return out.str();
}

}  // namespace kdetrack

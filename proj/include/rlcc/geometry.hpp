#pragma once

// Points, lines and planes of F^m.
//
// Plane-local coordinates: position (j, k) of a plane is
//   anchor + elem(j) * dir1 + elem(k) * dir2,
// with j, k integer codes, enumerated row-major (grid index j*n + k). The
// anchor line Line(anchor, dir1) is the column k = 0.

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rlcc/field.hpp"
#include "rlcc/rng.hpp"

namespace rlcc {

class GeometryError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Point {
  static constexpr unsigned kMaxDim = 8;

  std::array<FieldElem, kMaxDim> c{};
  unsigned dim = 0;

  static Point zero(unsigned m) {
    Point p;
    p.dim = m;
    return p;
  }
  static Point from(std::span<const FieldElem> coords);

  unsigned size() const { return dim; }
  FieldElem operator[](unsigned i) const { return c[i]; }
  FieldElem& operator[](unsigned i) { return c[i]; }
  std::span<const FieldElem> coords() const { return {c.data(), dim}; }
  bool is_zero() const;

  friend bool operator==(const Point& a, const Point& b);
};

Point add(const FieldCtx& ctx, const Point& a, const Point& b);
Point sub(const FieldCtx& ctx, const Point& a, const Point& b);
Point scale(const FieldCtx& ctx, FieldElem lambda, const Point& a);
// a + lambda * b
Point axpy(const FieldCtx& ctx, const Point& a, FieldElem lambda, const Point& b);

// n^m, or GeometryError when it does not fit in 64 bits.
std::uint64_t point_space_size(const FieldCtx& ctx, unsigned m);
// Lexicographic code: the first coordinate is most significant.
std::uint64_t point_code(const FieldCtx& ctx, const Point& x);
Point point_from_code(const FieldCtx& ctx, unsigned m, std::uint64_t code);

bool is_h_vector(const FieldCtx& ctx, const Point& x);
// Base-p lexicographic code of a vector in H^m.
std::uint64_t h_vector_code(const FieldCtx& ctx, const Point& x);
Point h_vector_from_code(const FieldCtx& ctx, unsigned m, std::uint64_t code);

// dir1 != 0, dir2 != 0 and dir2 not in F*dir1.
bool is_rank2(const FieldCtx& ctx, const Point& dir1, const Point& dir2);

struct LineRep {
  Point anchor;
  Point dir;
};

struct PlaneRep {
  Point anchor;
  Point dir1;
  Point dir2;
  std::array<bool, 2> h_flags{};  // whether dir1 / dir2 lie in the embedded H^m

  bool is_h_plane() const { return h_flags[0] && h_flags[1]; }
  LineRep anchor_line() const { return {anchor, dir1}; }
};

PlaneRep make_plane(const FieldCtx& ctx, const Point& anchor, const Point& dir1, const Point& dir2);

Point line_point(const FieldCtx& ctx, const LineRep& line, FieldElem t);
std::vector<Point> line_points(const FieldCtx& ctx, const LineRep& line);

Point plane_point(const FieldCtx& ctx, const PlaneRep& plane, FieldElem t, FieldElem s);
std::vector<Point> plane_points(const FieldCtx& ctx, const PlaneRep& plane);

// Plane-local coordinates (t, s) of x, if x lies on the (rank-2) plane.
std::optional<std::pair<FieldElem, FieldElem>> plane_coordinates(const FieldCtx& ctx,
                                                                 const PlaneRep& plane,
                                                                 const Point& x);

FieldElem sample_elem(const FieldCtx& ctx, Rng& rng);
Point sample_point(const FieldCtx& ctx, unsigned m, Rng& rng);
// Uniform over the p^m - 1 nonzero vectors of the embedded H^m.
Point sample_h_direction(const FieldCtx& ctx, unsigned m, Rng& rng);

enum class ProofRegion : std::uint8_t { point = 0, line = 1 };

struct PlaneKey {
  ProofRegion region = ProofRegion::point;
  std::uint64_t anchor = 0;  // point code
  std::uint64_t dir1 = 0;    // point code
  std::uint64_t dir2 = 0;    // point code

  friend auto operator<=>(const PlaneKey&, const PlaneKey&) = default;
};

struct PlaneKeyHash {
  std::size_t operator()(const PlaneKey& k) const {
    return static_cast<std::size_t>(splitmix64(splitmix64(splitmix64(k.anchor) ^ k.dir1) ^ k.dir2) +
                                    static_cast<std::uint64_t>(k.region));
  }
};

struct KeyedPlane {
  PlaneKey key;
  // dir1 of the keyed parameterization equals lambda * (input dir1).
  FieldElem lambda;
  PlaneRep plane;
};

// Line-region keys normalise dir1 to its projective representative (first
// nonzero coordinate 1). Point-region keys keep both H^m directions as given,
// since the point-proof region stores one proof per H^m direction pair.
KeyedPlane canonical_plane_key(const FieldCtx& ctx, const PlaneRep& plane, ProofRegion region);
PlaneRep plane_from_key(const FieldCtx& ctx, unsigned m, const PlaneKey& key);

// Plane-local first coordinate under the keyed parameterization: t' = t / lambda.
FieldElem keyed_coordinate(const FieldCtx& ctx, const KeyedPlane& keyed, FieldElem t);

std::string format_point(const Point& x);
Point parse_point(const FieldCtx& ctx, std::string_view text);
std::string format_plane(const PlaneRep& plane);

}  // namespace rlcc

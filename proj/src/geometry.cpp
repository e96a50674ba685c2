#include "rlcc/geometry.hpp"

#include <charconv>
#include <limits>

namespace rlcc {

Point Point::from(std::span<const FieldElem> coords) {
  if (coords.size() > kMaxDim) throw GeometryError("dimension exceeds 8");
  Point p;
  p.dim = static_cast<unsigned>(coords.size());
  for (unsigned i = 0; i < p.dim; ++i) p.c[i] = coords[i];
  return p;
}

bool Point::is_zero() const {
  for (unsigned i = 0; i < dim; ++i) {
    if (!c[i].is_zero()) return false;
  }
  return true;
}

bool operator==(const Point& a, const Point& b) {
  if (a.dim != b.dim) return false;
  for (unsigned i = 0; i < a.dim; ++i) {
    if (a.c[i] != b.c[i]) return false;
  }
  return true;
}

Point add(const FieldCtx& ctx, const Point& a, const Point& b) {
  Point out = Point::zero(a.dim);
  for (unsigned i = 0; i < a.dim; ++i) out.c[i] = ctx.add(a.c[i], b.c[i]);
  return out;
}

Point sub(const FieldCtx& ctx, const Point& a, const Point& b) {
  Point out = Point::zero(a.dim);
  for (unsigned i = 0; i < a.dim; ++i) out.c[i] = ctx.sub(a.c[i], b.c[i]);
  return out;
}

Point scale(const FieldCtx& ctx, FieldElem lambda, const Point& a) {
  Point out = Point::zero(a.dim);
  for (unsigned i = 0; i < a.dim; ++i) out.c[i] = ctx.mul(lambda, a.c[i]);
  return out;
}

Point axpy(const FieldCtx& ctx, const Point& a, FieldElem lambda, const Point& b) {
  Point out = Point::zero(a.dim);
  for (unsigned i = 0; i < a.dim; ++i) out.c[i] = ctx.add(a.c[i], ctx.mul(lambda, b.c[i]));
  return out;
}

std::uint64_t point_space_size(const FieldCtx& ctx, unsigned m) {
  unsigned __int128 total = 1;
  for (unsigned i = 0; i < m; ++i) {
    total *= ctx.n();
    if (total > std::numeric_limits<std::uint64_t>::max()) {
      throw GeometryError("point space F^m does not fit in 64-bit codes");
    }
  }
  return static_cast<std::uint64_t>(total);
}

std::uint64_t point_code(const FieldCtx& ctx, const Point& x) {
  std::uint64_t code = 0;
  for (unsigned i = 0; i < x.dim; ++i) code = code * ctx.n() + x.c[i].code;
  return code;
}

Point point_from_code(const FieldCtx& ctx, unsigned m, std::uint64_t code) {
  Point out = Point::zero(m);
  for (unsigned i = m; i-- > 0;) {
    out.c[i] = FieldElem{static_cast<std::uint32_t>(code % ctx.n())};
    code /= ctx.n();
  }
  if (code != 0) throw GeometryError("point code out of range");
  return out;
}

bool is_h_vector(const FieldCtx& ctx, const Point& x) {
  for (unsigned i = 0; i < x.dim; ++i) {
    if (!ctx.in_h(x.c[i])) return false;
  }
  return true;
}

std::uint64_t h_vector_code(const FieldCtx& ctx, const Point& x) {
  std::uint64_t code = 0;
  for (unsigned i = 0; i < x.dim; ++i) {
    if (!ctx.in_h(x.c[i])) throw GeometryError("vector is not in H^m");
    code = code * ctx.p() + x.c[i].code;
  }
  return code;
}

Point h_vector_from_code(const FieldCtx& ctx, unsigned m, std::uint64_t code) {
  Point out = Point::zero(m);
  for (unsigned i = m; i-- > 0;) {
    out.c[i] = FieldElem{static_cast<std::uint32_t>(code % ctx.p())};
    code /= ctx.p();
  }
  if (code != 0) throw GeometryError("H-vector code out of range");
  return out;
}

bool is_rank2(const FieldCtx& ctx, const Point& dir1, const Point& dir2) {
  if (dir1.is_zero() || dir2.is_zero()) return false;
  unsigned lead = 0;
  while (dir1.c[lead].is_zero()) ++lead;
  const FieldElem ratio = ctx.div(dir2.c[lead], dir1.c[lead]);
  for (unsigned i = 0; i < dir1.dim; ++i) {
    if (ctx.mul(ratio, dir1.c[i]) != dir2.c[i]) return true;
  }
  return false;
}

PlaneRep make_plane(const FieldCtx& ctx, const Point& anchor, const Point& dir1, const Point& dir2) {
  return PlaneRep{anchor, dir1, dir2, {is_h_vector(ctx, dir1), is_h_vector(ctx, dir2)}};
}

Point line_point(const FieldCtx& ctx, const LineRep& line, FieldElem t) {
  return axpy(ctx, line.anchor, t, line.dir);
}

std::vector<Point> line_points(const FieldCtx& ctx, const LineRep& line) {
  if (line.dir.is_zero()) throw GeometryError("line has zero direction");
  std::vector<Point> out;
  out.reserve(ctx.n());
  for (std::uint64_t j = 0; j < ctx.n(); ++j) {
    out.push_back(line_point(ctx, line, FieldElem{static_cast<std::uint32_t>(j)}));
  }
  return out;
}

Point plane_point(const FieldCtx& ctx, const PlaneRep& plane, FieldElem t, FieldElem s) {
  Point out = Point::zero(plane.anchor.dim);
  for (unsigned i = 0; i < out.dim; ++i) {
    out.c[i] = ctx.add(plane.anchor.c[i],
                       ctx.add(ctx.mul(t, plane.dir1.c[i]), ctx.mul(s, plane.dir2.c[i])));
  }
  return out;
}

std::vector<Point> plane_points(const FieldCtx& ctx, const PlaneRep& plane) {
  if (!is_rank2(ctx, plane.dir1, plane.dir2)) throw GeometryError("plane has rank < 2");
  const std::uint64_t n = ctx.n();
  std::vector<Point> out;
  out.reserve(n * n);
  for (std::uint64_t j = 0; j < n; ++j) {
    const Point row = axpy(ctx, plane.anchor, FieldElem{static_cast<std::uint32_t>(j)}, plane.dir1);
    for (std::uint64_t k = 0; k < n; ++k) {
      out.push_back(axpy(ctx, row, FieldElem{static_cast<std::uint32_t>(k)}, plane.dir2));
    }
  }
  return out;
}

std::optional<std::pair<FieldElem, FieldElem>> plane_coordinates(const FieldCtx& ctx,
                                                                 const PlaneRep& plane,
                                                                 const Point& x) {
  if (!is_rank2(ctx, plane.dir1, plane.dir2)) throw GeometryError("plane has rank < 2");
  const Point v = sub(ctx, x, plane.anchor);
  const unsigned m = v.dim;
  // Solve t*dir1 + s*dir2 = v: pick two rows whose 2x2 minor is invertible.
  for (unsigned a = 0; a < m; ++a) {
    for (unsigned b = a + 1; b < m; ++b) {
      const FieldElem det = ctx.sub(ctx.mul(plane.dir1.c[a], plane.dir2.c[b]),
                                    ctx.mul(plane.dir1.c[b], plane.dir2.c[a]));
      if (det.is_zero()) continue;
      const FieldElem det_inv = ctx.inv(det);
      const FieldElem t = ctx.mul(det_inv, ctx.sub(ctx.mul(v.c[a], plane.dir2.c[b]),
                                                   ctx.mul(v.c[b], plane.dir2.c[a])));
      const FieldElem s = ctx.mul(det_inv, ctx.sub(ctx.mul(plane.dir1.c[a], v.c[b]),
                                                   ctx.mul(plane.dir1.c[b], v.c[a])));
      if (plane_point(ctx, plane, t, s) == x) return std::make_pair(t, s);
      return std::nullopt;
    }
  }
  return std::nullopt;
}

FieldElem sample_elem(const FieldCtx& ctx, Rng& rng) {
  return FieldElem{static_cast<std::uint32_t>(rng.below(ctx.n()))};
}

Point sample_point(const FieldCtx& ctx, unsigned m, Rng& rng) {
  Point out = Point::zero(m);
  for (unsigned i = 0; i < m; ++i) out.c[i] = sample_elem(ctx, rng);
  return out;
}

Point sample_h_direction(const FieldCtx& ctx, unsigned m, Rng& rng) {
  std::uint64_t total = 1;
  for (unsigned i = 0; i < m; ++i) total *= ctx.p();
  return h_vector_from_code(ctx, m, 1 + rng.below(total - 1));
}

KeyedPlane canonical_plane_key(const FieldCtx& ctx, const PlaneRep& plane, ProofRegion region) {
  if (!is_rank2(ctx, plane.dir1, plane.dir2)) throw GeometryError("plane has rank < 2");
  FieldElem lambda = FieldCtx::one();
  Point dir1 = plane.dir1;
  if (region == ProofRegion::line) {
    unsigned lead = 0;
    while (dir1.c[lead].is_zero()) ++lead;
    lambda = ctx.inv(dir1.c[lead]);
    dir1 = scale(ctx, lambda, dir1);
  }
  KeyedPlane out;
  out.key = PlaneKey{region, point_code(ctx, plane.anchor), point_code(ctx, dir1),
                     point_code(ctx, plane.dir2)};
  out.lambda = lambda;
  out.plane = make_plane(ctx, plane.anchor, dir1, plane.dir2);
  return out;
}

PlaneRep plane_from_key(const FieldCtx& ctx, unsigned m, const PlaneKey& key) {
  return make_plane(ctx, point_from_code(ctx, m, key.anchor), point_from_code(ctx, m, key.dir1),
                    point_from_code(ctx, m, key.dir2));
}

FieldElem keyed_coordinate(const FieldCtx& ctx, const KeyedPlane& keyed, FieldElem t) {
  return ctx.div(t, keyed.lambda);
}

std::string format_point(const Point& x) {
  std::string out;
  for (unsigned i = 0; i < x.dim; ++i) {
    if (i) out += ',';
    out += std::to_string(x.c[i].code);
  }
  return out;
}

Point parse_point(const FieldCtx& ctx, std::string_view text) {
  Point out;
  while (true) {
    const auto comma = text.find(',');
    const auto part = text.substr(0, comma);
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
    if (ec != std::errc{} || ptr != part.data() + part.size() || part.empty()) {
      throw GeometryError("bad point coordinate '" + std::string(part) + "'");
    }
    if (out.dim == Point::kMaxDim) throw GeometryError("dimension exceeds 8");
    out.c[out.dim++] = ctx.elem(v);
    if (comma == std::string_view::npos) break;
    text = text.substr(comma + 1);
  }
  return out;
}

std::string format_plane(const PlaneRep& plane) {
  return format_point(plane.anchor) + "|" + format_point(plane.dir1) + "|" + format_point(plane.dir2);
}

}  // namespace rlcc

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>

namespace skymission {

/// Cartesian vector in metres (or metres per second for velocities).
/// x/y span the ground plane, z is up.
struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend bool operator==(const Vec3&, const Vec3&) = default;

  Vec3& operator+=(const Vec3& o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }
  Vec3& operator-=(const Vec3& o) {
    x -= o.x;
    y -= o.y;
    z -= o.z;
    return *this;
  }
  Vec3& operator*=(double k) {
    x *= k;
    y *= k;
    z *= k;
    return *this;
  }
};

inline Vec3 operator+(Vec3 a, const Vec3& b) { return a += b; }
inline Vec3 operator-(Vec3 a, const Vec3& b) { return a -= b; }
inline Vec3 operator*(Vec3 a, double k) { return a *= k; }
inline Vec3 operator*(double k, Vec3 a) { return a *= k; }

double dot(const Vec3& a, const Vec3& b);
double norm(const Vec3& v);
double distance(const Vec3& a, const Vec3& b);

using Point = Vec3;

/// Axis-aligned rectangle on the ground plane.
struct Rect {
  double x0 = 0.0;
  double y0 = 0.0;
  double x1 = 0.0;
  double y1 = 0.0;

  friend bool operator==(const Rect&, const Rect&) = default;

  bool contains(double x, double y) const { return x >= x0 && x <= x1 && y >= y0 && y <= y1; }
};

/// A literal written in mission source: parameter values and condition
/// reference values.
using Literal = std::variant<bool, double, std::string, Point, Rect>;

enum class LiteralKind { Bool, Number, Text, Point, Rect };

LiteralKind kind_of(const Literal& lit);
std::string_view to_string(LiteralKind kind);
std::optional<LiteralKind> literal_kind_from(std::string_view name);

/// Types of action results.
enum class ValueType { Bool, Number, Text, Image, PointCloud, Unit };

std::string_view to_string(ValueType type);
std::optional<ValueType> value_type_from(std::string_view name);

/// The value type a literal of the given kind denotes, if any. Points and
/// rectangles are parameter-only and have no result type.
std::optional<ValueType> value_type_of(LiteralKind kind);

struct UnitValue {
  friend bool operator==(const UnitValue&, const UnitValue&) = default;
};

/// Stand-in for sensor payloads (pictures, point clouds) the simulator does
/// not model: records where and when it was produced.
struct OpaqueValue {
  ValueType type = ValueType::Image;
  Point captured_at;
  int index = 0;
  std::string tag;

  friend bool operator==(const OpaqueValue&, const OpaqueValue&) = default;
};

/// A runtime action result.
using Value = std::variant<UnitValue, bool, double, std::string, OpaqueValue>;

ValueType type_of(const Value& value);

/// Shortest round-trip decimal form that always carries a fraction or
/// exponent: 10 -> "10.0", 0.8 -> "0.8".
std::string format_number(double value);

/// Double-quoted string with `\"`, `\\`, `\n`, `\t` escapes.
std::string quote(std::string_view text);

/// Literal in mission source syntax, e.g. `rect(0.0, 0.0, 20.0, 10.0)`.
std::string to_source(const Literal& lit);

/// Human/trace representation of a runtime value.
std::string describe(const Value& value);

}  // namespace skymission

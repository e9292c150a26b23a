#include "skymission/value.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <system_error>

namespace skymission {

double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }

double distance(const Vec3& a, const Vec3& b) { return norm(a - b); }

LiteralKind kind_of(const Literal& lit) { return static_cast<LiteralKind>(lit.index()); }

std::string_view to_string(LiteralKind kind) {
  switch (kind) {
    case LiteralKind::Bool: return "bool";
    case LiteralKind::Number: return "number";
    case LiteralKind::Text: return "text";
    case LiteralKind::Point: return "point";
    case LiteralKind::Rect: return "rect";
  }
  return "?";
}

std::optional<LiteralKind> literal_kind_from(std::string_view name) {
  for (auto k : {LiteralKind::Bool, LiteralKind::Number, LiteralKind::Text, LiteralKind::Point,
                 LiteralKind::Rect}) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

std::string_view to_string(ValueType type) {
  switch (type) {
    case ValueType::Bool: return "Bool";
    case ValueType::Number: return "Number";
    case ValueType::Text: return "Text";
    case ValueType::Image: return "Image";
    case ValueType::PointCloud: return "PointCloud";
    case ValueType::Unit: return "Unit";
  }
  return "?";
}

std::optional<ValueType> value_type_from(std::string_view name) {
  for (auto t : {ValueType::Bool, ValueType::Number, ValueType::Text, ValueType::Image,
                 ValueType::PointCloud, ValueType::Unit}) {
    auto canonical = to_string(t);
    if (canonical.size() != name.size()) continue;
    bool same = true;
    for (std::size_t i = 0; i < name.size(); ++i) {
      auto lower = [](char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; };
      if (lower(canonical[i]) != lower(name[i])) {
        same = false;
        break;
      }
    }
    if (same) return t;
  }
  return std::nullopt;
}

std::optional<ValueType> value_type_of(LiteralKind kind) {
  switch (kind) {
    case LiteralKind::Bool: return ValueType::Bool;
    case LiteralKind::Number: return ValueType::Number;
    case LiteralKind::Text: return ValueType::Text;
    default: return std::nullopt;
  }
}

ValueType type_of(const Value& value) {
  struct Visitor {
    ValueType operator()(const UnitValue&) const { return ValueType::Unit; }
    ValueType operator()(bool) const { return ValueType::Bool; }
    ValueType operator()(double) const { return ValueType::Number; }
    ValueType operator()(const std::string&) const { return ValueType::Text; }
    ValueType operator()(const OpaqueValue& o) const { return o.type; }
  };
  return std::visit(Visitor{}, value);
}

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (value == 0.0) value = 0.0;  // folds -0.0
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  std::string out(buf.data(), end);
  if (out.find_first_of(".e") == std::string::npos) out += ".0";
  return out;
}

std::string quote(std::string_view text) {
  std::string out;
  out.reserve(text.size() + 2);
  out += '"';
  for (char c : text) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  out += '"';
  return out;
}

std::string to_source(const Literal& lit) {
  struct Visitor {
    std::string operator()(bool b) const { return b ? "true" : "false"; }
    std::string operator()(double d) const { return format_number(d); }
    std::string operator()(const std::string& s) const { return quote(s); }
    std::string operator()(const Point& p) const {
      return "point(" + format_number(p.x) + ", " + format_number(p.y) + ", " + format_number(p.z) + ")";
    }
    std::string operator()(const Rect& r) const {
      return "rect(" + format_number(r.x0) + ", " + format_number(r.y0) + ", " + format_number(r.x1) +
             ", " + format_number(r.y1) + ")";
    }
  };
  return std::visit(Visitor{}, lit);
}

std::string describe(const Value& value) {
  struct Visitor {
    std::string operator()(const UnitValue&) const { return "unit"; }
    std::string operator()(bool b) const { return b ? "true" : "false"; }
    std::string operator()(double d) const { return format_number(d); }
    std::string operator()(const std::string& s) const { return quote(s); }
    std::string operator()(const OpaqueValue& o) const {
      std::string out = o.type == ValueType::Image ? "image#" : "pointcloud#";
      out += std::to_string(o.index);
      // Capture positions carry integration noise; millimetres are enough.
      auto coord = [](double c) { return format_number(std::round(c * 1e3) / 1e3 + 0.0); };
      out += "@(" + coord(o.captured_at.x) + "," + coord(o.captured_at.y) + "," + coord(o.captured_at.z) + ")";
      if (!o.tag.empty()) out += ":" + o.tag;
      return out;
    }
  };
  return std::visit(Visitor{}, value);
}

}  // namespace skymission

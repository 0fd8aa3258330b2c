#pragma once

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>

#include "ncvem/errors.hpp"
#include "ncvem/mesh.hpp"

namespace ncvem {

namespace detail {

inline std::string fmt17(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

inline int line_of_offset(const std::string& text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

[[noreturn]] inline void field_error(const std::string& field, const std::string& what) {
  fail(ErrorKind::ParseError, "field '" + field + "': " + what);
}

inline const nlohmann::json& require(const nlohmann::json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) field_error(where + "." + key, "missing");
  return obj.at(key);
}

inline double as_number(const nlohmann::json& j, const std::string& where) {
  if (!j.is_number()) field_error(where, "expected a number");
  return j.get<double>();
}

inline int as_index(const nlohmann::json& j, const std::string& where, std::size_t bound) {
  if (!j.is_number_integer()) field_error(where, "expected an integer index");
  const auto v = j.get<long long>();
  if (v < 0 || static_cast<std::size_t>(v) >= bound)
    field_error(where, "index " + std::to_string(v) + " out of range");
  return static_cast<int>(v);
}

}  // namespace detail

/// Serializes a mesh as JSON text with 17 significant digits.
inline std::string mesh_to_string(const Mesh& m) {
  using detail::fmt17;
  std::ostringstream os;
  os << "{\n  \"vertices\": [";
  for (std::size_t i = 0; i < m.vertices.size(); ++i)
    os << (i ? ",\n    " : "\n    ") << "[" << fmt17(m.vertices[i].x()) << ", " << fmt17(m.vertices[i].y()) << "]";
  os << "\n  ],\n  \"curves\": [";
  for (std::size_t i = 0; i < m.curves.size(); ++i) {
    os << (i ? ",\n    " : "\n    ") << "{\"name\": \"" << m.curves[i].name << "\", \"params\": [";
    for (std::size_t j = 0; j < m.curves[i].params.size(); ++j) os << (j ? ", " : "") << fmt17(m.curves[i].params[j]);
    os << "]}";
  }
  os << "\n  ],\n  \"edges\": [";
  for (std::size_t i = 0; i < m.edges.size(); ++i) {
    const Edge& e = m.edges[i];
    os << (i ? ",\n    " : "\n    ") << "{\"v\": [" << e.vertices[0] << ", " << e.vertices[1] << "], \"geometry\": ";
    if (e.is_curved())
      os << "{\"curve\": " << e.curve << ", \"t\": [" << fmt17(e.t_start) << ", " << fmt17(e.t_end) << "]}";
    else
      os << "\"straight\"";
    os << ", \"tag\": \"" << to_string(e.tag) << "\"}";
  }
  os << "\n  ],\n  \"cells\": [";
  for (std::size_t i = 0; i < m.cells.size(); ++i) {
    os << (i ? ",\n    " : "\n    ") << "[";
    for (std::size_t j = 0; j < m.cells[i].edges.size(); ++j) os << (j ? ", " : "") << m.cells[i].edges[j];
    os << "]";
  }
  os << "\n  ],\n  \"regions\": [";
  for (std::size_t i = 0; i < m.region_of_cell.size(); ++i) os << (i ? ", " : "") << m.region_of_cell[i];
  os << "]\n}\n";
  return os.str();
}

inline Mesh mesh_from_string(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorKind::ParseError, "line " + std::to_string(detail::line_of_offset(text, e.byte)) + ": " + e.what());
  }
  Mesh m;
  const auto& verts = detail::require(doc, "vertices", "mesh");
  if (!verts.is_array()) detail::field_error("vertices", "expected an array");
  for (std::size_t i = 0; i < verts.size(); ++i) {
    const std::string where = "vertices[" + std::to_string(i) + "]";
    if (!verts[i].is_array() || verts[i].size() != 2) detail::field_error(where, "expected [x, y]");
    m.vertices.emplace_back(detail::as_number(verts[i][0], where), detail::as_number(verts[i][1], where));
  }
  if (doc.contains("curves")) {
    const auto& curves = doc.at("curves");
    for (std::size_t i = 0; i < curves.size(); ++i) {
      const std::string where = "curves[" + std::to_string(i) + "]";
      const auto& name = detail::require(curves[i], "name", where);
      if (!name.is_string()) detail::field_error(where + ".name", "expected a string");
      std::vector<double> params;
      if (curves[i].contains("params"))
        for (const auto& p : curves[i].at("params")) params.push_back(detail::as_number(p, where + ".params"));
      try {
        m.curves.push_back(make_curve(name.get<std::string>(), params));
      } catch (const Error& e) {
        detail::field_error(where, e.what());
      }
    }
  }
  const auto& edges = detail::require(doc, "edges", "mesh");
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const std::string where = "edges[" + std::to_string(i) + "]";
    const auto& v = detail::require(edges[i], "v", where);
    if (!v.is_array() || v.size() != 2) detail::field_error(where + ".v", "expected [v0, v1]");
    Edge e;
    e.vertices = {detail::as_index(v[0], where + ".v[0]", m.vertices.size()),
                  detail::as_index(v[1], where + ".v[1]", m.vertices.size())};
    const auto& geo = detail::require(edges[i], "geometry", where);
    if (geo.is_string()) {
      if (geo.get<std::string>() != "straight") detail::field_error(where + ".geometry", "unknown geometry");
    } else {
      const auto& curve = detail::require(geo, "curve", where + ".geometry");
      if (!curve.is_number_integer() || curve.get<long long>() < 0 ||
          static_cast<std::size_t>(curve.get<long long>()) >= m.curves.size())
        detail::field_error(where + ".geometry.curve", "references a missing curve");
      e.curve = curve.get<int>();
      const auto& t = detail::require(geo, "t", where + ".geometry");
      if (!t.is_array() || t.size() != 2) detail::field_error(where + ".geometry.t", "expected [t_start, t_end]");
      e.t_start = detail::as_number(t[0], where + ".geometry.t");
      e.t_end = detail::as_number(t[1], where + ".geometry.t");
    }
    const auto& tag = detail::require(edges[i], "tag", where);
    const std::string tag_name = tag.is_string() ? tag.get<std::string>() : "";
    if (tag_name == "interior") e.tag = EdgeTag::Interior;
    else if (tag_name == "boundary") e.tag = EdgeTag::Boundary;
    else if (tag_name == "interface") e.tag = EdgeTag::Interface;
    else detail::field_error(where + ".tag", "unknown tag");
    m.edges.push_back(e);
  }
  const auto& cells = detail::require(doc, "cells", "mesh");
  if (!cells.is_array() || cells.empty()) fail(ErrorKind::ParseError, "empty mesh");
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const std::string where = "cells[" + std::to_string(c) + "]";
    if (!cells[c].is_array() || cells[c].size() < 3) detail::field_error(where, "expected a loop of >= 3 edges");
    Cell cell;
    for (std::size_t j = 0; j < cells[c].size(); ++j)
      cell.edges.push_back(detail::as_index(cells[c][j], where, m.edges.size()));
    const std::size_t n = cell.edges.size();
    for (std::size_t j = 0; j < n; ++j) {
      const Edge& e = m.edges[cell.edges[j]];
      const Edge& next = m.edges[cell.edges[(j + 1) % n]];
      const bool head_is_v1 = e.vertices[1] == next.vertices[0] || e.vertices[1] == next.vertices[1];
      const bool head_is_v0 = e.vertices[0] == next.vertices[0] || e.vertices[0] == next.vertices[1];
      if (!head_is_v0 && !head_is_v1) detail::field_error(where, "edge loop is not connected");
      cell.orientation.push_back(head_is_v1 ? 1 : -1);
    }
    m.cells.push_back(std::move(cell));
  }
  m.region_of_cell.assign(m.cells.size(), 1);
  if (doc.contains("regions")) {
    const auto& regions = doc.at("regions");
    if (!regions.is_array() || regions.size() != m.cells.size())
      detail::field_error("regions", "expected one label per cell");
    for (std::size_t c = 0; c < regions.size(); ++c) {
      if (!regions[c].is_number_integer()) detail::field_error("regions", "expected integers");
      m.region_of_cell[c] = regions[c].get<int>();
    }
  }
  try {
    m.finalize();
  } catch (const Error& e) {
    fail(ErrorKind::ParseError, e.what());
  }
  return m;
}

inline void write_mesh(const Mesh& m, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::IoError, "cannot open '" + path + "' for writing");
  out << mesh_to_string(m);
  if (!out) fail(ErrorKind::IoError, "failed writing '" + path + "'");
}

inline Mesh read_mesh(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::IoError, "cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return mesh_from_string(buf.str());
}

}  // namespace ncvem

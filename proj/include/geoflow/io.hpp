#pragma once

#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "grid.hpp"
#include "tensor.hpp"

namespace geoflow {

using Json = nlohmann::json;

/// Rejects keys of `obj` outside `allowed`.
inline void require_keys(const Json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!obj.is_object()) throw ValidationError(where + " must be a JSON object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!ok.count(it.key())) throw ValidationError("unknown key '" + it.key() + "' in " + where);
}

template <class T>
T get_or(const Json& obj, const char* key, const T& fallback) {
  if (!obj.contains(key) || obj.at(key).is_null()) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const Json::exception& e) {
    throw ValidationError(std::string("bad value for '") + key + "': " + e.what());
  }
}

template <class T>
T get_required(const Json& obj, const char* key) {
  if (!obj.contains(key)) throw ValidationError(std::string("missing required key '") + key + "'");
  return get_or<T>(obj, key, T{});
}

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ValidationError("invalid JSON in " + path + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------------------------
// Scalars and tensors

template <class S>
Json scalar_to_json(const S& v) {
  if constexpr (ScalarTraits<S>::exact) return ScalarTraits<S>::to_string(v);
  else return v;
}

template <class S>
S scalar_from_json(const Json& j) {
  if constexpr (ScalarTraits<S>::exact) {
    if (j.is_number_integer()) return S(j.get<long long>());
    if (!j.is_string()) throw ValidationError("exact scalars are integers or \"p/q\" strings");
    try {
      const S v = ScalarTraits<S>::parse(j.get<std::string>());
      return v;
    } catch (const std::exception&) {
      throw ValidationError("cannot parse rational '" + j.get<std::string>() + "'");
    }
  } else {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
      const auto s = j.get<std::string>();
      const auto slash = s.find('/');
      try {
        if (slash == std::string::npos) return std::stod(s);
        return std::stod(s.substr(0, slash)) / std::stod(s.substr(slash + 1));
      } catch (const std::exception&) {
        throw ValidationError("cannot parse number '" + s + "'");
      }
    }
    throw ValidationError("expected a number");
  }
}

/// {"dim", "rank", "symmetry", "entries": flat row-major array}.
template <class S>
Json tensor_to_json(const DenseTensor<S>& t) {
  Json e = Json::array();
  for (const auto& v : t.entries) e.push_back(scalar_to_json(v));
  return {{"dim", t.dim}, {"rank", t.rank}, {"symmetry", to_string(t.symmetry)}, {"entries", e}};
}

/// Accepts the dense layout above, or {"dim", "rank", "symmetry", "components": [{"index": [1-based], "value"}]}
/// where antisym/sym2 components are expanded over permutations.
template <class S>
DenseTensor<S> tensor_from_json(const Json& j) {
  require_keys(j, {"dim", "rank", "symmetry", "entries", "components"}, "tensor");
  const int dim = get_required<int>(j, "dim"), rank = get_required<int>(j, "rank");
  const Symmetry sym = symmetry_from_string(get_or<std::string>(j, "symmetry", "none"));
  DenseTensor<S> t(dim, rank, sym);
  if (j.contains("entries") == j.contains("components"))
    throw ValidationError("tensor needs exactly one of 'entries' or 'components'");
  if (j.contains("entries")) {
    const auto& e = j.at("entries");
    if (!e.is_array() || e.size() != t.size())
      throw ValidationError("tensor 'entries' must hold dim^rank = " + std::to_string(t.size()) + " values");
    for (std::size_t i = 0; i < t.size(); ++i) t.entries[i] = scalar_from_json<S>(e[i]);
  } else {
    for (const auto& c : j.at("components")) {
      require_keys(c, {"index", "value"}, "tensor component");
      Index idx = get_required<Index>(c, "index");
      if (static_cast<int>(idx.size()) != rank) throw ValidationError("component index has the wrong length");
      for (auto& i : idx) {
        if (i < 1 || i > dim) throw ValidationError("component index out of range (indices are 1-based)");
        --i;
      }
      const S v = scalar_from_json<S>(c.at("value"));
      if (sym == Symmetry::antisym) t.set_antisym(idx, v);
      else if (sym == Symmetry::sym2) t.set_sym(idx[0], idx[1], v);
      else t[idx] = v;
    }
  }
  t.validate();
  return t;
}

// ---------------------------------------------------------------------------------------------
// Grids: {"n", "shape", "periodic", "lo", "length", "fields": {name: flat array}}

inline Json geometry_to_json(const GridGeometry& geo) {
  return {{"n", geo.n}, {"shape", geo.shape}, {"periodic", geo.periodic}, {"lo", geo.lo}, {"length", geo.length}};
}

inline GridGeometry geometry_from_json(const Json& j) {
  GridGeometry g;
  g.n = get_required<int>(j, "n");
  g.shape = get_required<std::vector<int>>(j, "shape");
  g.periodic = get_or<bool>(j, "periodic", true);
  if (static_cast<int>(g.shape.size()) != g.n) throw ValidationError("grid 'shape' must have n entries");
  g.lo = get_or<std::vector<double>>(j, "lo", std::vector<double>(g.n, 0.0));
  g.length = get_or<std::vector<double>>(j, "length", std::vector<double>(g.n, 1.0));
  g.check();
  return g;
}

inline Json field_to_json(const Field& f) { return f.data; }

inline Field field_from_json(const Json& j, std::size_t nodes, int ncomp, const std::string& name) {
  if (!j.is_array() || j.size() != nodes * static_cast<std::size_t>(ncomp))
    throw ValidationError("field '" + name + "' must hold " + std::to_string(nodes * ncomp) + " values");
  Field f(nodes, ncomp);
  for (std::size_t i = 0; i < f.data.size(); ++i) {
    if (!j[i].is_number()) throw ValidationError("field '" + name + "' has a non-numeric entry");
    f.data[i] = j[i].get<double>();
  }
  return f;
}

inline Json grid_to_json(const GridGeometry& geo, const std::vector<std::pair<std::string, const Field*>>& fields) {
  Json j = geometry_to_json(geo);
  Json f = Json::object();
  for (const auto& [name, field] : fields) f[name] = field_to_json(*field);
  j["fields"] = f;
  return j;
}

/// Metric grid from JSON with field "g" and optional "g0", each n*n values per node.
inline MetricGrid metric_grid_from_json(const Json& j) {
  require_keys(j, {"n", "shape", "periodic", "lo", "length", "fields"}, "grid");
  const auto geo = geometry_from_json(j);
  const auto& fields = j.at("fields");
  require_keys(fields, {"g", "g0"}, "grid fields");
  if (!fields.contains("g")) throw ValidationError("grid needs field 'g'");
  const int c = geo.n * geo.n;
  Field g = field_from_json(fields.at("g"), geo.nodes(), c, "g");
  Field g0;
  if (fields.contains("g0")) g0 = field_from_json(fields.at("g0"), geo.nodes(), c, "g0");
  return MetricGrid(geo, std::move(g), std::move(g0));
}

// ---------------------------------------------------------------------------------------------
// CSV

/// Row-oriented CSV writer; doubles use 17 significant digits.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header) : cols_(header.size()) { row_strings(header); }

  CsvWriter& cell(const std::string& s) {
    cur_.push_back(s);
    return *this;
  }
  CsvWriter& cell(double v) { return cell(format_double(v)); }
  CsvWriter& cell(int v) { return cell(std::to_string(v)); }
  CsvWriter& cell(long v) { return cell(std::to_string(v)); }
  CsvWriter& cell(bool v) { return cell(std::string(v ? "true" : "false")); }
  void end_row() {
    if (cur_.size() != cols_) throw std::logic_error("CSV row has the wrong number of cells");
    row_strings(cur_);
    cur_.clear();
  }
  std::string str() const { return out_.str(); }

 private:
  void row_strings(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
    out_ << '\n';
  }
  std::size_t cols_;
  std::vector<std::string> cur_;
  std::ostringstream out_;
};

}  // namespace geoflow

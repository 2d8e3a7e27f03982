#include "orbitlift/io.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <sstream>

#include "orbitlift/error.hpp"

namespace orbitlift {

using json = nlohmann::json;

namespace {

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorKind::parse_error, e.what());
  }
}

template <class T>
T get(const json& j, const char* key) {
  if (!j.contains(key)) fail(ErrorKind::parse_error, std::string("missing key '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    fail(ErrorKind::parse_error, std::string("bad value for '") + key + "': " + e.what());
  }
}

QuadraticNumber exact_entry(const json& v, const GroundField& field) {
  auto rational = [](const json& x) {
    if (x.is_string()) return QuadraticNumber::parse(x.get<std::string>());
    if (x.is_number_integer()) return QuadraticNumber(x.get<long>());
    fail(ErrorKind::parse_error, "exact entries must be strings or integers");
  };
  if (v.is_array()) {
    if (v.size() != 2 || field.kind != FieldKind::quadratic)
      fail(ErrorKind::parse_error, "pair entries need a sqrt:D field");
    const QuadraticNumber a = rational(v[0]);
    const QuadraticNumber b = rational(v[1]);
    if (!a.is_rational() || !b.is_rational()) fail(ErrorKind::parse_error, "pair entries must be rational");
    return QuadraticNumber(a.rational_part(), b.rational_part(), field.radicand);
  }
  return rational(v);
}

double float_entry(const json& v) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) return parse_coefficient(v.get<std::string>());
  fail(ErrorKind::parse_error, "float entries must be numbers or strings");
}

json vector_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

json doubles_json(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(x);
  return a;
}

Curve::PolyComponent poly_component(const json& c) {
  Curve::PolyComponent out;
  for (const auto& term : c) {
    if (!term.is_array() || term.size() != 2) fail(ErrorKind::parse_error, "curve terms are [power, coefficient]");
    const int p = term[0].get<int>();
    if (p < 0) fail(ErrorKind::parse_error, "negative power in curve term");
    out.push_back({p, float_entry(term[1])});
  }
  return out;
}

std::vector<Curve::PolyComponent> poly_components(const json& j) {
  if (!j.is_array() || j.empty()) fail(ErrorKind::parse_error, "components must be a non-empty list");
  std::vector<Curve::PolyComponent> out;
  for (const auto& c : j) out.push_back(poly_component(c));
  return out;
}

int smoothness_of(const json& j) {
  if (!j.contains("smoothness")) return Curve::kSmooth;
  const auto& s = j.at("smoothness");
  if (s.is_string() && (s == "inf" || s == "infinity")) return Curve::kSmooth;
  if (!s.is_number_integer() || s.get<int>() < 0) fail(ErrorKind::parse_error, "smoothness must be a class index");
  return s.get<int>();
}

std::string csv_line(double t, const std::vector<const Eigen::VectorXd*>& parts, std::optional<double> tail) {
  std::string line = format_double(t);
  for (const auto* v : parts)
    for (Eigen::Index i = 0; i < v->size(); ++i) line += "," + format_double((*v)(i));
  if (tail) line += "," + format_double(*tail);
  return line + "\n";
}

template <class T>
json system_json(const GeneratorSystem<T>& s) {
  json j;
  j["nvars"] = s.nvars;
  j["degrees"] = s.degrees;
  j["norm_index"] = s.norm_index ? json(*s.norm_index) : json(nullptr);
  j["minimal"] = s.minimal;
  json gens = json::array();
  for (const auto& g : s.generators) {
    json terms = json::array();
    for (const auto& [e, c] : g.terms()) {
      const std::string coef = [&] {
        if constexpr (std::is_same_v<T, double>) return format_double(c);
        else return c.to_string();
      }();
      terms.push_back({{"exp", e}, {"coef", coef}});
    }
    gens.push_back({{"terms", terms}});
  }
  j["gens"] = gens;
  return j;
}

}  // namespace

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::io_error, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_atomic(const std::filesystem::path& path, const std::string& text) {
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::io_error, "cannot write " + tmp.string());
    out << text;
    if (!out) fail(ErrorKind::io_error, "write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) fail(ErrorKind::io_error, "cannot rename into " + path.string() + ": " + ec.message());
}

double parse_coefficient(const std::string& text) {
  const auto pos = text.find("*sqrt(");
  if (pos == std::string::npos) {
    if (text.find('/') != std::string::npos) return QuadraticNumber::parse(text).to_double();
    try {
      std::size_t used = 0;
      const double v = std::stod(text, &used);
      if (used != text.size()) fail(ErrorKind::parse_error, "bad number '" + text + "'");
      return v;
    } catch (const std::logic_error&) {
      fail(ErrorKind::parse_error, "bad number '" + text + "'");
    }
  }
  // a+b*sqrt(D) or b*sqrt(D)
  const auto close = text.find(')', pos);
  if (close == std::string::npos) fail(ErrorKind::parse_error, "bad number '" + text + "'");
  const double d = std::stod(text.substr(pos + 6, close - pos - 6));
  std::string head = text.substr(0, pos);
  std::size_t split = std::string::npos;
  for (std::size_t i = head.size(); i-- > 1;)
    if ((head[i] == '+' || head[i] == '-') && head[i - 1] != 'e' && head[i - 1] != 'E') {
      split = i;
      break;
    }
  double a = 0.0;
  std::string b = head;
  if (split != std::string::npos) {
    a = parse_coefficient(head.substr(0, split));
    b = head.substr(split);
    if (b[0] == '+') b = b.substr(1);
  }
  return a + parse_coefficient(b) * std::sqrt(d);
}

GroupSpec group_spec_from_json(const std::string& text) {
  const json j = parse_json(text);
  const auto name = j.contains("name") ? j.at("name").get<std::string>() : std::string("custom");
  const GroundField field = GroundField::parse(j.contains("field") ? j.at("field").get<std::string>() : "float");
  const auto gens = get<json>(j, "generators");
  if (!gens.is_array() || gens.empty()) fail(ErrorKind::parse_error, "generators must be a non-empty list");
  const int dim = j.contains("dimension") ? j.at("dimension").get<int>() : static_cast<int>(gens[0].size());
  auto check_shape = [dim](const json& g) {
    if (!g.is_array() || static_cast<int>(g.size()) != dim) fail(ErrorKind::parse_error, "generator has wrong shape");
    for (const auto& row : g)
      if (!row.is_array() || static_cast<int>(row.size()) != dim)
        fail(ErrorKind::parse_error, "generator has wrong shape");
  };
  if (field.exact()) {
    std::vector<ExactMatrix> mats;
    for (const auto& g : gens) {
      check_shape(g);
      ExactMatrix m(dim, dim);
      for (int r = 0; r < dim; ++r)
        for (int c = 0; c < dim; ++c) m(r, c) = exact_entry(g[r][c], field);
      mats.push_back(m);
    }
    return make_exact_spec(name, field, std::move(mats));
  }
  std::vector<Eigen::MatrixXd> mats;
  for (const auto& g : gens) {
    check_shape(g);
    Eigen::MatrixXd m(dim, dim);
    for (int r = 0; r < dim; ++r)
      for (int c = 0; c < dim; ++c) m(r, c) = float_entry(g[r][c]);
    mats.push_back(m);
  }
  return make_float_spec(name, std::move(mats));
}

std::string group_spec_to_json(const GroupSpec& spec) {
  json j;
  j["name"] = spec.name;
  j["dimension"] = spec.dimension;
  j["field"] = spec.field.label();
  json gens = json::array();
  for (std::size_t k = 0; k < spec.generators.size(); ++k) {
    json rows = json::array();
    for (int r = 0; r < spec.dimension; ++r) {
      json row = json::array();
      for (int c = 0; c < spec.dimension; ++c) {
        if (!spec.exact_generators.empty()) {
          const QuadraticNumber& x = spec.exact_generators[k](r, c);
          if (x.is_rational()) row.push_back(x.rational_part().get_str());
          else row.push_back({x.rational_part().get_str(), x.irrational_part().get_str()});
        } else {
          row.push_back(format_double(spec.generators[k](r, c)));
        }
      }
      rows.push_back(row);
    }
    gens.push_back(rows);
  }
  j["generators"] = gens;
  return j.dump(2) + "\n";
}

std::string system_to_json(const InvariantSystem& system) {
  json j = system.exact ? system_json(*system.exact) : system_json(system.numeric);
  j["field"] = system.field.label();
  return j.dump(2) + "\n";
}

std::string system_to_json(const GeneratorSystem<double>& system) { return system_json(system).dump(2) + "\n"; }

GeneratorSystem<double> system_from_json(const std::string& text) {
  const json j = parse_json(text);
  GeneratorSystem<double> s;
  const auto gens = get<json>(j, "gens");
  s.degrees = get<std::vector<int>>(j, "degrees");
  if (gens.size() != s.degrees.size()) fail(ErrorKind::parse_error, "degrees and gens differ in length");
  s.nvars = j.contains("nvars") ? j.at("nvars").get<int>() : -1;
  for (const auto& g : gens) {
    std::vector<std::pair<Exponent, double>> terms;
    for (const auto& t : get<json>(g, "terms")) {
      Exponent e = get<Exponent>(t, "exp");
      const json& c = t.at("coef");
      terms.push_back({e, c.is_string() ? parse_coefficient(c.get<std::string>()) : c.get<double>()});
      if (s.nvars < 0) s.nvars = static_cast<int>(e.size());
    }
    if (s.nvars < 0) fail(ErrorKind::parse_error, "cannot infer the number of variables");
    Poly<double> p(s.nvars);
    for (const auto& [e, c] : terms) {
      if (static_cast<int>(e.size()) != s.nvars) fail(ErrorKind::parse_error, "exponent length differs from nvars");
      p.add_term(e, c);
    }
    s.generators.push_back(p);
  }
  for (std::size_t i = 0; i < s.size(); ++i)
    if (!s.generators[i].is_zero() && (!s.generators[i].is_homogeneous() || s.generators[i].degree() != s.degrees[i]))
      fail(ErrorKind::parse_error, "generator " + std::to_string(i) + " does not have its declared degree");
  if (j.contains("norm_index") && !j.at("norm_index").is_null()) {
    s.norm_index = j.at("norm_index").get<std::size_t>();
  } else {
    for (std::size_t i = 0; i < s.size(); ++i)
      if (s.degrees[i] == 2 && s.generators[i] == Poly<double>::norm_square(s.nvars)) s.norm_index = i;
  }
  s.minimal = j.contains("minimal") ? j.at("minimal").get<bool>() : false;
  return s;
}

std::vector<std::vector<double>> parse_csv_numbers(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<double> row;
    std::istringstream ls(line);
    std::string cell;
    bool numeric = true;
    while (std::getline(ls, cell, ',')) {
      const auto a = cell.find_first_not_of(" \t");
      const auto b = cell.find_last_not_of(" \t");
      cell = a == std::string::npos ? "" : cell.substr(a, b - a + 1);
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
        if (used != cell.size()) numeric = false;
      } catch (const std::logic_error&) {
        numeric = false;
      }
    }
    if (!numeric) {
      if (first) {
        first = false;
        continue;  // header
      }
      fail(ErrorKind::parse_error, "non-numeric CSV row: " + line);
    }
    first = false;
    if (!rows.empty() && row.size() != rows.front().size()) fail(ErrorKind::parse_error, "ragged CSV rows");
    rows.push_back(std::move(row));
  }
  return rows;
}

CurveInput curve_from_json(const std::string& text, const OrbitMap* map, const std::filesystem::path& base_dir) {
  const json j = parse_json(text);
  CurveInput out;
  const int smooth = smoothness_of(j);
  const double start = j.contains("start") ? j.at("start").get<double>() : -1.0;
  const double end = j.contains("end") ? j.at("end").get<double>() : 1.0;
  if (j.contains("components")) {
    Curve c = Curve::polynomial(poly_components(j.at("components")), start, end);
    out.curve = Curve(c.dim(), start, end, [c](double t, Eigen::VectorXd* v, Eigen::VectorXd* d) { c.evaluate(t, v, d); },
                      smooth);
  } else if (j.contains("path")) {
    if (!map) fail(ErrorKind::invalid_argument, "a path curve needs the orbit map");
    const Curve p = Curve::polynomial(poly_components(j.at("path")), start, end);
    if (p.dim() != map->input_dim()) fail(ErrorKind::parse_error, "path dimension differs from the representation");
    out.path = p;
    out.curve = forward_curve(*map, p);
  } else if (j.contains("samples")) {
    std::vector<std::vector<double>> rows;
    const json& s = j.at("samples");
    if (s.is_string()) {
      std::filesystem::path file = s.get<std::string>();
      if (file.is_relative()) file = base_dir / file;
      rows = parse_csv_numbers(read_text(file));
    } else {
      rows = s.get<std::vector<std::vector<double>>>();
    }
    if (rows.size() < 4) fail(ErrorKind::parse_error, "need at least four samples");
    std::vector<double> times;
    std::vector<Eigen::VectorXd> values;
    for (const auto& r : rows) {
      if (r.size() < 2) fail(ErrorKind::parse_error, "sample rows are t, c1, ..., cn");
      times.push_back(r[0]);
      values.push_back(Eigen::Map<const Eigen::VectorXd>(r.data() + 1, static_cast<Eigen::Index>(r.size() - 1)));
    }
    const Curve spline = Curve::from_samples(times, values);
    const int declared = j.contains("smoothness") ? smooth : 2;
    out.curve = Curve(spline.dim(), spline.start(), spline.end(),
                      [spline](double t, Eigen::VectorXd* v, Eigen::VectorXd* d) { spline.evaluate(t, v, d); }, declared);
    out.warnings.push_back("sampled curve interpolated by cubic splines; smoothness class " +
                           std::to_string(declared) + " is user-asserted");
  } else {
    fail(ErrorKind::parse_error, "curve needs 'components', 'path' or 'samples'");
  }
  if (map && out.curve.dim() != map->output_dim())
    fail(ErrorKind::parse_error, "curve dimension differs from the number of invariants");
  return out;
}

std::string root_track_csv(const RootTrack& track) {
  std::string out = "t";
  const Eigen::Index n = track.roots.empty() ? 0 : track.roots.front().size();
  for (Eigen::Index i = 1; i <= n; ++i) out += ",x" + std::to_string(i);
  for (Eigen::Index i = 1; i <= n; ++i) out += ",dx" + std::to_string(i);
  out += "\n";
  for (std::size_t k = 0; k < track.times.size(); ++k)
    out += csv_line(track.times[k], {&track.roots[k], &track.derivatives[k]}, std::nullopt);
  return out;
}

std::string lift_csv(const LiftResult& result) {
  std::string out = "t";
  const Eigen::Index m = result.points.empty() ? 0 : result.points.front().size();
  for (Eigen::Index i = 1; i <= m; ++i) out += ",x" + std::to_string(i);
  for (Eigen::Index i = 1; i <= m; ++i) out += ",dx" + std::to_string(i);
  out += ",residual\n";
  for (std::size_t k = 0; k < result.grid.size(); ++k)
    out += csv_line(result.grid[k], {&result.points[k], &result.derivatives[k]},
                    k < result.residuals.size() ? result.residuals[k] : 0.0);
  return out;
}

LiftTable lift_table_from_csv(const std::string& text) {
  const auto rows = parse_csv_numbers(text);
  if (rows.empty()) fail(ErrorKind::parse_error, "empty lift table");
  const std::size_t width = rows.front().size();
  if (width < 4 || (width - 2) % 2 != 0) fail(ErrorKind::parse_error, "lift table needs t, x, dx, residual columns");
  const auto m = static_cast<Eigen::Index>((width - 2) / 2);
  LiftTable out;
  for (const auto& r : rows) {
    out.grid.push_back(r[0]);
    out.points.push_back(Eigen::Map<const Eigen::VectorXd>(r.data() + 1, m));
    out.derivatives.push_back(Eigen::Map<const Eigen::VectorXd>(r.data() + 1 + m, m));
    out.residuals.push_back(r.back());
  }
  return out;
}

std::string glue_log_json(const LiftResult& result) {
  json a = json::array();
  for (const auto& g : result.glue_log) a.push_back({{"t", g.t}, {"element_index", g.element_index}});
  return a.dump(2) + "\n";
}

std::string diagnostics_json(const LiftResult& result) {
  const auto& d = result.diagnostics;
  json j;
  j["scale"] = result.scale;
  j["max_residual"] = d.max_residual;
  json bounds = json::array();
  for (const auto& b : d.bounds) bounds.push_back({{"a", b.a}, {"b", b.b}, {"C_K", b.value}});
  j["derivative_bounds"] = bounds;
  json modulus = json::array();
  for (const auto& r : d.modulus) modulus.push_back({{"level", r.level}, {"step", r.step}, {"modulus", r.modulus}});
  j["c1_modulus"] = {{"emitted", d.modulus_emitted}, {"monotone", d.modulus_monotone}, {"rows", modulus}};
  json second = json::array();
  for (const auto& r : d.second_differences)
    second.push_back({{"t", r.t}, {"level", r.level}, {"step", r.step}, {"value", r.value}});
  j["second_differences"] = {
      {"emitted", d.second_differences_emitted}, {"bounded", d.second_differences_bounded}, {"rows", second}};
  const auto& z = result.zero_set;
  json zones = json::array();
  for (const auto& [a, b] : z.flat_zones) zones.push_back({a, b});
  j["zero_set"] = {{"zeros", doubles_json(z.zeros)},
                   {"flat_zones", zones},
                   {"E", doubles_json(z.E)},
                   {"F_isolated", doubles_json(z.F_isolated)},
                   {"F_accumulation", doubles_json(z.F_accumulation)},
                   {"heuristic", z.heuristic}};
  j["warnings"] = d.warnings;
  return j.dump(2) + "\n";
}

std::string reduction_plan_json(const ReductionPlan& plan) {
  json j;
  j["k"] = plan.k;
  json comps = json::array();
  for (const auto& c : plan.components) {
    json f = json::array();
    for (Eigen::Index r = 0; r < c.functionals.rows(); ++r) f.push_back(vector_json(c.functionals.row(r).transpose()));
    json exprs = json::array();
    for (const auto& p : c.expressions) exprs.push_back(p.to_string());
    comps.push_back({{"dimension", c.basis.cols()},
                     {"base_point", vector_json(c.base_point)},
                     {"cosets", c.cosets},
                     {"functionals", f},
                     {"expressions", exprs},
                     {"k", c.k}});
  }
  j["components"] = comps;
  return j.dump(2) + "\n";
}

std::string reduction_report_json(const ReductionReport& report) {
  json j;
  j["passed"] = report.passed;
  j["max_mismatch"] = report.max_mismatch;
  j["worst_time"] = report.worst_time;
  json comps = json::array();
  for (const auto& c : report.components)
    comps.push_back({{"max_mismatch", c.max_mismatch}, {"track_bound", c.track_bound}, {"lift_bound", c.lift_bound}});
  j["components"] = comps;
  return j.dump(2) + "\n";
}

PolarSpec polar_spec_from_json(const std::string& text, int cap) {
  const json j = parse_json(text);
  const auto ambient = j.contains("ambient") ? j.at("ambient").get<std::string>() : std::string("finite");
  const GroupSpec declared = group_spec_from_json(get<json>(j, "weyl").dump());
  const FiniteGroup declared_weyl = enumerate_group(declared);
  GroupSampler sampler;
  if (ambient == "finite") {
    const GroupSpec g = j.contains("group") ? group_spec_from_json(j.at("group").dump()) : declared;
    sampler = finite_sampler(enumerate_group(g));
  } else {
    sampler = parse_sampler(ambient);
  }
  const auto vectors = get<std::vector<std::vector<double>>>(j, "section");
  if (vectors.empty()) fail(ErrorKind::parse_error, "section needs at least one basis vector");
  Eigen::MatrixXd section(sampler.dimension, static_cast<Eigen::Index>(vectors.size()));
  for (std::size_t c = 0; c < vectors.size(); ++c) {
    if (static_cast<int>(vectors[c].size()) != sampler.dimension)
      fail(ErrorKind::parse_error, "section vector has the wrong length");
    for (int r = 0; r < sampler.dimension; ++r) section(r, static_cast<Eigen::Index>(c)) = vectors[c][r];
  }
  PolarSpec spec = make_polar_spec(sampler, section, cap);
  if (spec.weyl.order() != declared_weyl.order())
    fail(ErrorKind::not_a_section, "Weyl group has order " + std::to_string(spec.weyl.order()) + ", declared " +
                                       std::to_string(declared_weyl.order()));
  return spec;
}

}  // namespace orbitlift

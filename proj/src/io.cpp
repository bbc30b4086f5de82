#include "qslimit/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "qslimit/errors.hpp"

namespace qsl::io {

namespace {

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\r' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\r' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

struct CsvGrid {
  GridKind kind = GridKind::generic;
  double tol_mass = 0.0;
  double slack = 0.0;
  std::vector<double> x;
  std::vector<std::vector<double>> columns;
};

CsvGrid parse_grid_csv(std::string_view text, std::size_t value_columns) {
  CsvGrid out;
  out.columns.resize(value_columns);
  bool header_seen = false;
  for (std::string_view line : split(text, '\n')) {
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '#') {
      for (std::string_view item : split(line.substr(1), ' ')) {
        item = trim(item);
        const auto eq = item.find('=');
        if (eq == std::string_view::npos) continue;
        const std::string_view key = item.substr(0, eq);
        const std::string_view value = item.substr(eq + 1);
        if (key == "kind") out.kind = grid_kind_from_string(value);
        if (key == "tol_mass") out.tol_mass = parse_double(value);
        if (key == "slack") out.slack = parse_double(value);
      }
      continue;
    }
    if (!header_seen) {
      header_seen = true;
      if (line.front() == 'x' || line.front() == 't' || line.front() == 'l') continue;
    }
    const auto cells = split(line, ',');
    if (cells.size() != value_columns + 1)
      throw ContractViolation("grid csv: expected " + std::to_string(value_columns + 1) + " columns in '" +
                              std::string(line) + "'");
    out.x.push_back(parse_double(trim(cells[0])));
    for (std::size_t c = 0; c < value_columns; ++c) out.columns[c].push_back(parse_double(trim(cells[c + 1])));
  }
  if (out.x.size() < 2) throw ContractViolation("grid csv: need at least two rows");
  return out;
}

std::string grid_comment(GridKind kind, double tol_mass, double slack) {
  return "# kind=" + std::string(to_string(kind)) + " tol_mass=" + format_double(tol_mass) +
         " slack=" + format_double(slack) + "\n";
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }
double number_from(const json& j) {
  return j.is_null() ? std::numeric_limits<double>::infinity() : j.get<double>();
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view text) {
  text = trim(text);
  if (text == "inf" || text == "+inf") return std::numeric_limits<double>::infinity();
  if (text == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw ContractViolation("cannot parse number '" + std::string(text) + "'");
  return v;
}

std::string grid_to_csv(const RealGrid& g) {
  std::string out = grid_comment(g.kind(), g.tol_mass(), g.slack());
  out += "x,value\n";
  for (Eigen::Index i = 0; i < g.size(); ++i) out += format_double(g.x(i)) + "," + format_double(g[i]) + "\n";
  return out;
}

std::string grid_to_csv(const ComplexGrid& g) {
  std::string out = grid_comment(g.kind(), g.tol_mass(), g.slack());
  out += "t,value,value_imag\n";
  for (Eigen::Index i = 0; i < g.size(); ++i)
    out += format_double(g.x(i)) + "," + format_double(g[i].real()) + "," + format_double(g[i].imag()) + "\n";
  return out;
}

RealGrid real_grid_from_csv(std::string_view text) {
  CsvGrid c = parse_grid_csv(text, 1);
  Eigen::ArrayXd v = Eigen::Map<const Eigen::ArrayXd>(c.columns[0].data(), static_cast<Eigen::Index>(c.columns[0].size()));
  return RealGrid(c.x.front(), c.x.back(), std::move(v), c.kind, c.tol_mass, c.slack);
}

ComplexGrid complex_grid_from_csv(std::string_view text) {
  CsvGrid c = parse_grid_csv(text, 2);
  ComplexGrid::Values v(static_cast<Eigen::Index>(c.x.size()));
  for (std::size_t i = 0; i < c.x.size(); ++i) v[static_cast<Eigen::Index>(i)] = {c.columns[0][i], c.columns[1][i]};
  return ComplexGrid(c.x.front(), c.x.back(), std::move(v), c.kind == GridKind::generic ? GridKind::cf : c.kind,
                     c.tol_mass, c.slack);
}

json grid_to_json(const RealGrid& g) {
  json values = json::array();
  for (Eigen::Index i = 0; i < g.size(); ++i) values.push_back(g[i]);
  return {{"domain", {g.lo(), g.hi()}}, {"spacing", g.spacing()}, {"kind", std::string(to_string(g.kind()))},
          {"tol_mass", g.tol_mass()}, {"slack", g.slack()}, {"values", std::move(values)}};
}

json grid_to_json(const ComplexGrid& g) {
  json values = json::array();
  for (Eigen::Index i = 0; i < g.size(); ++i) values.push_back({g[i].real(), g[i].imag()});
  return {{"domain", {g.lo(), g.hi()}}, {"spacing", g.spacing()}, {"kind", std::string(to_string(g.kind()))},
          {"tol_mass", g.tol_mass()}, {"slack", g.slack()}, {"values", std::move(values)}};
}

RealGrid real_grid_from_json(const json& j) {
  const auto& vals = j.at("values");
  Eigen::ArrayXd v(static_cast<Eigen::Index>(vals.size()));
  for (std::size_t i = 0; i < vals.size(); ++i) v[static_cast<Eigen::Index>(i)] = vals[i].get<double>();
  return RealGrid(j.at("domain")[0].get<double>(), j.at("domain")[1].get<double>(), std::move(v),
                  grid_kind_from_string(j.at("kind").get<std::string>()), j.value("tol_mass", 0.0),
                  j.value("slack", 0.0));
}

ComplexGrid complex_grid_from_json(const json& j) {
  const auto& vals = j.at("values");
  ComplexGrid::Values v(static_cast<Eigen::Index>(vals.size()));
  for (std::size_t i = 0; i < vals.size(); ++i)
    v[static_cast<Eigen::Index>(i)] = {vals[i][0].get<double>(), vals[i][1].get<double>()};
  return ComplexGrid(j.at("domain")[0].get<double>(), j.at("domain")[1].get<double>(), std::move(v),
                     grid_kind_from_string(j.at("kind").get<std::string>()), j.value("tol_mass", 0.0),
                     j.value("slack", 0.0));
}

json moments_to_json(const MomentVector& m) {
  return {{"origin", m.origin}, {"iteration", m.iteration}, {"values", m.values}};
}

MomentVector moments_from_json(const json& j) {
  return MomentVector{j.at("values").get<std::vector<double>>(), j.value("origin", std::string()),
                      j.value("iteration", 0)};
}

json bound_to_json(const BoundReport& r) {
  json inputs = json::object();
  for (const auto& [k, v] : r.inputs) inputs[k] = number_or_null(v);
  return {{"name", r.name}, {"value", number_or_null(r.value)}, {"inputs", std::move(inputs)},
          {"valid", r.valid}, {"reason", r.reason}, {"route", r.route}};
}

BoundReport bound_from_json(const json& j) {
  BoundReport r;
  r.name = j.at("name").get<std::string>();
  r.value = number_from(j.at("value"));
  for (const auto& [k, v] : j.at("inputs").items()) r.inputs[k] = number_from(v);
  r.valid = j.at("valid").get<bool>();
  r.reason = j.value("reason", std::string());
  r.route = j.value("route", std::string());
  return r;
}

json bounds_to_json(const std::vector<BoundReport>& rs) {
  json out = json::array();
  for (const auto& r : rs) out.push_back(bound_to_json(r));
  return out;
}

std::vector<BoundReport> bounds_from_json(const json& j) {
  std::vector<BoundReport> out;
  for (const auto& item : j) out.push_back(bound_from_json(item));
  return out;
}

std::string batch_to_csv(const SampleBatch& b) {
  std::string out = "value\n";
  for (double v : b.values) out += format_double(v) + "\n";
  return out;
}

json batch_sidecar(const SampleBatch& b) {
  json j = {{"kind", to_string(b.kind)}, {"seed", b.seed}, {"count", b.values.size()}};
  if (b.kind == SampleKind::Zn) {
    j["depth"] = b.parameter;
    j["start"] = b.start;
  } else {
    j["n"] = b.parameter;
  }
  return j;
}

SampleBatch batch_from_files(std::string_view csv, const json& sidecar) {
  SampleBatch b;
  b.kind = sample_kind_from_string(sidecar.at("kind").get<std::string>());
  b.seed = sidecar.at("seed").get<std::uint64_t>();
  b.parameter = b.kind == SampleKind::Zn ? sidecar.at("depth").get<std::int64_t>() : sidecar.at("n").get<std::int64_t>();
  b.start = sidecar.value("start", std::string());
  bool header = true;
  for (std::string_view line : split(csv, '\n')) {
    line = trim(line);
    if (line.empty()) continue;
    if (header) {
      header = false;
      if (line == "value") continue;
    }
    b.values.push_back(parse_double(line));
  }
  if (b.values.size() != sidecar.at("count").get<std::size_t>())
    throw ContractViolation("sample batch: row count does not match the sidecar");
  return b;
}

json grid_spec_to_json(const GridSpec& s) { return {{"lo", s.lo}, {"hi", s.hi}, {"points", s.points}}; }

GridSpec grid_spec_from_json(const json& j) {
  return {j.at("lo").get<double>(), j.at("hi").get<double>(), j.at("points").get<Eigen::Index>()};
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ResourceError("cannot open " + path.string() + " for writing");
  f << text;
  if (!f) throw ResourceError("failed writing " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ResourceError("cannot open " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_iteration_state(const std::filesystem::path& dir, const IterationState& state,
                           const IterationOptions& options) {
  std::filesystem::create_directories(dir);
  json meta = {{"n", state.n},
               {"start", state.start.describe()},
               {"start_mean", state.start.mean()},
               {"start_variance", state.start.variance()},
               {"grids",
                {{"density", grid_spec_to_json(options.density_grid)},
                 {"cf", grid_spec_to_json(options.cf_grid)},
                 {"mgf", grid_spec_to_json(options.mgf_grid)}}},
               {"representations", json::array()}};
  if (const auto* g = std::get_if<GridLaw>(&state.start.variant())) meta["start_grid"] = grid_to_json(g->density);
  auto tolerances = [](double tol, double slack) { return json{{"tol_mass", tol}, {"slack", slack}}; };
  if (state.density) {
    write_text(dir / "density.csv", grid_to_csv(*state.density));
    meta["representations"].push_back("density");
    meta["tolerances"]["density"] = tolerances(state.density->tol_mass(), state.density->slack());
  }
  if (state.cf) {
    write_text(dir / "cf.csv", grid_to_csv(*state.cf));
    meta["representations"].push_back("cf");
    meta["tolerances"]["cf"] = tolerances(state.cf->tol_mass(), state.cf->slack());
  }
  if (state.mgf) {
    write_text(dir / "mgf.csv", grid_to_csv(*state.mgf));
    meta["representations"].push_back("mgf");
    meta["tolerances"]["mgf"] = tolerances(state.mgf->tol_mass(), state.mgf->slack());
  }
  if (state.moments) {
    meta["representations"].push_back("moments");
    meta["moments"] = moments_to_json(*state.moments);
  }
  write_text(dir / "meta.json", meta.dump(2) + "\n");
}

IterationState read_iteration_state(const std::filesystem::path& dir) {
  const json meta = json::parse(read_text(dir / "meta.json"));
  const std::string start = meta.at("start").get<std::string>();
  StartLaw law = start == "grid" ? StartLaw::grid(real_grid_from_json(meta.at("start_grid"))) : StartLaw::parse(start);
  IterationState state{meta.at("n").get<int>(), std::move(law), std::nullopt, std::nullopt, std::nullopt, std::nullopt};
  for (const auto& r : meta.at("representations")) {
    const std::string name = r.get<std::string>();
    if (name == "density") state.density = real_grid_from_csv(read_text(dir / "density.csv"));
    if (name == "cf") state.cf = complex_grid_from_csv(read_text(dir / "cf.csv"));
    if (name == "mgf") state.mgf = real_grid_from_csv(read_text(dir / "mgf.csv"));
    if (name == "moments") state.moments = moments_from_json(meta.at("moments"));
  }
  return state;
}

}  // namespace qsl::io

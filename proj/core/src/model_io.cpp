#include "shiftspec/model_io.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "shiftspec/json_format.hpp"

namespace shiftspec {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& what) { fail(errc::invalid_model, what); }

double parse_real(const json& v, const std::string& where) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    if (s == "-inf") return kNegInf;
    if (s == "inf") return std::numeric_limits<double>::infinity();
  }
  bad("expected a number at " + where);
}

std::complex<double> parse_complex(const json& v, const std::string& where) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
    return {v[0].get<double>(), v[1].get<double>()};
  bad("expected a number or [re, im] at " + where);
}

Word parse_word(const std::string& key) {
  Word w;
  if (key.find(',') != std::string::npos) {
    std::stringstream ss(key);
    std::string part;
    while (std::getline(ss, part, ',')) w.push_back(std::stoi(part));
  } else {
    for (char c : key) {
      if (c < '0' || c > '9') bad("malformed word key '" + key + "'");
      w.push_back(c - '0');
    }
  }
  if (w.empty()) bad("empty word key");
  return w;
}

}  // namespace

TransitionMatrix parse_transition_matrix(const json& j) {
  TransitionFlags flags;
  if (j.contains("cuntz_krieger")) flags.cuntz_krieger = j.at("cuntz_krieger").get<bool>();
  if (j.contains("matrix")) {
    const auto rows = j.at("matrix").get<std::vector<std::vector<int>>>();
    return TransitionMatrix::validate(rows, flags);
  }
  if (j.contains("states") && j.contains("edges")) {
    const int n = j.at("states").get<int>();
    if (n <= 0) bad("states must be positive");
    std::vector<std::vector<int>> rows(n, std::vector<int>(n, 0));
    for (const auto& e : j.at("edges")) {
      if (!e.is_array() || e.size() != 2) bad("edges must be [i, j] pairs");
      const int a = e[0].get<int>(), b = e[1].get<int>();
      if (a < 0 || a >= n || b < 0 || b >= n) bad("edge endpoint out of range");
      rows[a][b] = 1;
    }
    return TransitionMatrix::validate(rows, flags);
  }
  bad("transition matrix needs either \"matrix\" or \"states\"+\"edges\"");
}

CylinderFunction parse_cylinder_function(const TransitionMatrix& A, const json& j,
                                         ValueKind kind, int depth_cap) {
  if (j.is_string() && j.get<std::string>() == "uniform") return uniform_cocycle(A);
  if (!j.is_object()) bad("cylinder function must be an object or \"uniform\"");
  if (j.contains("constant")) {
    const int depth = j.value("depth", 1);
    return CylinderFunction::constant(A, depth, parse_real(j.at("constant"), "constant"), kind);
  }
  const int depth = j.at("depth").get<int>();
  const WordTable table(A, depth, depth_cap);
  std::vector<double> values(table.size());
  std::vector<char> seen(table.size(), 0);
  for (const auto& [key, v] : j.at("values").items()) {
    const Word w = parse_word(key);
    const std::ptrdiff_t i = table.index_of(w);
    if (i < 0) fail(errc::inadmissible_word, "value given for inadmissible word " + key);
    if (v.is_array()) {
      values[static_cast<std::size_t>(i)] = std::abs(parse_complex(v, key));
    } else {
      values[static_cast<std::size_t>(i)] = parse_real(v, key);
    }
    seen[static_cast<std::size_t>(i)] = 1;
  }
  for (std::size_t i = 0; i < table.size(); ++i)
    if (!seen[i])
      bad("missing value for admissible word " + word_string(table.word(i)));
  return CylinderFunction(A, depth, std::move(values), kind, depth_cap);
}

namespace {

WeightWord parse_weight_word(const json& j, const std::string& where) {
  WeightWord w;
  if (j.contains("preperiod"))
    for (const auto& v : j.at("preperiod")) w.preperiod.push_back(parse_complex(v, where));
  if (!j.contains("period")) fail(errc::non_periodic_weights, where + " needs a period list");
  for (const auto& v : j.at("period")) w.period.push_back(parse_complex(v, where));
  if (w.period.empty()) fail(errc::non_periodic_weights, where + " has an empty period");
  return w;
}

}  // namespace

TreeSystem parse_tree_system(const json& j) {
  if (!j.contains("core")) fail(errc::invalid_tree, "tree model needs a core");
  const json& jc = j.at("core");
  TreeSystem::Core core;
  core.names = jc.at("vertices").get<std::vector<std::string>>();
  std::map<std::string, int> id;
  for (int i = 0; i < static_cast<int>(core.names.size()); ++i) {
    if (id.count(core.names[i])) fail(errc::invalid_tree, "duplicate vertex " + core.names[i]);
    id[core.names[i]] = i;
  }
  auto vertex = [&id](const std::string& name) {
    const auto it = id.find(name);
    if (it == id.end()) fail(errc::invalid_tree, "unknown vertex " + name);
    return it->second;
  };

  core.map_to_core.assign(core.names.size(), -1);
  core.tail_of.assign(core.names.size(), -1);
  core.weights.assign(core.names.size(), 0.0);
  if (jc.contains("map"))
    for (const auto& [from, to] : jc.at("map").items())
      core.map_to_core[vertex(from)] = vertex(to.get<std::string>());
  for (const auto& [name, v] : jc.at("weights").items())
    core.weights[vertex(name)] = parse_complex(v, name);

  std::vector<TreeRay> rays;
  if (j.contains("rays"))
    for (const auto& jr : j.at("rays"))
      rays.push_back({vertex(jr.at("attach").get<std::string>()),
                      parse_weight_word(jr, "ray")});

  std::vector<TreeTail> tails;
  if (j.contains("tails"))
    for (const auto& jt : j.at("tails")) {
      const int from = vertex(jt.at("from").get<std::string>());
      core.tail_of[from] = static_cast<int>(tails.size());
      tails.push_back({from, parse_weight_word(jt, "tail")});
    }
  return TreeSystem::build(std::move(core), std::move(rays), std::move(tails));
}

ParsedModel parse_model(const json& j) {
  if (!j.is_object()) bad("model must be a JSON object");
  if (j.value("schema", 1) != 1) bad("unsupported schema version");
  ParsedModel out;
  out.kind = j.value("kind", std::string("sft"));

  if (j.contains("options")) {
    const json& o = j.at("options");
    out.options.tol = o.value("tol", out.options.tol);
    out.options.depth_cap = o.value("depth_cap", out.options.depth_cap);
    out.options.restarts = o.value("restarts", out.options.restarts);
    out.options.steps = o.value("steps", out.options.steps);
    out.options.seed = o.value("seed", out.options.seed);
    out.options.threads = o.value("threads", out.options.threads);
  }

  if (out.kind == "sft") {
    SftModel m{parse_transition_matrix(j), {}, {}, {}, {}};
    if (j.contains("functions")) {
      const json& f = j.at("functions");
      if (f.contains("potential"))
        m.potential = parse_cylinder_function(m.matrix, f.at("potential"), ValueKind::real,
                                              out.options.depth_cap);
      if (f.contains("weight"))
        m.weight = parse_cylinder_function(m.matrix, f.at("weight"), ValueKind::nonneg,
                                           out.options.depth_cap);
      if (f.contains("cocycle"))
        m.cocycle = parse_cylinder_function(m.matrix, f.at("cocycle"), ValueKind::nonneg,
                                            out.options.depth_cap);
    }
    if (j.contains("measure")) m.measure_Q = j.at("measure").at("Q").get<std::vector<std::vector<double>>>();
    out.sft = std::move(m);
    return out;
  }
  if (out.kind == "tree") {
    out.tree = parse_tree_system(j);
    return out;
  }
  bad("unknown model kind '" + out.kind + "'");
}

ParsedModel load_model(const std::string& path) {
  if (path == "contrexample") {
    ParsedModel out;
    out.kind = "tree";
    out.tree = TreeSystem::contrexample();
    return out;
  }
  std::ifstream in(path);
  if (!in) fail(errc::io_error, "cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    fail(errc::invalid_model, std::string("JSON parse error: ") + e.what());
  }
  return parse_model(j);
}

CylinderFunction SftModel::potential_or_zero() const {
  return potential ? *potential : CylinderFunction::constant(matrix, 1, 0.0, ValueKind::real);
}
CylinderFunction SftModel::weight_or_one() const {
  return weight ? *weight : CylinderFunction::constant(matrix, 1, 1.0, ValueKind::nonneg);
}
CylinderFunction SftModel::cocycle_or_uniform() const {
  return cocycle ? *cocycle : uniform_cocycle(matrix);
}

json to_json(const FreenessReport& r) {
  return json{{"condition_I", r.condition_I},
              {"topologically_free", r.topologically_free},
              {"sink_cycles", r.sink_cycles},
              {"feeder_states", r.feeder_states}};
}

json to_json(const StateClassification& c) {
  return json{{"sccs", c.sccs}, {"essential", c.essential}, {"condensation", c.condensation}};
}

json to_json(const IrreducibleDecomposition& d) {
  json blocks = json::array();
  for (const auto& b : d.blocks)
    blocks.push_back(json{{"states", b.states},
                          {"period", b.period},
                          {"cyclic_classes", b.cyclic_classes},
                          {"matrix", b.entries}});
  return json{{"blocks", blocks}, {"relabeling", d.relabeling}};
}

json to_json(const MarkovMeasure& mu) {
  return json{{"Q", mu.Q()}, {"pi", mu.pi()}, {"entropy", mu.entropy()}, {"ergodic", mu.ergodic()}};
}

json to_json(const SpectrumDescription& s) {
  json rings = json::array();
  for (const auto& r : s.rings)
    rings.push_back(json{{"rmin", r.r_minus}, {"rmax", r.r_plus}, {"provenance", r.provenance}});
  json out{{"rings", rings},
           {"radius", s.radius},
           {"hypotheses",
            json{{"topologically_free", s.hypotheses.topologically_free},
                 {"condition_I", s.hypotheses.condition_I},
                 {"essential_equals_full", s.hypotheses.essential_equals_full}}},
           {"certified", s.certified},
           {"label", s.label}};
  if (s.disk_radius)
    out["disk"] = *s.disk_radius;
  else
    out["disk"] = nullptr;
  return out;
}

json pseudospectrum_summary(const PseudospectrumReport& rep) {
  return json{{"windows", rep.windows},
              {"epsilon", rep.epsilon},
              {"bound", rep.bound},
              {"grid", json{{"radii", rep.radii.size()}, {"angles", rep.angles.size()}}},
              {"prediction", to_json(rep.prediction)},
              {"counts",
               json{{"in", rep.count_in}, {"out", rep.count_out}, {"undecided", rep.count_undecided}}},
              {"undecided_fraction", rep.undecided_fraction},
              {"max_radial_discrepancy", rep.max_radial_discrepancy}};
}

std::string pseudospectrum_csv(const PseudospectrumReport& rep) {
  std::ostringstream os;
  os << "radius,angle";
  for (int n : rep.windows) os << ",sigma_min_n" << n;
  os << ",verdict\n";
  char buf[40];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    os << buf;
  };
  for (const auto& pt : rep.points) {
    put(pt.radius);
    os << ",";
    put(pt.angle);
    for (double s : pt.sigma) {
      os << ",";
      put(s);
    }
    os << "," << verdict_name(pt.verdict) << "\n";
  }
  return os.str();
}

}  // namespace shiftspec

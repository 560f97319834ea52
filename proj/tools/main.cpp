// Command line surface for the thermodynamic-formalism and weighted-shift
// spectra toolkit. One command per invocation; results are deterministic
// JSON on stdout (or --out), errors are machine readable, exit code 2 marks
// invalid input and 3 numerical non-convergence.

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "shiftspec/json_format.hpp"
#include "shiftspec/model_io.hpp"
#include "shiftspec/svg.hpp"
#include "shiftspec/variational.hpp"

using namespace shiftspec;
using nlohmann::json;

namespace {

struct CommonFlags {
  std::string model_path;
  std::string out_path;
  std::string svg_path;
  std::optional<double> tol;
  std::optional<int> restarts;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<int> depth_cap;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("model", flags.model_path, "model file (JSON), or 'contrexample'")->required();
  cmd->add_option("--out", flags.out_path, "write the JSON result here instead of stdout");
  cmd->add_option("--tol", flags.tol, "enclosure tolerance (relative)");
  cmd->add_option("--restarts", flags.restarts, "variational search restarts");
  cmd->add_option("--seed", flags.seed, "random seed for search restarts");
  cmd->add_option("--threads", flags.threads, "worker cap for parallel sweeps");
  cmd->add_option("--depth-cap", flags.depth_cap, "word table depth guard (default 12)");
}

ParsedModel load(const CommonFlags& flags) {
  ParsedModel model = load_model(flags.model_path);
  if (flags.tol) model.options.tol = *flags.tol;
  if (flags.restarts) model.options.restarts = *flags.restarts;
  if (flags.seed) model.options.seed = *flags.seed;
  if (flags.threads) model.options.threads = *flags.threads;
  if (flags.depth_cap) model.options.depth_cap = *flags.depth_cap;
  return model;
}

const SftModel& require_sft(const ParsedModel& model) {
  if (!model.sft) fail(errc::invalid_model, "this command needs an \"sft\" model");
  return *model.sft;
}

const TreeSystem& require_tree(const ParsedModel& model) {
  if (!model.tree) fail(errc::invalid_model, "this command needs a \"tree\" model");
  return *model.tree;
}

VariationalOptions search_options(const SolverOptions& o) {
  VariationalOptions v;
  v.restarts = o.restarts;
  v.steps = o.steps;
  v.seed = o.seed;
  v.threads = o.threads;
  v.depth_cap = o.depth_cap;
  return v;
}

void emit(const json& j, const CommonFlags& flags) {
  json out = j;
  out["schema"] = 1;
  if (flags.out_path.empty()) {
    dump_json(std::cout, out);
    return;
  }
  std::ofstream f(flags.out_path);
  if (!f) fail(errc::io_error, "cannot write " + flags.out_path);
  dump_json(f, out);
}

void write_file(const std::string& path, const std::string& body) {
  std::ofstream f(path);
  if (!f) fail(errc::io_error, "cannot write " + path);
  f << body;
}

int exit_code_for(errc code) {
  return code == errc::max_iterations ? 3 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"thermodynamic formalism and weighted shift spectra on Markov shifts"};
  app.require_subcommand(1);

  CommonFlags flags;
  int estimate_n = 6, estimate_m = 6;
  bool run_variational = false, certify = false;
  std::string grid_spec = "64x64";
  double epsilon = 1e-2;
  std::string windows_spec = "100,200,400";

  auto* c_validate = app.add_subcommand("validate", "check a model file");
  add_common(c_validate, flags);

  auto* c_decompose = app.add_subcommand("decompose", "classes, blocks, periods");
  add_common(c_decompose, flags);

  auto* c_freeness = app.add_subcommand("freeness", "condition (I) / sink cycles");
  add_common(c_freeness, flags);

  auto* c_pressure = app.add_subcommand("pressure", "topological pressure of the potential");
  add_common(c_pressure, flags);

  auto* c_gibbs = app.add_subcommand("gibbs", "Gibbs Markov measure of the weight");
  add_common(c_gibbs, flags);

  auto* c_radius = app.add_subcommand("radius", "spectral radius of the weighted shift");
  add_common(c_radius, flags);
  c_radius->add_flag("--variational", run_variational, "also run the direct search oracle");

  auto* c_spectrum = app.add_subcommand("spectrum", "spectrum shape of the weighted shift");
  add_common(c_spectrum, flags);
  c_spectrum->add_option("--svg", flags.svg_path, "also render the shape to this file");

  auto* c_tentropy = app.add_subcommand("tentropy", "t-entropy and its partition estimate");
  add_common(c_tentropy, flags);
  c_tentropy->add_option("--tn", estimate_n, "operator power bound for the estimate");
  c_tentropy->add_option("--tm", estimate_m, "cylinder partition depth for the estimate");

  auto* c_tree = app.add_subcommand("tree-spectrum", "predicted spectrum of a tree system");
  add_common(c_tree, flags);
  c_tree->add_flag("--certify", certify, "run the pseudospectrum lab and compare");
  c_tree->add_option("--grid", grid_spec, "RxA polar grid, default 64x64");
  c_tree->add_option("--epsilon", epsilon, "pseudospectrum threshold");
  c_tree->add_option("--windows", windows_spec, "comma separated window sizes");
  c_tree->add_option("--svg", flags.svg_path, "render the predicted shape");

  auto* c_pseudo = app.add_subcommand("pseudospectrum", "sigma_min grid over a tree system");
  add_common(c_pseudo, flags);
  c_pseudo->add_option("--grid", grid_spec, "RxA polar grid, default 64x64");
  c_pseudo->add_option("--epsilon", epsilon, "pseudospectrum threshold");
  c_pseudo->add_option("--windows", windows_spec, "comma separated window sizes");
  c_pseudo->add_option("--svg", flags.svg_path, "render the verdict heatmap");

  auto* c_render = app.add_subcommand("render", "turn a spectrum JSON into an SVG");
  c_render->add_option("result", flags.model_path, "spectrum JSON produced by this tool")
      ->required();
  c_render->add_option("--svg", flags.svg_path, "output file")->required();

  CLI11_PARSE(app, argc, argv);

  const auto parse_grid = [&]() {
    GridSpec g;
    const auto x = grid_spec.find('x');
    if (x == std::string::npos) fail(errc::invalid_model, "grid must look like 64x64");
    g.radii = std::stoi(grid_spec.substr(0, x));
    g.angles = std::stoi(grid_spec.substr(x + 1));
    return g;
  };
  const auto parse_windows = [&]() {
    std::vector<int> out;
    std::stringstream ss(windows_spec);
    std::string part;
    while (std::getline(ss, part, ',')) out.push_back(std::stoi(part));
    return out;
  };

  try {
    if (app.got_subcommand(c_validate)) {
      const ParsedModel model = load(flags);
      json j{{"valid", true}, {"kind", model.kind}};
      if (model.sft) {
        int edges = 0;
        for (int i = 0; i < model.sft->matrix.size(); ++i)
          edges += model.sft->matrix.out_degree(i);
        j["states"] = model.sft->matrix.size();
        j["edges"] = edges;
        j["cuntz_krieger"] = model.sft->matrix.cuntz_krieger();
      }
      emit(j, flags);
    } else if (app.got_subcommand(c_decompose)) {
      const ParsedModel model = load(flags);
      const auto& m = require_sft(model);
      json j = to_json(decompose(m.matrix));
      j.update(to_json(classify(m.matrix)));
      emit(j, flags);
    } else if (app.got_subcommand(c_freeness)) {
      const ParsedModel model = load(flags);
      emit(to_json(freeness(require_sft(model).matrix)), flags);
    } else if (app.got_subcommand(c_pressure)) {
      const ParsedModel model = load(flags);
      const auto& m = require_sft(model);
      const PressureResult pr =
          pressure(m.matrix, m.potential_or_zero(), model.options.tol, model.options.depth_cap);
      emit(json{{"pressure", pr.value}, {"enclosure", {pr.lo, pr.hi}}, {"converged", pr.converged}},
           flags);
      if (!pr.converged) return 3;
    } else if (app.got_subcommand(c_gibbs)) {
      const ParsedModel model = load(flags);
      const auto& m = require_sft(model);
      const CylinderFunction c =
          m.weight ? *m.weight : pointwise_exp(m.potential_or_zero());
      const MarkovMeasure mu = gibbs_markov(m.matrix, c, model.options.tol);
      const PressureResult pr =
          pressure(m.matrix, pointwise_ln(c), model.options.tol, model.options.depth_cap);
      json j = to_json(mu);
      j["pressure"] = pr.value;
      // stationarity residual, so no result ships as a bare point estimate
      double res = 0.0;
      const int n = m.matrix.size();
      for (int col = 0; col < n; ++col) {
        double piq = 0.0;
        for (int row = 0; row < n; ++row) piq += mu.pi()[row] * mu.Q()[row][col];
        res = std::max(res, std::abs(piq - mu.pi()[col]));
      }
      j["residual"] = res;
      emit(j, flags);
    } else if (app.got_subcommand(c_radius)) {
      const ParsedModel model = load(flags);
      const auto& m = require_sft(model);
      const RadiusResult r = weighted_shift_radius(m.matrix, m.weight_or_one(),
                                                   m.cocycle_or_uniform(), model.options.tol,
                                                   model.options.depth_cap);
      json j{{"radius", r.value}, {"enclosure", {r.lo, r.hi}}, {"converged", r.converged}};
      if (run_variational) {
        const double v = variational_radius(m.matrix, m.weight_or_one(), m.cocycle_or_uniform(),
                                            search_options(model.options));
        j["variational_radius"] = v;
        j["gap"] = r.value - v;
      }
      emit(j, flags);
      if (!r.converged) return 3;
    } else if (app.got_subcommand(c_spectrum)) {
      const ParsedModel model = load(flags);
      const auto& m = require_sft(model);
      const SpectrumDescription s =
          spectrum_sft(m.matrix, m.weight_or_one(), m.cocycle_or_uniform(), model.options.tol,
                       model.options.depth_cap);
      json j = to_json(s);
      if (s.certified) {
        const RadiusResult r =
            weighted_shift_radius(m.matrix, m.weight_or_one(), m.cocycle_or_uniform(),
                                  model.options.tol, model.options.depth_cap);
        j["radius_enclosure"] = {r.lo, r.hi};
      }
      emit(j, flags);
      if (!flags.svg_path.empty()) write_file(flags.svg_path, render_spectrum_svg(s));
    } else if (app.got_subcommand(c_tentropy)) {
      const ParsedModel model = load(flags);
      const auto& m = require_sft(model);
      const CylinderFunction rho = m.cocycle_or_uniform();
      const MarkovMeasure mu = m.measure_Q
                                   ? MarkovMeasure::create(m.matrix, *m.measure_Q)
                                   : gibbs_markov(m.matrix, rho, model.options.tol);
      const double tau = t_entropy(mu, rho);
      const double est =
          t_entropy_definition_estimate(mu, rho, estimate_n, estimate_m, model.options.depth_cap);
      emit(json{{"t_entropy", tau},
                {"definition_estimate", est},
                {"n", estimate_n},
                {"m", estimate_m},
                {"gap", est - tau}},
           flags);
    } else if (app.got_subcommand(c_tree)) {
      const ParsedModel model = load(flags);
      const TreeSystem& T = require_tree(model);
      const SpectrumDescription s = predicted_spectrum(T);
      json j = to_json(s);
      if (certify) {
        PseudospectrumOptions opt;
        opt.grid = parse_grid();
        opt.epsilon = epsilon;
        opt.windows = parse_windows();
        opt.threads = model.options.threads;
        const PseudospectrumReport rep = pseudospectrum(T, opt);
        const double pass_tol =
            2.5 * rep.bound / static_cast<double>(rep.radii.size());
        const bool pass =
            rep.max_radial_discrepancy <= pass_tol && rep.undecided_fraction <= 0.05;
        j["certification"] = json{{"verdict", pass ? "PASS" : "FAIL"},
                                  {"max_radial_discrepancy", rep.max_radial_discrepancy},
                                  {"allowed_discrepancy", pass_tol},
                                  {"undecided_fraction", rep.undecided_fraction}};
      }
      emit(j, flags);
      if (!flags.svg_path.empty()) write_file(flags.svg_path, render_spectrum_svg(s));
    } else if (app.got_subcommand(c_pseudo)) {
      const ParsedModel model = load(flags);
      const TreeSystem& T = require_tree(model);
      PseudospectrumOptions opt;
      opt.grid = parse_grid();
      opt.epsilon = epsilon;
      opt.windows = parse_windows();
      opt.threads = model.options.threads;
      const PseudospectrumReport rep = pseudospectrum(T, opt);
      json j = pseudospectrum_summary(rep);
      const std::string csv_path =
          flags.out_path.empty() ? "pseudospectrum.csv" : flags.out_path + ".csv";
      write_file(csv_path, pseudospectrum_csv(rep));
      j["csv"] = csv_path;
      emit(j, flags);
      if (!flags.svg_path.empty()) write_file(flags.svg_path, render_pseudospectrum_svg(rep));
    } else if (app.got_subcommand(c_render)) {
      std::ifstream in(flags.model_path);
      if (!in) fail(errc::io_error, "cannot open " + flags.model_path);
      json j;
      in >> j;
      SpectrumDescription s;
      if (!j.at("disk").is_null()) s.disk_radius = j.at("disk").get<double>();
      for (const auto& ring : j.at("rings"))
        s.rings.push_back({ring.at("rmin").get<double>(), ring.at("rmax").get<double>(),
                           ring.value("provenance", std::string{})});
      s.radius = j.at("radius").get<double>();
      write_file(flags.svg_path, render_spectrum_svg(s));
    }
  } catch (const Error& e) {
    json err{{"error", errc_name(e.code())}, {"detail", e.detail()}};
    dump_json(std::cout, err);
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    json err{{"error", "Internal"}, {"detail", e.what()}};
    dump_json(std::cout, err);
    return 2;
  }
  return 0;
}

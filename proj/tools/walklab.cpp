// Command-line front end: spectrum, predict, run, sweep, two-marked, amplify, analyze-moving.
//
// Exit codes: 0 success, 2 configuration error, 3 analysis not available for this walk,
// 4 I/O failure, 1 internal numerical failure.

#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "walklab/walklab.hpp"

using namespace walklab;

namespace {

struct GraphOptions {
  std::string family = "torus";
  int side = 0;
  int dims = 2;
  int n = 0;
  std::string shift;
  std::vector<std::string> marked;
};

void add_graph_options(CLI::App* sub, GraphOptions& o, bool with_marked) {
  sub->add_option("--family", o.family, "torus | hypercube | complete")->capture_default_str();
  sub->add_option("--side", o.side, "torus side length L");
  sub->add_option("--dims", o.dims, "torus dimension d, or hypercube dimension d")->capture_default_str();
  sub->add_option("--n", o.n, "complete-graph vertex count");
  sub->add_option("--shift", o.shift, "flip-flop | moving | dirac | swap (default depends on family)");
  if (with_marked)
    sub->add_option("--marked", o.marked, "marked vertex: torus coordinates x,y[,..] or an index; repeatable");
}

GraphSpec make_spec(const GraphOptions& o) {
  const Family f = parse_family(o.family);
  switch (f) {
    case Family::torus: {
      if (o.side <= 0) throw ConfigError("torus requires --side");
      return GraphSpec::torus(o.side, o.dims, o.shift.empty() ? ShiftKind::flip_flop : parse_shift(o.shift));
    }
    case Family::hypercube: {
      GraphSpec g = GraphSpec::hypercube(o.dims);
      if (!o.shift.empty()) g.shift = parse_shift(o.shift);
      validate(g);
      return g;
    }
    case Family::complete: {
      if (o.n <= 0) throw ConfigError("complete graph requires --n");
      GraphSpec g = GraphSpec::complete(o.n);
      if (!o.shift.empty()) g.shift = parse_shift(o.shift);
      validate(g);
      return g;
    }
  }
  return {};
}

std::vector<long> parse_list(const std::string& s) {
  std::vector<long> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stol(item, &used));
      if (used != item.size()) throw ConfigError("");
    } catch (...) {
      throw ConfigError("cannot parse integer list '" + s + "'");
    }
  }
  return out;
}

std::size_t parse_vertex(const Graph& g, const std::string& s) {
  const auto xs = parse_list(s);
  if (g.family() == Family::torus) {
    if (xs.size() != static_cast<std::size_t>(g.rank()))
      throw ConfigError("vertex '" + s + "' needs " + std::to_string(g.rank()) + " coordinates");
    std::vector<int> c;
    for (long x : xs) {
      if (x < 0 || x >= g.side()) throw ConfigError("coordinate " + std::to_string(x) + " outside [0, L)");
      c.push_back(static_cast<int>(x));
    }
    return g.vertex_at(c);
  }
  if (xs.size() != 1 || xs[0] < 0 || static_cast<std::size_t>(xs[0]) >= g.vertex_count())
    throw ConfigError("vertex '" + s + "' must be an index in [0, N)");
  return static_cast<std::size_t>(xs[0]);
}

std::vector<std::size_t> make_marked(const Graph& g, const std::vector<std::string>& items) {
  std::vector<std::size_t> out;
  for (const auto& s : items) out.push_back(parse_vertex(g, s));
  if (out.empty()) out.push_back(0);
  return out;
}

json graph_json(const Graph& g, const std::vector<std::size_t>& marked) {
  json j = to_json(g.spec());
  j["N"] = g.vertex_count();
  j["marked"] = marked;
  return j;
}

std::optional<PredictionReport> try_predict(const GraphSpec& g) {
  try {
    return predict(g);
  } catch (const UnsupportedError&) {
    return std::nullopt;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coined quantum-walk search simulator and spectral predictor"};
  app.set_config("--config", "", "TOML-style config file; command-line flags take precedence");
  app.require_subcommand(1);

  GraphOptions gopt;
  std::string out = "-";

  auto* spectrum = app.add_subcommand("spectrum", "mode spectrum and spectral sums as JSON");
  add_graph_options(spectrum, gopt, false);
  spectrum->add_option("--out", out, "output path, - for stdout");

  double epsilon = 0;
  auto* predict_cmd = app.add_subcommand("predict", "principal eigenphase, run time and overlaps as JSON");
  add_graph_options(predict_cmd, gopt, false);
  predict_cmd->add_option("--out", out, "output path, - for stdout");
  predict_cmd->add_option("--epsilon", epsilon, "also emit the repetition ladder over the T bracket");

  long t_max = -1;
  std::string summary;
  bool unmarked = false;
  std::string format = "csv";
  auto* run = app.add_subcommand("run", "evolve from the uniform state and record the success trace");
  add_graph_options(run, gopt, true);
  run->add_option("--t-max", t_max, "number of steps")->required();
  run->add_option("--out", out, "output path, - for stdout");
  run->add_option("--format", format, "csv (trace) or json (summary)")->check(CLI::IsMember({"csv", "json"}));
  run->add_option("--summary", summary, "additionally write the JSON summary here");
  run->add_flag("--unmarked", unmarked, "observe the marked vertex without marking its coin");

  std::string sides, cube_dims, ns;
  auto* sweep = app.add_subcommand("sweep", "scaling sweep with exponent fit as JSON");
  sweep->add_option("--family", gopt.family, "torus | hypercube | complete");
  sweep->add_option("--dims", gopt.dims, "torus dimension");
  sweep->add_option("--shift", gopt.shift, "shift kind");
  sweep->add_option("--sides", sides, "torus side lengths, e.g. 8,16,32");
  sweep->add_option("--cube-dims", cube_dims, "hypercube dimensions, e.g. 8,9,10");
  sweep->add_option("--ns", ns, "complete-graph sizes");
  sweep->add_option("--out", out, "output path, - for stdout");

  std::string v1s, v2s, trace_out;
  long pair_t_max = 1000;
  auto* two = app.add_subcommand("two-marked", "two marked vertices with symmetry and reduction checks");
  two->add_option("--side", gopt.side, "torus side length")->required();
  two->add_option("--dims", gopt.dims, "torus dimension");
  two->add_option("--shift", gopt.shift, "flip-flop or moving");
  two->add_option("--v1", v1s, "first marked vertex")->required();
  two->add_option("--v2", v2s, "second marked vertex")->required();
  two->add_option("--t-max", pair_t_max, "number of steps");
  two->add_option("--out", out, "summary JSON path, - for stdout");
  two->add_option("--trace", trace_out, "optional CSV trace path");

  long walk_length = -1, rounds = -1;
  auto* amp = app.add_subcommand("amplify", "amplitude amplification around the walk with a cost ledger");
  add_graph_options(amp, gopt, true);
  amp->add_option("--walk-length", walk_length, "inner walk length (default: predicted T_star)");
  amp->add_option("--rounds", rounds, "amplification rounds (default: from the predicted peak probability)");
  amp->add_option("--out", out, "output path, - for stdout");

  auto* moving = app.add_subcommand("analyze-moving", "stationary overlap of the moving-shift walk");
  moving->add_option("--side", gopt.side, "torus side length")->required();
  moving->add_option("--out", out, "output path, - for stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "walklab: " << e.what() << "\n";
    return 2;
  }

  try {
    (void)thread_budget();  // reject a malformed WALKLAB_THREADS up front

    if (spectrum->parsed()) {
      const GraphSpec g = make_spec(gopt);
      const ModeSpectrum ms = mode_spectrum(g);
      json j = envelope("spectrum");
      j["graph"] = to_json(g);
      j["spectrum"] = to_json(ms);
      j["sums"] = to_json(spectral_sums(ms));
      write_atomically(out, dump(j));
    } else if (predict_cmd->parsed()) {
      const GraphSpec g = make_spec(gopt);
      if (g.family == Family::torus && g.shift == ShiftKind::moving)
        throw UnsupportedError("no abstract-search structure for the moving shift; use `walklab analyze-moving`");
      const PredictionReport r = predict(g);
      json j = envelope("predict");
      j["graph"] = to_json(g);
      j["prediction"] = to_json(r);
      if (epsilon > 0) j["schedule"] = repetition_schedule(r.T_min, r.T_max, epsilon);
      write_atomically(out, dump(j));
    } else if (run->parsed()) {
      const GraphSpec spec = make_spec(gopt);
      const Graph g(spec);
      const auto marked = make_marked(g, gopt.marked);
      const CoinConfig coin = paper_coin(g, unmarked ? std::vector<std::size_t>{} : marked);
      const RunTrace tr = run_walk(g, coin, t_max, marked);
      json j = envelope("run");
      j["graph"] = graph_json(g, marked);
      j["t_max"] = t_max;
      j["coined"] = !unmarked;
      j["peak"] = to_json(find_peak(tr));
      const auto pred = unmarked ? std::nullopt : try_predict(spec);
      j["prediction"] = pred ? to_json(*pred) : json(nullptr);
      j["final_norm"] = tr.norm.back();
      write_atomically(out, format == "csv" ? trace_csv(tr) : dump(j));
      if (!summary.empty()) write_atomically(summary, dump(j));
    } else if (sweep->parsed()) {
      const Family f = parse_family(gopt.family);
      const std::string& list = f == Family::torus ? sides : f == Family::hypercube ? cube_dims : ns;
      if (list.empty()) throw ConfigError(f == Family::torus ? "sweep requires --sides" : f == Family::hypercube ? "sweep requires --cube-dims" : "sweep requires --ns");
      std::vector<int> sizes;
      for (long x : parse_list(list)) sizes.push_back(static_cast<int>(x));
      const ShiftKind shift = !gopt.shift.empty() ? parse_shift(gopt.shift) : f == Family::complete ? ShiftKind::swap : ShiftKind::flip_flop;
      const SweepResult res = scaling_sweep(f, shift, gopt.dims, sizes);
      json rows = json::array();
      for (const auto& r : res.rows) {
        json row = {{"size", r.size}, {"N", r.n}, {"cap", r.cap}, {"peak", to_json(r.peak)}};
        row["prediction"] = r.prediction ? to_json(*r.prediction) : json(nullptr);
        rows.push_back(row);
      }
      json j = envelope("sweep");
      j["family"] = to_string(f);
      j["shift"] = to_string(shift);
      j["rows"] = rows;
      j["fitted_exponent"] = res.exponent;
      j["fitted_exponent_all_sizes"] = res.exponent_all;
      write_atomically(out, dump(j));
    } else if (two->parsed()) {
      const GraphSpec spec = GraphSpec::torus(gopt.side, gopt.dims, gopt.shift.empty() ? ShiftKind::flip_flop : parse_shift(gopt.shift));
      const Graph g(spec);
      const std::size_t v1 = parse_vertex(g, v1s), v2 = parse_vertex(g, v2s);
      const TwoMarkedResult r = run_two_marked(spec, v1, v2, pair_t_max);
      json j = envelope("two-marked");
      j["graph"] = graph_json(g, {v1, v2});
      j["t_max"] = pair_t_max;
      j["symmetry_residual"] = r.symmetry_residual;
      j["trace_deviation"] = r.trace_deviation;
      j["state_deviation"] = r.state_deviation;
      j["peak"] = to_json(find_peak(r.trace));
      write_atomically(out, dump(j));
      if (!trace_out.empty()) write_atomically(trace_out, trace_csv(r.trace));
    } else if (amp->parsed()) {
      const GraphSpec spec = make_spec(gopt);
      const Graph g(spec);
      const auto marked = make_marked(g, gopt.marked);
      const auto pred = try_predict(spec);
      if ((walk_length < 0 || rounds < 0) && !pred)
        throw ConfigError("this walk has no prediction; pass --walk-length and --rounds");
      if (walk_length < 0) walk_length = pred->T_star;
      if (rounds < 0) rounds = optimal_rounds(pred->predicted_peak_probability);
      const AmplifyResult r = amplify(g, paper_coin(g, marked), walk_length, rounds, marked);
      json j = envelope("amplify");
      j["graph"] = graph_json(g, marked);
      j["walk_length"] = walk_length;
      j["rounds"] = rounds;
      j["success"] = r.success;
      j["overshoot"] = r.overshoot;
      j["ledger"] = to_json(r.ledger);
      write_atomically(out, dump(j));
    } else if (moving->parsed()) {
      const GraphSpec spec = GraphSpec::torus(gopt.side, 2, ShiftKind::moving);
      json j = envelope("analyze-moving");
      j["graph"] = to_json(spec);
      j["N"] = Graph(spec).vertex_count();
      j["stationary"] = to_json(moving_shift_stationary_overlap(spec, 0));
      write_atomically(out, dump(j));
    }
  } catch (const ConfigError& e) {
    std::cerr << "walklab: configuration error: " << e.what() << "\n";
    return 2;
  } catch (const IndexError& e) {
    std::cerr << "walklab: configuration error: " << e.what() << "\n";
    return 2;
  } catch (const UnsupportedError& e) {
    std::cerr << "walklab: " << e.what() << "\n";
    return 3;
  } catch (const IoError& e) {
    std::cerr << "walklab: I/O error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "walklab: internal error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

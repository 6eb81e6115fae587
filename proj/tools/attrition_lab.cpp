#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "attrition/analysis.hpp"
#include "attrition/errors.hpp"
#include "attrition/io.hpp"
#include "attrition/montecarlo.hpp"
#include "attrition/multidemand.hpp"
#include "attrition/onesided.hpp"
#include "attrition/twosided.hpp"
#include "manifest.hpp"

namespace fs = std::filesystem;
using namespace attrition;
using io::Json;

namespace {

struct Options {
  std::string input;
  std::string out;
  int grid = 201;
  std::string param;
  double delta = 1e-3;
  std::vector<double> values;
  double from = 0.0, to = 0.0;
  int steps = 0;
  bool classify = false, solve = false;
  std::string atom;
  std::string kind;
  int audit = 0;
  std::optional<std::uint64_t> seed;
  std::size_t replications = 10000;
  double time_cap = 50.0;
  double bin_width = 0.05;
  std::string event = "resolution";
  int rich = 0;
};

// Collects outputs; writes them under --out with a manifest, or prints the
// primary one to stdout.
class Run {
 public:
  Run(std::string command, std::vector<std::string> args, std::string config, const Options& opt) : opt_(opt) {
    manifest_.command = std::move(command);
    manifest_.args = std::move(args);
    manifest_.config = std::move(config);
    manifest_.input_path = opt.input;
    manifest_.seed = opt.seed;
    manifest_.started = cli::utc_now();
    input_ = io::read_file(opt.input);
    manifest_.input_digest = cli::sha256_hex(input_);
    if (!opt.out.empty()) fs::create_directories(opt.out);
  }

  const std::string& input() const { return input_; }

  void emit(const std::string& name, const std::string& content, bool primary) {
    if (opt_.out.empty()) {
      if (primary) std::cout << content;
      return;
    }
    io::write_file((fs::path(opt_.out) / name).string(), content);
    manifest_.outputs.push_back(name);
  }

  void finish() {
    if (opt_.out.empty()) return;
    manifest_.finished = cli::utc_now();
    io::write_file((fs::path(opt_.out) / cli::kManifestName).string(), io::dump(manifest_.to_json()));
  }

 private:
  const Options& opt_;
  cli::RunManifest manifest_;
  std::string input_;
};

io::Game load(const Run& run) { return io::parse_game(run.input()); }

OneSidedGame one_sided(const io::Game& game, const std::string& command) {
  if (const auto* g = std::get_if<OneSidedGame>(&game)) return *g;
  throw InvalidGame(command + " needs a one-sided game");
}

twosided::AtomChoice parse_atom(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw InvalidGame("--atom expects player:mass, e.g. 1:0.25");
  twosided::AtomChoice a;
  try {
    a.player = std::stoi(text.substr(0, colon)) - 1;
    std::size_t used = 0;
    const std::string mass = text.substr(colon + 1);
    a.atom = std::stod(mass, &used);
    if (used != mass.size()) throw std::invalid_argument(mass);
  } catch (const std::logic_error&) {
    throw InvalidGame("--atom expects player:mass, e.g. 1:0.25");
  }
  if (a.player != 0 && a.player != 1) throw InvalidGame("--atom player must be 1 or 2");
  return a;
}

// The regime report goes to stderr before the regime error propagates.
[[noreturn]] void regime_refusal(const twosided::RegimeClass& rc, const std::string& why) {
  std::cerr << io::dump(io::to_json(rc));
  throw RegimeMismatch(why);
}

struct TwoSidedSolution {
  Profile profile;
  Json doc;
};

TwoSidedSolution solve_two_sided(const TwoSidedGame& game, const Options& opt) {
  const twosided::RegimeClass rc = twosided::classify(game);
  if (opt.atom.empty()) {
    if (rc.regime != twosided::Regime::unique_finite_T) {
      regime_refusal(rc, "regime " + twosided::to_string(rc.regime) + " has no unique equilibrium; pass --atom player:Q");
    }
    const Profile p = twosided::solve_finite(game);
    return {p, io::to_json(p)};
  }
  const twosided::AtomChoice atom = parse_atom(opt.atom);
  std::string kind = opt.kind;
  if (kind.empty()) {
    if (rc.regime == twosided::Regime::type1_only) kind = "type1";
    if (rc.regime == twosided::Regime::type2_only) kind = "type2";
  }
  if (kind.empty()) regime_refusal(rc, "regime " + twosided::to_string(rc.regime) + " needs --kind type1|type2");
  if (kind != "type1" && kind != "type2") throw InvalidGame("--kind must be type1 or type2");
  const twosided::InfiniteProfile ip =
      kind == "type1" ? twosided::construct_type1(game, atom) : twosided::construct_type2(game, atom);
  Json doc = io::to_json(ip);
  doc["regime"] = twosided::to_string(rc.regime);
  return {ip.profile, doc};
}

void write_profile_outputs(Run& run, const Profile& profile, const Json& doc, const Options& opt) {
  run.emit("profile.json", io::dump(doc), true);
  run.emit("curves.csv", io::curves_csv(profile, opt.grid).str(), false);
  if (std::isfinite(profile.horizon)) run.emit("hazard.csv", io::hazard_csv(profile, opt.grid).str(), false);
}

void write_multi(Run& run, const MultiDemandGame& game, const Options& opt) {
  multidemand::SolverOptions so;
  so.seed = opt.seed;
  const auto sol = multidemand::solve_game(game, so);
  run.emit("multi.json", io::dump(io::to_json(sol)), true);
  run.emit("multi.csv", io::multi_tables_csv(sol).str(), false);
}

void cmd_solve(Run& run, const Options& opt) {
  const io::Game game = load(run);
  if (const auto* g = std::get_if<OneSidedGame>(&game)) {
    const auto eq = onesided::solve(*g);
    write_profile_outputs(run, eq.profile(), io::to_json(eq), opt);
  } else if (const auto* g = std::get_if<TwoSidedGame>(&game)) {
    const TwoSidedSolution s = solve_two_sided(*g, opt);
    write_profile_outputs(run, s.profile, s.doc, opt);
  } else {
    write_multi(run, std::get<MultiDemandGame>(game), opt);
  }
}

void cmd_curve(Run& run, const Options& opt) {
  const onesided::CoevolutionCurve curve(one_sided(load(run), "curve"));
  run.emit("curve.csv", io::coevolution_csv(curve, opt.grid).str(), true);
}

void cmd_hazard(Run& run, const Options& opt) {
  const io::Game game = load(run);
  Profile profile;
  if (const auto* g = std::get_if<TwoSidedGame>(&game)) {
    profile = solve_two_sided(*g, opt).profile;
  } else {
    profile = onesided::solve(one_sided(game, "hazard")).profile();
  }
  run.emit("hazard.csv", io::hazard_csv(profile, opt.grid).str(), true);
}

void cmd_compstat(Run& run, const Options& opt) {
  const OneSidedGame game = one_sided(load(run), "compstat");
  Json doc;
  doc["report"] = io::to_json(analysis::comp_statics_check(game, opt.param, opt.delta));
  doc["benefit"] = io::to_json(analysis::who_benefits(game));
  if (game.gamma1 > 0.0) {
    const analysis::SignReport s = analysis::gamma_sensitivity(game);
    doc["gamma_sensitivity"] = Json{{"region", s.region},
                                    {"derivative", io::number(s.derivative)},
                                    {"finite_difference", io::number(s.finite_difference)},
                                    {"agrees", s.agrees}};
  }
  run.emit("compstat.json", io::dump(doc), true);
}

void cmd_limit(Run& run, const Options& opt) {
  const io::Game game = load(run);
  if (const auto* g = std::get_if<MultiDemandGame>(&game)) {
    if (opt.rich < 3) throw InvalidGame("limit on a multi-demand game needs --rich K with K >= 3");
    const auto b = multidemand::limit_payoffs_rich(g->r1, g->r2, g->gamma1, opt.rich);
    Json doc{{"K", opt.rich}, {"payoffs", Json::array({io::number(b.u1), io::number(b.u2)})}};
    run.emit("limit.json", io::dump(doc, false) + "\n", true);
    return;
  }
  const auto limit = analysis::limit_payoffs_single(one_sided(game, "limit"));
  run.emit("limit.json", io::dump(io::to_json(limit), false) + "\n", true);
}

void cmd_multi(Run& run, const Options& opt) {
  const io::Game game = load(run);
  const auto* g = std::get_if<MultiDemandGame>(&game);
  if (!g) throw InvalidGame("multi needs a multi-demand game");
  write_multi(run, *g, opt);
}

void cmd_twosided(Run& run, const Options& opt) {
  const io::Game game = load(run);
  TwoSidedGame g;
  if (const auto* t = std::get_if<TwoSidedGame>(&game)) {
    g = *t;
  } else {
    g = embed(one_sided(game, "twosided"));
  }
  if (opt.classify == opt.solve) throw InvalidGame("pass exactly one of --classify and --solve");
  if (opt.classify) {
    run.emit("regime.json", io::dump(io::to_json(twosided::classify(g))), true);
    return;
  }
  TwoSidedSolution s = solve_two_sided(g, opt);
  if (opt.audit > 0) {
    const double end = std::isfinite(s.profile.horizon) ? s.profile.horizon : io::sample_times(s.profile, 2).back();
    s.doc["audit"] = io::to_json(best_response_audit(s.profile, audit_grid(end, opt.audit)));
  }
  write_profile_outputs(run, s.profile, s.doc, opt);
}

void cmd_simulate(Run& run, const Options& opt) {
  const io::Game game = load(run);
  Profile profile;
  if (const auto* g = std::get_if<TwoSidedGame>(&game)) {
    profile = solve_two_sided(*g, opt).profile;
  } else {
    profile = onesided::solve(one_sided(game, "simulate")).profile();
  }
  montecarlo::SimConfig cfg;
  cfg.replications = opt.replications;
  cfg.seed = *opt.seed;
  cfg.time_cap = opt.time_cap;
  cfg.bin_width = opt.bin_width;
  cfg.audit_points = opt.audit;
  const auto report = montecarlo::simulate(profile, cfg);
  Json doc = io::to_json(report);
  doc["seed"] = *opt.seed;
  run.emit("sim.json", io::dump(doc), true);
  run.emit("hazard.csv", io::hazard_bins_csv(montecarlo::bin_hazard(report, opt.event)).str(), false);
}

void cmd_hazardfit(Run& run, const Options& opt) {
  const io::Durations d = io::parse_durations(run.input());
  run.emit("hazard.csv", io::hazard_bins_csv(montecarlo::empirical_hazard(d.duration, d.censored, opt.bin_width)).str(),
           true);
}

void cmd_sweep(Run& run, const Options& opt) {
  const OneSidedGame game = one_sided(load(run), "sweep");
  std::vector<double> values = opt.values;
  if (values.empty()) {
    if (opt.steps < 2) throw InvalidGame("sweep needs --values or --from/--to/--steps with steps >= 2");
    for (int k = 0; k < opt.steps; ++k) values.push_back(opt.from + (opt.to - opt.from) * k / (opt.steps - 1));
  }
  run.emit("sweep.csv", io::sweep_csv(opt.param, analysis::sweep(game, opt.param, values)).str(), true);
}

int run_cli(const std::vector<std::string>& args);

int cmd_replay(const std::string& manifest_path, const std::string& out) {
  const cli::RunManifest m = cli::RunManifest::from_json(Json::parse(io::read_file(manifest_path)));
  if (m.tool_version != cli::kToolVersion) {
    std::cerr << "warning: manifest written by version " << m.tool_version << "\n";
  }
  if (cli::sha256_hex(io::read_file(m.input_path)) != m.input_digest) {
    throw ParseError("input '" + m.input_path + "' no longer matches the manifest digest");
  }
  std::vector<std::string> args;
  for (std::size_t n = 0; n < m.args.size(); ++n) {
    if (m.args[n] == "--config") {
      ++n;
    } else if (m.args[n].rfind("--config=", 0) != 0) {
      args.push_back(m.args[n]);
    }
  }
  // The recorded option values stand in for any config file.
  const fs::path config = fs::temp_directory_path() / ("attrition_lab_replay_" + m.input_digest.substr(0, 16) + ".toml");
  io::write_file(config.string(), m.config);
  args.insert(args.begin(), {"--config", config.string()});
  if (!out.empty()) {
    auto it = std::find(args.begin(), args.end(), "--out");
    if (it != args.end() && it + 1 != args.end()) {
      *(it + 1) = out;
    } else {
      args.push_back("--out");
      args.push_back(out);
    }
  }
  const int code = run_cli(args);
  fs::remove(config);
  return code;
}

// Options given on the command line or through a config file, as a config
// section for the subcommand.
std::string resolved_config(const CLI::App& sub) {
  std::istringstream in(sub.config_to_str(false, false));
  std::string out, line;
  while (std::getline(in, line)) {
    if (!line.empty()) out += sub.get_name() + "." + line + "\n";
  }
  return out;
}

int exit_code(const Error& e) { return static_cast<int>(e.kind()); }

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"Reputational bargaining with ultimatum opportunities", "attrition_lab"};
  app.set_config("--config", "", "TOML or INI file of option values (flags on the command line win)");
  app.require_subcommand(1);
  app.set_version_flag("--version", cli::kToolVersion);
  Options opt;

  auto input = [&](CLI::App* sub, const std::string& what) {
    sub->add_option("input", opt.input, what)->required()->check(CLI::ExistingFile);
    sub->add_option("--out", opt.out, "Output directory (files plus manifest); stdout when omitted");
  };
  auto grid = [&](CLI::App* sub) {
    sub->add_option("--grid", opt.grid, "Number of sample points")->check(CLI::Range(2, 1000000))->capture_default_str();
  };
  auto atoms = [&](CLI::App* sub) {
    sub->add_option("--atom", opt.atom, "Two-sided time-0 atom as player:mass");
    sub->add_option("--kind", opt.kind, "Two-sided infinite profile kind")->check(CLI::IsMember({"type1", "type2"}));
  };

  auto* solve = app.add_subcommand("solve", "Solve a game and write the profile and sampled curves");
  input(solve, "Game JSON");
  grid(solve);
  atoms(solve);
  solve->add_option("--seed", opt.seed, "Seed for multi-demand solver restarts");

  auto* curve = app.add_subcommand("curve", "Coevolution curve of a one-sided game as CSV");
  input(curve, "Game JSON");
  grid(curve);

  auto* hazard = app.add_subcommand("hazard", "Hazard schedule with jump rows flagged");
  input(hazard, "Game JSON");
  grid(hazard);
  atoms(hazard);

  auto* compstat = app.add_subcommand("compstat", "Comparative statics check for one parameter");
  input(compstat, "Game JSON");
  compstat->add_option("--param", opt.param, "Parameter name")->required();
  compstat->add_option("--delta", opt.delta, "Perturbation size")->capture_default_str();

  auto* limit = app.add_subcommand("limit", "Payoffs as both priors go to zero");
  input(limit, "Game JSON");
  limit->add_option("--rich", opt.rich, "Rich-grid size K for multi-demand games");

  auto* multi = app.add_subcommand("multi", "Solve a multi-demand game");
  input(multi, "Multi-demand game JSON");
  multi->add_option("--seed", opt.seed, "Seed for solver restarts");

  auto* twosided_cmd = app.add_subcommand("twosided", "Classify or solve a two-sided game");
  input(twosided_cmd, "Game JSON (one-sided games are embedded)");
  twosided_cmd->add_flag("--classify", opt.classify, "Print the regime report");
  twosided_cmd->add_flag("--solve", opt.solve, "Build a profile for the regime");
  atoms(twosided_cmd);
  grid(twosided_cmd);
  twosided_cmd->add_option("--audit", opt.audit, "Deviation audit grid size (0 skips)");

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo simulation of a solved profile");
  input(simulate, "Game JSON");
  simulate->add_option("--seed", opt.seed, "Random seed")->required();
  simulate->add_option("--replications", opt.replications, "Number of games")->capture_default_str();
  simulate->add_option("--time-cap", opt.time_cap, "Censoring time")->capture_default_str();
  simulate->add_option("--bin-width", opt.bin_width, "Hazard bin width")->capture_default_str();
  simulate->add_option("--event", opt.event, "Event kind of the hazard CSV")
      ->check(CLI::IsMember({"resolution", "challenge1", "challenge2", "concede1", "concede2"}))
      ->capture_default_str();
  simulate->add_option("--audit", opt.audit, "Deviation audit grid size (0 skips)");
  atoms(simulate);

  auto* hazardfit = app.add_subcommand("hazardfit", "Empirical hazard of a duration CSV");
  input(hazardfit, "CSV with duration and censored columns");
  hazardfit->add_option("--bin-width", opt.bin_width, "Bin width")->capture_default_str();

  auto* sweep = app.add_subcommand("sweep", "Solve along a parameter grid");
  input(sweep, "Game JSON");
  sweep->add_option("--param", opt.param, "Parameter name")->required();
  sweep->add_option("--values", opt.values, "Comma-separated values")->delimiter(',');
  sweep->add_option("--from", opt.from, "First value");
  sweep->add_option("--to", opt.to, "Last value");
  sweep->add_option("--steps", opt.steps, "Number of values");

  std::string manifest_path, replay_out;
  auto* replay = app.add_subcommand("replay", "Rerun the command recorded in a manifest");
  replay->add_option("manifest", manifest_path, "manifest.json")->required()->check(CLI::ExistingFile);
  replay->add_option("--out", replay_out, "Output directory instead of the recorded one");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(ErrorKind::validation);
  }

  try {
    if (replay->parsed()) return cmd_replay(manifest_path, replay_out);
    CLI::App* sub = app.get_subcommands().front();
    Run run(sub->get_name(), args, resolved_config(*sub), opt);
    if (sub == solve) cmd_solve(run, opt);
    if (sub == curve) cmd_curve(run, opt);
    if (sub == hazard) cmd_hazard(run, opt);
    if (sub == compstat) cmd_compstat(run, opt);
    if (sub == limit) cmd_limit(run, opt);
    if (sub == multi) cmd_multi(run, opt);
    if (sub == twosided_cmd) cmd_twosided(run, opt);
    if (sub == simulate) cmd_simulate(run, opt);
    if (sub == hazardfit) cmd_hazardfit(run, opt);
    if (sub == sweep) cmd_sweep(run, opt);
    run.finish();
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e);
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(ErrorKind::validation);
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(ErrorKind::validation);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run_cli(std::vector<std::string>(argv + 1, argv + argc));
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
}

#include "attrition/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "attrition/errors.hpp"

namespace attrition::io {

namespace {

const std::vector<std::string> kOneSidedFields = {"a1", "a2", "z1", "z2", "r1", "r2", "gamma1", "c1", "k2", "w1"};
const std::vector<std::string> kTwoSidedFields = {"a1", "a2", "z1", "z2", "r1", "r2", "gamma1",
                                                  "gamma2", "c1", "c2", "k1", "k2", "w1", "w2"};
const std::vector<std::string> kMultiFields = {"A1", "A2", "pi1", "pi2", "z1", "z2",
                                               "r1", "r2", "gamma1", "c1", "k2", "w1"};

void check_fields(const Json& doc, const std::vector<std::string>& allowed, const std::string& kind) {
  const std::set<std::string> known(allowed.begin(), allowed.end());
  for (const auto& item : doc.items()) {
    if (item.key() == "schema") continue;
    if (!known.count(item.key())) throw ParseError("unknown field '" + item.key() + "' for a " + kind + " game");
  }
  for (const std::string& name : allowed) {
    if (!doc.contains(name)) throw ParseError("missing field '" + name + "'");
  }
}

double scalar(const Json& doc, const std::string& name) {
  const Json& v = doc.at(name);
  if (!v.is_number()) throw ParseError("field '" + name + "' must be a number");
  return v.get<double>();
}

std::vector<double> list(const Json& doc, const std::string& name) {
  const Json& v = doc.at(name);
  if (!v.is_array()) throw ParseError("field '" + name + "' must be an array of numbers");
  std::vector<double> out;
  for (const Json& x : v) {
    if (!x.is_number()) throw ParseError("field '" + name + "' must be an array of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

Json header() {
  Json doc;
  doc["schema"] = kSchema;
  return doc;
}

Json pair(double a, double b) { return Json::array({number(a), number(b)}); }

template <class T>
Json pair(const std::array<T, 2>& xs) {
  return Json::array({number(xs[0]), number(xs[1])});
}

Json optional_number(const std::optional<double>& x) { return x ? number(*x) : Json(nullptr); }

std::string escape_csv(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  return out;
}

}  // namespace

Game parse_game(const std::string& text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }
  return parse_game(doc);
}

Game parse_game(const Json& doc) {
  if (!doc.is_object()) throw ParseError("game document must be a JSON object");
  if (!doc.contains("schema")) throw ParseError(std::string("missing schema tag (expected \"") + kSchema + "\")");
  if (!doc["schema"].is_string() || doc["schema"].get<std::string>() != kSchema) {
    throw ParseError(std::string("unsupported schema (expected \"") + kSchema + "\")");
  }
  if (doc.contains("A1")) {
    check_fields(doc, kMultiFields, "multi-demand");
    MultiDemandGame g;
    g.demands1 = list(doc, "A1");
    g.demands2 = list(doc, "A2");
    g.prior1 = list(doc, "pi1");
    g.prior2 = list(doc, "pi2");
    g.z1 = scalar(doc, "z1");
    g.z2 = scalar(doc, "z2");
    g.r1 = scalar(doc, "r1");
    g.r2 = scalar(doc, "r2");
    g.gamma1 = scalar(doc, "gamma1");
    g.c1 = scalar(doc, "c1");
    g.k2 = scalar(doc, "k2");
    g.w1 = scalar(doc, "w1");
    validate(g);
    return g;
  }
  if (doc.contains("gamma2")) {
    check_fields(doc, kTwoSidedFields, "two-sided");
    TwoSidedGame g;
    for (int i = 0; i < 2; ++i) {
      const std::string s = std::to_string(i + 1);
      g.a[i] = scalar(doc, "a" + s);
      g.z[i] = scalar(doc, "z" + s);
      g.r[i] = scalar(doc, "r" + s);
      g.gamma[i] = scalar(doc, "gamma" + s);
      g.c[i] = scalar(doc, "c" + s);
      g.k[i] = scalar(doc, "k" + s);
      g.w[i] = scalar(doc, "w" + s);
    }
    validate(g);
    return g;
  }
  check_fields(doc, kOneSidedFields, "one-sided");
  OneSidedGame g{scalar(doc, "a1"), scalar(doc, "a2"), scalar(doc, "z1"),     scalar(doc, "z2"),
                 scalar(doc, "r1"), scalar(doc, "r2"), scalar(doc, "gamma1"), scalar(doc, "c1"),
                 scalar(doc, "k2"), scalar(doc, "w1")};
  validate(g);
  return g;
}

Json to_json(const OneSidedGame& g) {
  Json doc = header();
  doc["a1"] = number(g.a1);
  doc["a2"] = number(g.a2);
  doc["z1"] = number(g.z1);
  doc["z2"] = number(g.z2);
  doc["r1"] = number(g.r1);
  doc["r2"] = number(g.r2);
  doc["gamma1"] = number(g.gamma1);
  doc["c1"] = number(g.c1);
  doc["k2"] = number(g.k2);
  doc["w1"] = number(g.w1);
  return doc;
}

Json to_json(const TwoSidedGame& g) {
  Json doc = header();
  const char* names[] = {"a", "z", "r", "gamma", "c", "k", "w"};
  const std::array<double, 2>* fields[] = {&g.a, &g.z, &g.r, &g.gamma, &g.c, &g.k, &g.w};
  for (int f = 0; f < 7; ++f) {
    for (int i = 0; i < 2; ++i) doc[names[f] + std::to_string(i + 1)] = number((*fields[f])[i]);
  }
  return doc;
}

Json to_json(const MultiDemandGame& g) {
  Json doc = header();
  doc["A1"] = numbers(g.demands1);
  doc["A2"] = numbers(g.demands2);
  doc["pi1"] = numbers(g.prior1);
  doc["pi2"] = numbers(g.prior2);
  doc["z1"] = number(g.z1);
  doc["z2"] = number(g.z2);
  doc["r1"] = number(g.r1);
  doc["r2"] = number(g.r2);
  doc["gamma1"] = number(g.gamma1);
  doc["c1"] = number(g.c1);
  doc["k2"] = number(g.k2);
  doc["w1"] = number(g.w1);
  return doc;
}

Json to_json(const Game& game) {
  return std::visit([](const auto& g) { return to_json(g); }, game);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write '" + path + "'");
  out << content;
  if (!out) throw ParseError("write to '" + path + "' failed");
}

double round15(double x) {
  if (!std::isfinite(x)) return x;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.15g", x);
  return std::strtod(buf, nullptr);
}

std::string format15(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.15g", x);
  return buf;
}

Json number(double x) {
  if (!std::isfinite(x)) return format15(x);
  return round15(x);
}

Json numbers(const std::vector<double>& xs) {
  Json out = Json::array();
  for (double x : xs) out.push_back(number(x));
  return out;
}

std::string dump(const Json& doc, bool pretty) {
  return pretty ? doc.dump(2) + "\n" : doc.dump();
}

Csv::Csv(std::vector<std::string> header) : header_(std::move(header)) {}

void Csv::add(std::vector<Cell> row) {
  if (row.size() != header_.size()) throw ParseError("CSV row width does not match the header");
  std::vector<std::string> cells;
  for (const Cell& c : row) {
    cells.push_back(std::holds_alternative<double>(c) ? format15(std::get<double>(c))
                                                      : escape_csv(std::get<std::string>(c)));
  }
  rows_.push_back(std::move(cells));
}

std::string Csv::str() const {
  std::string out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t n = 0; n < cells.size(); ++n) {
      if (n) out += ',';
      out += cells[n];
    }
    out += '\n';
  };
  line(header_);
  for (const auto& r : rows_) line(r);
  return out;
}

Json to_json(const Derived& d) {
  Json doc;
  doc["D"] = number(d.overlap);
  doc["lambda1"] = number(d.concession_rate1);
  doc["lambda2"] = number(d.concession_rate2);
  doc["mu2_star"] = number(d.challenge_threshold);
  doc["nu1_star"] = number(d.indifference_posterior);
  doc["phi1_star"] = optional_number(d.decay_floor);
  doc["mu1_N"] = number(d.switch_reputation);
  return doc;
}

Json to_json(const TwoSidedDerived& d) {
  Json doc;
  doc["D"] = number(d.overlap);
  doc["lambda"] = pair(d.concession_rate);
  doc["theta"] = pair(d.challenge_threshold);
  doc["nu_star"] = pair(d.indifference_posterior);
  doc["phi_star"] = Json::array({optional_number(d.decay_floor[0]), optional_number(d.decay_floor[1])});
  return doc;
}

Json to_json(const onesided::EquilibriumProfile& eq) {
  Json doc;
  doc["kind"] = "one_sided";
  doc["T"] = number(eq.horizon());
  doc["T1"] = number(eq.challenge_end());
  doc["Q1"] = number(eq.atom1());
  doc["Q2"] = number(eq.atom2());
  doc["u1"] = number(eq.payoff1());
  doc["u2"] = number(eq.payoff2());
  doc["loser"] = eq.atom1() > 0.0 ? 1 : (eq.atom2() > 0.0 ? 2 : 0);
  doc["derived"] = to_json(eq.derived());
  doc["game"] = to_json(eq.game());
  return doc;
}

Json to_json(const Profile& p) {
  Json doc;
  doc["kind"] = "two_sided";
  doc["T"] = number(p.horizon);
  doc["Q"] = pair(p.player[0].atom(), p.player[1].atom());
  doc["u"] = pair(p.payoff);
  doc["challenge_end"] = pair(p.player[0].challenge_end(), p.player[1].challenge_end());
  doc["posterior"] = pair(p.reputation(0, 0.0), p.reputation(1, 0.0));
  doc["derived"] = to_json(p.derived);
  doc["game"] = to_json(p.game);
  return doc;
}

Json to_json(const twosided::RegimeClass& rc) {
  Json doc;
  doc["regime"] = twosided::to_string(rc.regime);
  doc["theta"] = pair(rc.theta);
  doc["phi"] = pair(rc.phi);
  doc["phi_nu"] = pair(rc.phi_nu);
  doc["finite_exists"] = rc.finite_exists;
  doc["type1"] = rc.type1;
  doc["type2"] = rc.type2;
  Json t1 = Json::array();
  for (const auto& a : rc.type1_atoms) {
    t1.push_back(Json{{"player", a.player + 1}, {"lo", number(a.lo)}, {"hi", number(a.hi)}});
  }
  doc["type1_atoms"] = t1;
  Json t2 = Json::array();
  for (const auto& e : rc.type2_atoms) {
    Json entry;
    entry["player"] = e.atom.player + 1;
    entry["atom"] = number(e.atom.atom);
    entry["branch"] = twosided::to_string(e.branch);
    entry["absorption"] = number(e.absorption);
    t2.push_back(entry);
  }
  doc["type2_atoms"] = t2;
  doc["note"] = rc.note;
  return doc;
}

Json to_json(const twosided::InfiniteProfile& ip) {
  Json doc = to_json(ip.profile);
  doc["kind"] = ip.kind;
  doc["atom"] = Json{{"player", ip.atom.player + 1}, {"mass", number(ip.atom.atom)}};
  if (ip.kind == "type2") doc["branch"] = twosided::to_string(ip.branch);
  doc["absorption"] = pair(ip.absorption);
  doc["steady_rates"] = pair(ip.steady_rates);
  doc["posterior"] = pair(ip.posterior);
  return doc;
}

Json to_json(const analysis::BenefitRegion& region) {
  Json doc;
  doc["condition_holds"] = region.condition_holds;
  if (region.condition_holds) {
    doc["mu1_lower"] = number(region.mu1_lower);
    doc["mu1_upper"] = number(region.mu1_upper);
    if (region.lower_unresolved) doc["lower_unresolved"] = true;
  }
  doc["nu1_star"] = number(region.target);
  doc["mu1_N"] = number(region.switch_reputation);
  doc["time_with"] = number(region.time_with);
  doc["time_without"] = number(region.time_without);
  return doc;
}

Json to_json(const analysis::LimitPayoffs& limit) {
  Json doc;
  doc["winner"] = limit.winner;
  if (limit.u1 && limit.u2) {
    doc["payoffs"] = pair(*limit.u1, *limit.u2);
  } else {
    doc["payoffs"] = nullptr;
  }
  return doc;
}

Json to_json(const analysis::MonotonicityReport& r) {
  Json doc;
  doc["param"] = r.param;
  doc["delta"] = number(r.delta);
  doc["region"] = r.region;
  doc["u1"] = number(r.u1);
  doc["u2"] = number(r.u2);
  doc["du1"] = number(r.du1);
  doc["du2"] = number(r.du2);
  doc["predicted1"] = r.predicted1;
  doc["predicted2"] = r.predicted2;
  doc["same_region"] = r.same_region;
  doc["holds"] = r.holds();
  return doc;
}

Json to_json(const multidemand::MultiDemandSolution& s) {
  Json doc;
  doc["u1"] = number(s.level);
  doc["u2"] = number(s.payoff2);
  doc["mass_residual"] = number(s.mass_residual);
  Json sigma1 = Json::array();
  for (const auto& c : s.choices) {
    Json row;
    row["a1"] = number(c.a1);
    row["sigma1"] = number(c.sigma);
    row["posterior1"] = number(c.posterior);
    row["payoff"] = number(c.payoff);
    row["degenerate"] = c.degenerate;
    Json sigma2 = Json::array();
    for (std::size_t n = 0; n < c.mimic.sigma.size(); ++n) {
      Json entry;
      entry["sigma2"] = number(c.mimic.sigma[n]);
      entry["posterior2"] = number(c.mimic.posterior2[n]);
      entry["payoff2"] = number(c.mimic.payoff2[n]);
      sigma2.push_back(entry);
    }
    row["accept"] = number(c.mimic.sigma_accept);
    row["per_a2"] = sigma2;
    sigma1.push_back(row);
  }
  doc["choices"] = sigma1;
  Json outcome;
  outcome["agreement"] = number(s.outcome.agreement);
  Json split = Json::array();
  for (const auto& [share, prob] : s.outcome.split) split.push_back(pair(share, prob));
  outcome["split"] = split;
  Json pairs = Json::array();
  for (const auto& p : s.outcome.pairs) {
    pairs.push_back(Json{{"a1", number(p.a1)},
                         {"a2", number(p.a2)},
                         {"announce", number(p.announce)},
                         {"immediate", number(p.immediate)},
                         {"attrition", number(p.attrition)}});
  }
  outcome["pairs"] = pairs;
  doc["outcome"] = outcome;
  return doc;
}

Json to_json(const AuditReport& audit) {
  Json doc;
  doc["max_advantage"] = number(audit.max_advantage);
  Json players = Json::array();
  for (const PlayerAudit& p : audit.player) {
    Json row;
    row["realized"] = number(p.realized);
    row["best_deviation"] = number(p.best_deviation);
    row["advantage"] = number(p.advantage);
    row["best_kind"] = p.best_kind;
    row["best_time"] = number(p.best_time);
    row["concede_spread"] = number(p.concede_spread);
    row["challenge_gap"] = number(p.challenge_gap);
    row["after_gap"] = number(p.after_gap);
    players.push_back(row);
  }
  doc["player"] = players;
  return doc;
}

Json to_json(const montecarlo::SimReport& r) {
  Json doc;
  doc["replications"] = r.replications;
  Json ending, at_zero;
  for (int e = 0; e < montecarlo::ending_count; ++e) {
    ending[montecarlo::ending_name(e)] = number(r.ending[e]);
    at_zero[montecarlo::ending_name(e)] = number(r.at_zero[e]);
  }
  doc["ending"] = ending;
  doc["at_zero"] = at_zero;
  Json payoff = Json::array();
  for (const auto& p : r.payoff) {
    payoff.push_back(Json{{"mean", number(p.mean)}, {"std_error", number(p.std_error)}, {"count", p.count}});
  }
  doc["payoff"] = payoff;
  doc["truncation_bound"] = number(r.truncation_bound);
  Json posterior = Json::array();
  for (const auto& b : r.bins) {
    if (b.at_risk == 0) break;
    const double n = static_cast<double>(b.at_risk);
    posterior.push_back(Json::array({number(b.start), b.at_risk, number(b.justified[0] / n),
                                     number(b.justified[1] / n)}));
  }
  doc["posterior_columns"] = Json::array({"bin_start", "at_risk", "justified1", "justified2"});
  doc["posterior"] = posterior;
  if (r.audit) doc["audit"] = to_json(*r.audit);
  return doc;
}

std::vector<double> sample_times(const Profile& profile, int n) {
  if (n < 2) throw InvalidGame("grid needs at least 2 points");
  double end = profile.horizon;
  if (!std::isfinite(end)) {
    end = 0.0;
    for (const PlayerPath& path : profile.player) {
      for (double b : path.breakpoints()) {
        if (std::isfinite(b)) end = std::max(end, b);
      }
    }
    end = end > 0.0 ? 2.0 * end : 10.0;
  }
  std::vector<double> ts(n);
  for (int k = 0; k < n; ++k) ts[k] = end * k / (n - 1);
  return ts;
}

Csv curves_csv(const Profile& profile, int n) {
  Csv csv({"t", "F1", "F2", "G1", "G2", "q1", "q2", "mu1", "mu2", "kappa1", "kappa2", "chi1", "chi2"});
  for (double t : sample_times(profile, n)) {
    const PlayerPath& p1 = profile.player[0];
    const PlayerPath& p2 = profile.player[1];
    csv.add({t, p1.concede_cdf(t), p2.concede_cdf(t), p1.challenge_cdf(t), p2.challenge_cdf(t),
             profile.yield_probability(0, t), profile.yield_probability(1, t), p1.reputation(t), p2.reputation(t),
             p1.concede_hazard(t), p2.concede_hazard(t), p1.challenge_hazard(t), p2.challenge_hazard(t)});
  }
  return csv;
}

Csv coevolution_csv(const onesided::CoevolutionCurve& curve, int n) {
  if (n < 2) throw InvalidGame("grid needs at least 2 points");
  Csv csv({"mu2", "mu1"});
  for (int k = 1; k <= n; ++k) {
    const double mu2 = static_cast<double>(k) / n;
    csv.add({mu2, curve.player1_at(mu2)});
  }
  return csv;
}

Csv hazard_csv(const Profile& profile, int n) {
  const HazardSchedule schedule(profile);
  Csv csv({"t", "side", "challenge", "resolution", "concession1", "concession2", "jump"});
  std::vector<double> ts = sample_times(profile, n);
  std::size_t next = 0;
  const auto& jumps = schedule.jumps();
  for (double t : ts) {
    while (next < jumps.size() && jumps[next].time <= t) {
      const HazardJump& j = jumps[next++];
      csv.add({j.time, std::string("left"), j.challenge_left, j.resolution_left, schedule.concession(0, j.time),
               schedule.concession(1, j.time), j.label});
      csv.add({j.time, std::string("right"), j.challenge_right, j.resolution_right, schedule.concession(0, j.time),
               schedule.concession(1, j.time), j.label});
    }
    csv.add({t, std::string(""), schedule.challenge(t), schedule.resolution(t), schedule.concession(0, t),
             schedule.concession(1, t), std::string("")});
  }
  return csv;
}

Csv sweep_csv(const std::string& param, const std::vector<analysis::SweepRow>& rows) {
  Csv csv({param, "u1", "u2", "T", "T1", "Q1", "Q2", "region", "sign_u1", "sign_u2", "error"});
  for (const auto& r : rows) {
    csv.add({r.value, r.u1, r.u2, r.horizon, r.challenge_end, r.atom1, r.atom2, r.region,
             static_cast<double>(r.sign1), static_cast<double>(r.sign2), r.error});
  }
  return csv;
}

Csv hazard_bins_csv(const std::vector<montecarlo::HazardBin>& bins) {
  Csv csv({"bin_start", "bin_end", "at_risk", "events", "hazard"});
  for (const auto& b : bins) {
    csv.add({b.start, b.end, static_cast<double>(b.at_risk), static_cast<double>(b.events),
             b.hazard ? Cell(*b.hazard) : Cell(std::string(""))});
  }
  return csv;
}

Csv multi_tables_csv(const multidemand::MultiDemandSolution& s) {
  Csv csv({"a1", "sigma1", "a2", "sigma2", "posterior2", "payoff2"});
  for (const auto& c : s.choices) {
    csv.add({c.a1, c.sigma, std::string("accept"), c.mimic.sigma_accept, std::string(""), std::string("")});
    for (std::size_t n = 0; n < c.mimic.sigma.size(); ++n) {
      csv.add({c.a1, c.sigma, std::to_string(n + 1), c.mimic.sigma[n], c.mimic.posterior2[n], c.mimic.payoff2[n]});
    }
  }
  return csv;
}

Durations parse_durations(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw EmptyInput("duration CSV is empty");
  const std::vector<std::string> head = split(line);
  int col_d = -1, col_c = -1;
  for (std::size_t n = 0; n < head.size(); ++n) {
    if (head[n] == "duration") col_d = static_cast<int>(n);
    if (head[n] == "censored") col_c = static_cast<int>(n);
  }
  if (col_d < 0 || col_c < 0) throw ParseError("duration CSV needs 'duration' and 'censored' columns");
  Durations out;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    const std::vector<std::string> cells = split(line);
    if (cells.size() != head.size()) throw ParseError("row " + std::to_string(row) + " has the wrong width");
    char* end = nullptr;
    const std::string& d = cells[col_d];
    const double value = std::strtod(d.c_str(), &end);
    if (d.empty() || *end != '\0') throw ParseError("row " + std::to_string(row) + ": bad duration '" + d + "'");
    const std::string& c = cells[col_c];
    bool cens = false;
    if (c == "1" || c == "true") {
      cens = true;
    } else if (c != "0" && c != "false") {
      throw ParseError("row " + std::to_string(row) + ": censored must be 0/1 or true/false");
    }
    out.duration.push_back(value);
    out.censored.push_back(cens);
  }
  if (out.duration.empty()) throw EmptyInput("duration CSV has no rows");
  return out;
}

}  // namespace attrition::io
